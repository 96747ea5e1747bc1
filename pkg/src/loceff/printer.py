"""Deterministic pretty printer; output re-parses to an alpha-equal term."""

from __future__ import annotations

from .syntax import (
    And,
    App,
    Auto,
    BoolLit,
    BoolT,
    ByName,
    Clause,
    CompEq,
    CompT,
    Do,
    Equation,
    Exists,
    Falsity,
    Forall,
    FunT,
    Fun,
    Handler,
    HandlerT,
    Hole,
    If,
    Implies,
    Op,
    Or,
    Return,
    Signature,
    TApp,
    Theory,
    TIf,
    TOp,
    Truth,
    Unit,
    UnitT,
    ValueEq,
    Var,
    With,
)


def show(x) -> str:
    match x:
        case Var() | Unit() | BoolLit() | Fun() | Handler():
            return _value(x)
        case If() | App() | Return() | Op() | Do() | With() | Hole():
            return _comp(x)
        case Clause():
            return _clause(x)
        case TApp() | TIf() | TOp():
            return _template(x)
        case UnitT() | BoolT() | FunT() | HandlerT():
            return _vtype(x)
        case CompT():
            return _ctype(x)
        case Signature():
            return "{" + ", ".join(x.names) + "}"
        case Theory():
            return "{" + ", ".join(x.labels) + "}"
        case Equation():
            return _equation(x)
        case ValueEq() | CompEq() | Truth() | Falsity() | And() | Or() | Implies() | Forall() | Exists():
            return _formula(x, 0)
    return repr(x)


def _evidence(ev) -> str:
    match ev:
        case None:
            return ""
        case ByName(name):
            return f" by {name}"
        case Auto(depth, steps):
            return f" by auto(depth={depth}, steps={steps})"
    raise TypeError(ev)


def _value(v) -> str:
    match v:
        case Var(name):
            return name
        case Unit():
            return "()"
        case BoolLit(b):
            return "true" if b else "false"
        case Fun(x, body):
            return f"fun {x} -> {_comp(body)}"
        case Handler(x, ret, clauses, ev):
            parts = [_clause(c) for c in clauses]
            parts.append(f"return {x} -> {_comp(ret)}")
            return "handler { " + " | ".join(parts) + " }" + _evidence(ev)
    raise TypeError(f"not a value: {v!r}")


def _atom(v) -> str:
    s = _value(v)
    return f"({s})" if isinstance(v, (Fun, Handler)) else s


def _clause(c: Clause) -> str:
    return f"{c.op}({c.param}; {c.cont}) -> {_comp(c.body)}"


def _greedy(c) -> bool:
    """Computations whose printed form extends as far right as possible."""
    return isinstance(c, (If, With, Do))


def _comp(c) -> str:
    match c:
        case Return(v):
            return f"return {_atom(v)}"
        case App(f, a):
            return f"{_atom(f)} {_atom(a)}"
        case Op(op, v, y, body):
            return f"{op}({_value(v)}; {y}. {_comp(body)})"
        case If(v, c1, c2):
            return f"if {_atom(v)} then {_comp(c1)} else {_comp(c2)}"
        case With(h, body):
            return f"with {_atom(h)} handle {_comp(body)}"
        case Do("_", c1, c2):
            left = f"({_comp(c1)})" if _greedy(c1) else _comp(c1)
            return f"{left}; {_comp(c2)}"
        case Do(x, c1, c2):
            return f"do {x} <- {_comp(c1)} in {_comp(c2)}"
        case Hole(name):
            return f"?{name}"
    raise TypeError(f"not a computation: {c!r}")


def _template(t) -> str:
    match t:
        case TApp(z, v):
            return f"{z} {_atom(v)}"
        case TIf(v, t1, t2):
            return f"if {_atom(v)} then {_template(t1)} else {_template(t2)}"
        case TOp(op, v, y, body):
            return f"{op}({_value(v)}; {y}. {_template(body)})"
    raise TypeError(f"not a template: {t!r}")


def _vtype(a) -> str:
    match a:
        case UnitT():
            return "unit"
        case BoolT():
            return "bool"
        case FunT(arg, res):
            return f"{_vtype_atom(arg)} -> {_ctype(res)}"
        case HandlerT(src, dst):
            return f"{_ctype(src)} => {_ctype(dst)}"
    raise TypeError(f"not a value type: {a!r}")


def _vtype_atom(a) -> str:
    s = _vtype(a)
    return f"({s})" if isinstance(a, (FunT, HandlerT)) else s


def _ctype(c: CompT) -> str:
    s = f"{_vtype_atom(c.value)}!{show(c.sig)}"
    if c.theory:
        s += "/" + show(c.theory)
    return s


def _ctx_entry(name: str, ty) -> str:
    return f"{name} : {_vtype(ty)}"


def _equation(e: Equation) -> str:
    vals = ", ".join(_ctx_entry(x, a) for x, a in e.value_ctx)
    zs = ", ".join(f"{z} : {_vtype_atom(a)} -> *" for z, a in e.template_ctx)
    ctx = "; ".join(p for p in (vals, zs) if p)
    head = f"{e.label}: " if e.label else ""
    return f"{head}{ctx} |- {_template(e.lhs)} ~ {_template(e.rhs)}"


_PREC = {Implies: 1, Or: 2, And: 3}


def _formula(f, prec: int) -> str:
    match f:
        case Truth():
            return "top"
        case Falsity():
            return "bot"
        case ValueEq(a, b, ty):
            s = f"{_value(a)} == {_value(b)} at {_vtype(ty)}"
            return f"({s})" if prec > 0 else s
        case CompEq(a, b, ty):
            s = f"{_eq_side(a)} == {_eq_side(b)} at {_ctype(ty)}"
            return f"({s})" if prec > 0 else s
        case Forall(x, ty, body) | Exists(x, ty, body):
            q = "forall" if isinstance(f, Forall) else "exists"
            s = f"{q} {x} : {_vtype(ty)}. {_formula(body, 0)}"
            return f"({s})" if prec > 0 else s
        case Implies(a, b):
            s = f"{_formula(a, 2)} ==> {_formula(b, 1)}"
        case Or(a, b):
            s = f"{_formula(a, 3)} \\/ {_formula(b, 2)}"
        case And(a, b):
            s = f"{_formula(a, 4)} /\\ {_formula(b, 3)}"
        case _:
            raise TypeError(f"not a formula: {f!r}")
    return f"({s})" if prec > _PREC[type(f)] else s


def _eq_side(c) -> str:
    s = _comp(c)
    return f"({s})" if _greedy(c) or isinstance(c, Do) else s
