"""Small-step operational semantics and a fuel-bounded evaluator."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .syntax import (
    App,
    BoolLit,
    Comp,
    Do,
    Fun,
    Handler,
    If,
    Op,
    Return,
    Syntax,
    Value,
    Var,
    With,
    fresh,
    subst,
)


@dataclass(frozen=True)
class Stepped:
    next: Comp
    rule: str


@dataclass(frozen=True)
class ValueResult:
    value: Value


@dataclass(frozen=True)
class OpStopped:
    op: str
    arg: Value
    var: str
    cont: Comp


@dataclass(frozen=True)
class Stuck:
    reason: str
    term: Comp


@dataclass(frozen=True)
class FuelExhausted:
    fuel: int
    term: Comp


StepResult = Union[Stepped, ValueResult, OpStopped, Stuck]


class OpenTerm(ValueError):
    pass


def step(c: Comp) -> StepResult:
    """One step of the reduction relation on a closed computation."""
    if c.free_vars:
        raise OpenTerm(f"cannot step open computation; free variables {sorted(c.free_vars)}")
    return _step(c)


def _step(c: Comp) -> StepResult:
    match c:
        case Return(v):
            return ValueResult(v)
        case Op(op, v, y, body):
            return OpStopped(op, v, y, body)
        case If(BoolLit(True), c1, _):
            return Stepped(c1, "if-true")
        case If(BoolLit(False), _, c2):
            return Stepped(c2, "if-false")
        case If(v, _, _):
            return Stuck(f"condition {v} is not a boolean", c)
        case App(Fun(x, body), v):
            return Stepped(subst(body, {x: v}), "app")
        case App(f, _):
            return Stuck(f"{f} is not a function", c)
        case Do(x, Return(v), rest):
            return Stepped(subst(rest, {x: v}), "do-return")
        case Do(x, Op(op, v, y, body), rest):
            if y in rest.free_vars or y == x:
                y2 = fresh(y, rest.free_vars | body.free_vars | {x})
                body, y = subst(body, {y: Var(y2)}), y2
            return Stepped(Op(op, v, y, Do(x, body, rest)), "do-op")
        case Do(x, first, rest):
            r = _step(first)
            if isinstance(r, Stepped):
                return Stepped(Do(x, r.next, rest), r.rule)
            return r
        case With(Handler() as h, Return(v)):
            return Stepped(subst(h.ret_body, {h.ret_param: v}), "handle-return")
        case With(Handler() as h, Op(op, v, y, body)):
            clause = h.clause(op)
            if clause is None:
                return Stuck(f"operation {op} is not handled", c)
            k = Fun(y, With(h, body))
            return Stepped(subst(clause.body, {clause.param: v, clause.cont: k}), "handle-op")
        case With(Handler() as h, body):
            r = _step(body)
            if isinstance(r, Stepped):
                return Stepped(With(h, r.next), r.rule)
            return r
        case With(h, _):
            return Stuck(f"{h} is not a handler", c)
    return Stuck(f"no rule applies to {c!r}", c)


@dataclass(frozen=True)
class RunResult:
    result: Union[ValueResult, OpStopped, Stuck, FuelExhausted]
    steps: int
    trace: Optional[tuple[Comp, ...]] = field(default=None, repr=False)

    @property
    def final(self) -> Comp:
        match self.result:
            case ValueResult(v):
                return Return(v)
            case OpStopped(op, v, y, body):
                return Op(op, v, y, body)
            case Stuck(_, t) | FuelExhausted(_, t):
                return t


def run(c: Comp, fuel: Optional[int] = None, trace: bool = False) -> RunResult:
    """Iterate ``step`` to a normal form or until ``fuel`` steps were taken."""
    if c.free_vars:
        raise OpenTerm(f"cannot run open computation; free variables {sorted(c.free_vars)}")
    seen = [c] if trace else None
    n = 0
    while True:
        r = _step(c)
        if not isinstance(r, Stepped):
            return RunResult(r, n, tuple(seen) if trace else None)
        if fuel is not None and n >= fuel:
            return RunResult(FuelExhausted(fuel, c), n, tuple(seen) if trace else None)
        c = r.next
        n += 1
        if trace:
            seen.append(c)


def size(t) -> int:
    """Number of syntax nodes; used for fuel budgets and generator sizes."""
    n = 1
    for f in t.__dataclass_fields__:
        child = getattr(t, f)
        if isinstance(child, Syntax):
            n += size(child)
        elif isinstance(child, tuple):
            n += sum(size(c) for c in child if isinstance(c, Syntax))
    return n
