"""Abstract syntax of the calculus: terms, types, templates, theories and formulae.

Terms use named binders.  Equality and hashing of every syntax node is
alpha-equivalence: each node computes a nameless key (bound variables become
de Bruijn indices) and compares on that, so renaming a binder never changes
equality.  Surface names are kept for printing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Mapping, Optional, Union


@dataclass(frozen=True)
class Span:
    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


def _span():
    return field(default=None, compare=False, repr=False, kw_only=True)


class Syntax:
    """Base for nodes compared up to alpha-equivalence."""

    @cached_property
    def key(self):
        return self._key({}, 0)

    def _key(self, env: dict, depth: int):
        raise NotImplementedError

    def __eq__(self, other):
        if not isinstance(other, Syntax):
            return NotImplemented
        return self is other or self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __str__(self) -> str:
        from .printer import show

        return show(self)


def _bind(env: dict, depth: int, *names: str) -> tuple[dict, int]:
    env = dict(env)
    for n in names:
        env[n] = depth
        depth += 1
    return env, depth


def _var_key(name: str, env: dict, depth: int):
    level = env.get(name)
    if level is None:
        return ("free", name)
    return ("bound", depth - level)


# --------------------------------------------------------------------------
# Values


class Value(Syntax):
    pass


class Comp(Syntax):
    pass


@dataclass(frozen=True, eq=False)
class Var(Value):
    name: str
    span: Optional[Span] = _span()

    def _key(self, env, depth):
        return _var_key(self.name, env, depth)

    @cached_property
    def free_vars(self) -> frozenset[str]:
        return frozenset({self.name})


@dataclass(frozen=True, eq=False)
class Unit(Value):
    span: Optional[Span] = _span()

    def _key(self, env, depth):
        return ("unit",)

    free_vars = frozenset()


@dataclass(frozen=True, eq=False)
class BoolLit(Value):
    value: bool
    span: Optional[Span] = _span()

    def _key(self, env, depth):
        return ("bool", self.value)

    free_vars = frozenset()


@dataclass(frozen=True, eq=False)
class Fun(Value):
    param: str
    body: Comp
    span: Optional[Span] = _span()

    def _key(self, env, depth):
        return ("fun", self.body._key(*_bind(env, depth, self.param)))

    @cached_property
    def free_vars(self) -> frozenset[str]:
        return self.body.free_vars - {self.param}


@dataclass(frozen=True)
class ByName:
    """Respects evidence given by a named proof script."""

    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Auto:
    """Respects evidence delegated to the bounded semantic check."""

    depth: int = 2
    steps: int = 10_000

    def __str__(self) -> str:
        return f"auto(depth={self.depth}, steps={self.steps})"


Evidence = Union[ByName, Auto]


@dataclass(frozen=True, eq=False)
class Clause(Syntax):
    op: str
    param: str
    cont: str
    body: Comp
    span: Optional[Span] = _span()

    def _key(self, env, depth):
        return (self.op, self.body._key(*_bind(env, depth, self.param, self.cont)))

    @cached_property
    def free_vars(self) -> frozenset[str]:
        return self.body.free_vars - {self.param, self.cont}


@dataclass(frozen=True, eq=False)
class Handler(Value):
    ret_param: str
    ret_body: Comp
    clauses: tuple[Clause, ...]
    evidence: Optional[Evidence] = field(default=None, compare=False)
    span: Optional[Span] = _span()

    def __post_init__(self):
        ops = [c.op for c in self.clauses]
        if len(ops) != len(set(ops)):
            raise ValueError(f"duplicate operation clause in handler: {ops}")

    def _key(self, env, depth):
        ret = self.ret_body._key(*_bind(env, depth, self.ret_param))
        cls = tuple(sorted(c._key(env, depth) for c in self.clauses))
        return ("handler", ret, cls)

    def clause(self, op: str) -> Optional[Clause]:
        for c in self.clauses:
            if c.op == op:
                return c
        return None

    @property
    def ops(self) -> tuple[str, ...]:
        return tuple(c.op for c in self.clauses)

    @cached_property
    def free_vars(self) -> frozenset[str]:
        fv = self.ret_body.free_vars - {self.ret_param}
        for c in self.clauses:
            fv |= c.free_vars
        return fv


# --------------------------------------------------------------------------
# Computations


@dataclass(frozen=True, eq=False)
class If(Comp):
    cond: Value
    then: Comp
    else_: Comp
    span: Optional[Span] = _span()

    def _key(self, env, depth):
        return ("if", self.cond._key(env, depth), self.then._key(env, depth), self.else_._key(env, depth))

    @cached_property
    def free_vars(self) -> frozenset[str]:
        return self.cond.free_vars | self.then.free_vars | self.else_.free_vars


@dataclass(frozen=True, eq=False)
class App(Comp):
    fn: Value
    arg: Value
    span: Optional[Span] = _span()

    def _key(self, env, depth):
        return ("app", self.fn._key(env, depth), self.arg._key(env, depth))

    @cached_property
    def free_vars(self) -> frozenset[str]:
        return self.fn.free_vars | self.arg.free_vars


@dataclass(frozen=True, eq=False)
class Return(Comp):
    value: Value
    span: Optional[Span] = _span()

    def _key(self, env, depth):
        return ("return", self.value._key(env, depth))

    @property
    def free_vars(self) -> frozenset[str]:
        return self.value.free_vars


@dataclass(frozen=True, eq=False)
class Op(Comp):
    op: str
    arg: Value
    var: str
    body: Comp
    span: Optional[Span] = _span()

    def _key(self, env, depth):
        return ("op", self.op, self.arg._key(env, depth), self.body._key(*_bind(env, depth, self.var)))

    @cached_property
    def free_vars(self) -> frozenset[str]:
        return self.arg.free_vars | (self.body.free_vars - {self.var})


@dataclass(frozen=True, eq=False)
class Do(Comp):
    var: str
    first: Comp
    rest: Comp
    span: Optional[Span] = _span()

    def _key(self, env, depth):
        return ("do", self.first._key(env, depth), self.rest._key(*_bind(env, depth, self.var)))

    @cached_property
    def free_vars(self) -> frozenset[str]:
        return self.first.free_vars | (self.rest.free_vars - {self.var})


@dataclass(frozen=True, eq=False)
class With(Comp):
    handler: Value
    body: Comp
    span: Optional[Span] = _span()

    def _key(self, env, depth):
        return ("with", self.handler._key(env, depth), self.body._key(env, depth))

    @cached_property
    def free_vars(self) -> frozenset[str]:
        return self.handler.free_vars | self.body.free_vars


@dataclass(frozen=True, eq=False)
class Hole(Comp):
    """Named computation hole; only meaningful inside induction schemas."""

    name: str
    span: Optional[Span] = _span()

    def _key(self, env, depth):
        return ("hole", self.name)

    free_vars = frozenset()


def seq(first: Comp, rest: Comp) -> Do:
    """``first; rest`` sugar."""
    return Do("_", first, rest)


Term = Union[Value, Comp]


# --------------------------------------------------------------------------
# Types


class ValueType:
    pass


@dataclass(frozen=True)
class UnitT(ValueType):
    def __str__(self) -> str:
        return "unit"


@dataclass(frozen=True)
class BoolT(ValueType):
    def __str__(self) -> str:
        return "bool"


UNIT = UnitT()
BOOL = BoolT()


@dataclass(frozen=True)
class FunT(ValueType):
    arg: ValueType
    result: CompT

    def __str__(self) -> str:
        from .printer import show

        return show(self)


@dataclass(frozen=True)
class HandlerT(ValueType):
    src: CompT
    dst: CompT

    def __str__(self) -> str:
        from .printer import show

        return show(self)


@dataclass(frozen=True)
class Signature:
    """Finite map from operation names to (parameter type, result type)."""

    entries: tuple[tuple[str, ValueType, ValueType], ...] = ()

    def __post_init__(self):
        names = [e[0] for e in self.entries]
        if len(names) != len(set(names)):
            raise ValueError(f"duplicate operation in signature: {names}")
        object.__setattr__(self, "entries", tuple(sorted(self.entries, key=lambda e: e[0])))

    @classmethod
    def of(cls, ops: Mapping[str, tuple[ValueType, ValueType]]) -> Signature:
        return cls(tuple((op, a, b) for op, (a, b) in ops.items()))

    def __contains__(self, op: str) -> bool:
        return any(e[0] == op for e in self.entries)

    def __getitem__(self, op: str) -> tuple[ValueType, ValueType]:
        for name, a, b in self.entries:
            if name == op:
                return a, b
        raise KeyError(op)

    def __iter__(self):
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(e[0] for e in self.entries)

    def restrict(self, ops: Iterable[str]) -> Signature:
        keep = set(ops)
        return Signature(tuple(e for e in self.entries if e[0] in keep))

    def __str__(self) -> str:
        return "{" + ", ".join(self.names) + "}"


EMPTY_SIG = Signature()


# --------------------------------------------------------------------------
# Templates and equations


class Template(Syntax):
    pass


@dataclass(frozen=True, eq=False)
class TApp(Template):
    var: str
    arg: Value
    span: Optional[Span] = _span()

    def _key(self, env, depth):
        zenv = env.get("__z__", {})
        z = ("z", zenv[self.var]) if self.var in zenv else ("zfree", self.var)
        return ("tapp", z, self.arg._key(env, depth))

    @property
    def free_vars(self) -> frozenset[str]:
        return self.arg.free_vars

    @property
    def template_vars(self) -> frozenset[str]:
        return frozenset({self.var})


@dataclass(frozen=True, eq=False)
class TIf(Template):
    cond: Value
    then: Template
    else_: Template
    span: Optional[Span] = _span()

    def _key(self, env, depth):
        return ("tif", self.cond._key(env, depth), self.then._key(env, depth), self.else_._key(env, depth))

    @cached_property
    def free_vars(self) -> frozenset[str]:
        return self.cond.free_vars | self.then.free_vars | self.else_.free_vars

    @cached_property
    def template_vars(self) -> frozenset[str]:
        return self.then.template_vars | self.else_.template_vars


@dataclass(frozen=True, eq=False)
class TOp(Template):
    op: str
    arg: Value
    var: str
    body: Template
    span: Optional[Span] = _span()

    def _key(self, env, depth):
        return ("top", self.op, self.arg._key(env, depth), self.body._key(*_bind(env, depth, self.var)))

    @cached_property
    def free_vars(self) -> frozenset[str]:
        return self.arg.free_vars | (self.body.free_vars - {self.var})

    @property
    def template_vars(self) -> frozenset[str]:
        return self.body.template_vars


@dataclass(frozen=True, eq=False)
class Equation(Syntax):
    """``value_ctx ; template_ctx |- lhs ~ rhs``.

    Template context entries store the argument type ``A`` of ``z : A -> *``.
    The label is not part of equality.
    """

    value_ctx: tuple[tuple[str, ValueType], ...]
    template_ctx: tuple[tuple[str, ValueType], ...]
    lhs: Template
    rhs: Template
    label: Optional[str] = field(default=None, compare=False)
    span: Optional[Span] = _span()

    def __post_init__(self):
        for ctx in (self.value_ctx, self.template_ctx):
            names = [n for n, _ in ctx]
            if len(names) != len(set(names)):
                raise ValueError(f"duplicate name in equation context: {names}")

    def _key(self, env, depth):
        env, depth = _bind(env, depth, *(n for n, _ in self.value_ctx))
        env["__z__"] = {z: i for i, (z, _) in enumerate(self.template_ctx)}
        return (
            tuple(t for _, t in self.value_ctx),
            tuple(t for _, t in self.template_ctx),
            self.lhs._key(env, depth),
            self.rhs._key(env, depth),
        )

    @property
    def name(self) -> str:
        return self.label or "<anon>"

    def flipped(self) -> Equation:
        return Equation(self.value_ctx, self.template_ctx, self.rhs, self.lhs, self.label)


@dataclass(frozen=True)
class Theory:
    equations: frozenset[Equation] = frozenset()

    @classmethod
    def of(cls, *eqs: Equation) -> Theory:
        return cls(frozenset(eqs))

    def __iter__(self):
        return iter(sorted(self.equations, key=lambda e: e.name))

    def __len__(self) -> int:
        return len(self.equations)

    def __bool__(self) -> bool:
        return bool(self.equations)

    def __contains__(self, eq: Equation) -> bool:
        return eq in self.equations

    def __or__(self, other: Theory) -> Theory:
        return Theory(self.equations | other.equations)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(e.name for e in self)

    def by_label(self, label: str) -> Optional[Equation]:
        for e in self.equations:
            if e.label == label:
                return e
        return None

    def __str__(self) -> str:
        return "{" + ", ".join(self.labels) + "}"


EMPTY_THEORY = Theory()


@dataclass(frozen=True)
class CompT:
    value: ValueType
    sig: Signature = EMPTY_SIG
    theory: Theory = EMPTY_THEORY

    def __str__(self) -> str:
        from .printer import show

        return show(self)


Type = Union[ValueType, CompT]


# --------------------------------------------------------------------------
# Formulae


class Formula(Syntax):
    pass


@dataclass(frozen=True, eq=False)
class ValueEq(Formula):
    lhs: Value
    rhs: Value
    type: ValueType
    span: Optional[Span] = _span()

    def _key(self, env, depth):
        return ("veq", self.lhs._key(env, depth), self.rhs._key(env, depth), self.type)

    @cached_property
    def free_vars(self) -> frozenset[str]:
        return self.lhs.free_vars | self.rhs.free_vars


@dataclass(frozen=True, eq=False)
class CompEq(Formula):
    lhs: Comp
    rhs: Comp
    type: CompT
    span: Optional[Span] = _span()

    def _key(self, env, depth):
        return ("ceq", self.lhs._key(env, depth), self.rhs._key(env, depth), self.type)

    @cached_property
    def free_vars(self) -> frozenset[str]:
        return self.lhs.free_vars | self.rhs.free_vars


@dataclass(frozen=True, eq=False)
class Truth(Formula):
    span: Optional[Span] = _span()

    def _key(self, env, depth):
        return ("top",)

    free_vars = frozenset()


@dataclass(frozen=True, eq=False)
class Falsity(Formula):
    span: Optional[Span] = _span()

    def _key(self, env, depth):
        return ("bot",)

    free_vars = frozenset()


@dataclass(frozen=True, eq=False)
class And(Formula):
    left: Formula
    right: Formula
    span: Optional[Span] = _span()

    def _key(self, env, depth):
        return ("and", self.left._key(env, depth), self.right._key(env, depth))

    @cached_property
    def free_vars(self) -> frozenset[str]:
        return self.left.free_vars | self.right.free_vars


@dataclass(frozen=True, eq=False)
class Or(Formula):
    left: Formula
    right: Formula
    span: Optional[Span] = _span()

    def _key(self, env, depth):
        return ("or", self.left._key(env, depth), self.right._key(env, depth))

    @cached_property
    def free_vars(self) -> frozenset[str]:
        return self.left.free_vars | self.right.free_vars


@dataclass(frozen=True, eq=False)
class Implies(Formula):
    left: Formula
    right: Formula
    span: Optional[Span] = _span()

    def _key(self, env, depth):
        return ("implies", self.left._key(env, depth), self.right._key(env, depth))

    @cached_property
    def free_vars(self) -> frozenset[str]:
        return self.left.free_vars | self.right.free_vars


@dataclass(frozen=True, eq=False)
class Forall(Formula):
    var: str
    type: ValueType
    body: Formula
    span: Optional[Span] = _span()

    def _key(self, env, depth):
        return ("forall", self.type, self.body._key(*_bind(env, depth, self.var)))

    @cached_property
    def free_vars(self) -> frozenset[str]:
        return self.body.free_vars - {self.var}


@dataclass(frozen=True, eq=False)
class Exists(Formula):
    var: str
    type: ValueType
    body: Formula
    span: Optional[Span] = _span()

    def _key(self, env, depth):
        return ("exists", self.type, self.body._key(*_bind(env, depth, self.var)))

    @cached_property
    def free_vars(self) -> frozenset[str]:
        return self.body.free_vars - {self.var}


# --------------------------------------------------------------------------
# Free variables, renaming and substitution


def fresh(base: str, avoid: Iterable[str]) -> str:
    avoid = set(avoid)
    name = base if base != "_" else "u"
    while name in avoid:
        name += "'"
    return name


def free_vars(t) -> frozenset[str]:
    return t.free_vars


def alpha_eq(a, b) -> bool:
    return a == b


def _range_fv(s: Mapping[str, Value]) -> frozenset[str]:
    out: frozenset[str] = frozenset()
    for v in s.values():
        out |= v.free_vars
    return out


def _open(binders: tuple[str, ...], body_fv: frozenset[str], s: dict, rename: Callable):
    """Push a substitution under ``binders``; returns (new binders, new subst, renamings)."""
    s = {k: v for k, v in s.items() if k not in binders and k in body_fv}
    if not s:
        return binders, s, {}
    rng = _range_fv(s)
    new, renames = [], {}
    taken = set(rng) | set(body_fv) | set(s) | set(binders)
    for b in binders:
        if b in rng:
            b2 = fresh(b, taken)
            taken.add(b2)
            renames[b] = Var(b2)
            new.append(b2)
        else:
            new.append(b)
    return tuple(new), s, renames


def subst(t, bindings: Mapping[str, Value]):
    """Capture-avoiding simultaneous substitution of values for variables."""
    s = {k: v for k, v in bindings.items() if k in t.free_vars}
    if not s:
        return t
    match t:
        case Var(name):
            return s.get(name, t)
        case Unit() | BoolLit() | Hole():
            return t
        case Fun(x, body):
            (x,), s2, ren = _open((x,), body.free_vars, s, None)
            return Fun(x, subst(body, {**ren, **s2} if ren else s2), span=t.span)
        case Handler(x, ret, clauses, ev):
            (x2,), s2, ren = _open((x,), ret.free_vars, s, None)
            ret = subst(ret, {**ren, **s2})
            return Handler(x2, ret, tuple(subst(c, s) for c in clauses), ev, span=t.span)
        case Clause(op, x, k, body):
            (x2, k2), s2, ren = _open((x, k), body.free_vars, s, None)
            return Clause(op, x2, k2, subst(body, {**ren, **s2}), span=t.span)
        case If(v, c1, c2):
            return If(subst(v, s), subst(c1, s), subst(c2, s), span=t.span)
        case App(f, a):
            return App(subst(f, s), subst(a, s), span=t.span)
        case Return(v):
            return Return(subst(v, s), span=t.span)
        case Op(op, v, y, body):
            (y2,), s2, ren = _open((y,), body.free_vars, s, None)
            return Op(op, subst(v, s), y2, subst(body, {**ren, **s2}), span=t.span)
        case Do(x, c1, c2):
            (x2,), s2, ren = _open((x,), c2.free_vars, s, None)
            return Do(x2, subst(c1, s), subst(c2, {**ren, **s2}), span=t.span)
        case With(h, c):
            return With(subst(h, s), subst(c, s), span=t.span)
        case TApp(z, v):
            return TApp(z, subst(v, s), span=t.span)
        case TIf(v, t1, t2):
            return TIf(subst(v, s), subst(t1, s), subst(t2, s), span=t.span)
        case TOp(op, v, y, body):
            (y2,), s2, ren = _open((y,), body.free_vars, s, None)
            return TOp(op, subst(v, s), y2, subst(body, {**ren, **s2}), span=t.span)
        case ValueEq(a, b, ty):
            return ValueEq(subst(a, s), subst(b, s), ty, span=t.span)
        case CompEq(a, b, ty):
            return CompEq(subst(a, s), subst(b, s), ty, span=t.span)
        case And(a, b):
            return And(subst(a, s), subst(b, s), span=t.span)
        case Or(a, b):
            return Or(subst(a, s), subst(b, s), span=t.span)
        case Implies(a, b):
            return Implies(subst(a, s), subst(b, s), span=t.span)
        case Forall(x, ty, body) | Exists(x, ty, body):
            (x2,), s2, ren = _open((x,), body.free_vars, s, None)
            return type(t)(x2, ty, subst(body, {**ren, **s2}), span=t.span)
    raise TypeError(f"cannot substitute into {t!r}")


def rename(t, old: str, new: str):
    return subst(t, {old: Var(new)})


def plug(t, holes: Mapping[str, Comp]):
    """Replace computation holes, renaming binders that would capture."""
    if not holes:
        return t
    avoid = _range_fv_any(holes.values())

    def go(t):
        match t:
            case Hole(name):
                return holes.get(name, t)
            case Var() | Unit() | BoolLit():
                return t
            case Fun(x, body):
                x, body = _guard(x, body, avoid)
                return Fun(x, go(body), span=t.span)
            case Handler(x, ret, clauses, ev):
                x, ret = _guard(x, ret, avoid)
                return Handler(x, go(ret), tuple(go(c) for c in clauses), ev, span=t.span)
            case Clause(op, x, k, body):
                x, body = _guard(x, body, avoid)
                k, body = _guard(k, body, avoid)
                return Clause(op, x, k, go(body), span=t.span)
            case If(v, c1, c2):
                return If(go(v), go(c1), go(c2), span=t.span)
            case App(f, a):
                return App(go(f), go(a), span=t.span)
            case Return(v):
                return Return(go(v), span=t.span)
            case Op(op, v, y, body):
                y, body = _guard(y, body, avoid)
                return Op(op, go(v), y, go(body), span=t.span)
            case Do(x, c1, c2):
                x, c2 = _guard(x, c2, avoid)
                return Do(x, go(c1), go(c2), span=t.span)
            case With(h, c):
                return With(go(h), go(c), span=t.span)
            case ValueEq(a, b, ty):
                return ValueEq(go(a), go(b), ty, span=t.span)
            case CompEq(a, b, ty):
                return CompEq(go(a), go(b), ty, span=t.span)
            case Truth() | Falsity():
                return t
            case And(a, b) | Or(a, b) | Implies(a, b):
                return type(t)(go(a), go(b), span=t.span)
            case Forall(x, ty, body) | Exists(x, ty, body):
                x, body = _guard(x, body, avoid)
                return type(t)(x, ty, go(body), span=t.span)
        raise TypeError(f"cannot plug into {t!r}")

    return go(t)


def _range_fv_any(terms) -> frozenset[str]:
    out: frozenset[str] = frozenset()
    for c in terms:
        out |= c.free_vars
    return out


def _guard(binder: str, body, avoid: frozenset[str]):
    if binder in avoid:
        new = fresh(binder, avoid | body.free_vars)
        return new, rename(body, binder, new)
    return binder, body


def holes(t) -> frozenset[str]:
    """Names of holes occurring in a term or formula."""
    found: set[str] = set()

    def go(t):
        if isinstance(t, Hole):
            found.add(t.name)
            return
        for f in getattr(t, "__dataclass_fields__", {}):
            child = getattr(t, f)
            if isinstance(child, Syntax):
                go(child)
            elif isinstance(child, tuple):
                for c in child:
                    if isinstance(c, Syntax):
                        go(c)

    go(t)
    return frozenset(found)


# --------------------------------------------------------------------------
# Template instantiation


class UnboundTemplateVariable(KeyError):
    pass


def instantiate_template(t: Template, fns: Mapping[str, Value], vals: Mapping[str, Value] = {}) -> Comp:
    """``T[f_j/z_j][v_i/x_i]``: replace template variables by function values.

    Values are substituted into the template first so that free variables of
    ``fns`` are never captured by ``vals``.
    """
    avoid = _range_fv_any(fns.values())

    def go(t: Template) -> Comp:
        match t:
            case TApp(z, v):
                if z not in fns:
                    raise UnboundTemplateVariable(z)
                return App(fns[z], v)
            case TIf(v, t1, t2):
                return If(v, go(t1), go(t2))
            case TOp(op, v, y, body):
                y, body = _guard(y, body, avoid)
                return Op(op, v, y, go(body))
        raise TypeError(f"not a template: {t!r}")

    return go(subst(t, vals))


def template_to_comp_vars(t: Template) -> frozenset[str]:
    return t.template_vars
