"""Set-based denotational semantics over free-model operation trees.

A computation denotes a finite tree whose leaves are semantic values and whose
inner nodes are operation calls with one child per element of the operation's
(finite) result type.  Handlers denote lifts of their clause interpretation.

Terms are denoted without consulting their types; function values become
closures.  The type is used only at the boundary (``denote_comp`` and
``denote_value``) to tabulate closures over enumerable domains so that results
can be compared structurally.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Optional

from .syntax import (
    App,
    BoolLit,
    BoolT,
    Comp,
    CompT,
    Do,
    Fun,
    FunT,
    Handler,
    HandlerT,
    If,
    Op,
    Return,
    Signature,
    TApp,
    Template,
    TIf,
    TOp,
    Unit,
    UnitT,
    Value,
    ValueType,
    Var,
    With,
    UnboundTemplateVariable,
)


class OpaqueEquality(TypeError):
    """Raised when two intensional semantic values are compared."""


class NonGroundOpResult(ValueError):
    pass


class UncoveredOp(KeyError):
    pass


class EnvMismatch(KeyError):
    pass


class NotEnumerableError(ValueError):
    pass


class _NotEnumerable:
    def __repr__(self) -> str:
        return "NotEnumerable"

    def __bool__(self) -> bool:
        return False


NotEnumerable = _NotEnumerable()


# --------------------------------------------------------------------------
# Semantic values


class SemValue:
    pass


@dataclass(frozen=True)
class Star(SemValue):
    def __str__(self) -> str:
        return "⋆"


@dataclass(frozen=True)
class BoolAtom(SemValue):
    value: bool

    def __str__(self) -> str:
        return "tt" if self.value else "ff"


STAR = Star()
TT = BoolAtom(True)
FF = BoolAtom(False)


class _Hashed:
    """Frozen node with a hash computed once at construction."""

    __slots__ = ()

    def __hash__(self) -> int:
        return self._h


@dataclass(frozen=True, eq=False)
class Table(_Hashed, SemValue):
    """Extensional function over an enumerated domain."""

    domain: tuple[SemValue, ...]
    entries: tuple[Tree, ...]

    def __post_init__(self):
        if len(self.domain) != len(self.entries):
            raise ValueError("table domain and entries differ in length")
        object.__setattr__(self, "_h", hash(("table", self.domain, self.entries)))

    __hash__ = _Hashed.__hash__

    def __eq__(self, other):
        if self is other:
            return True
        if isinstance(other, (OpaqueFn, OpaqueHandler)):
            raise OpaqueEquality("cannot compare a table with an intensional function")
        return isinstance(other, Table) and self._h == other._h and self.domain == other.domain and self.entries == other.entries

    def __call__(self, a: SemValue) -> Tree:
        return self.entries[self.domain.index(a)]

    def __str__(self) -> str:
        return "λ{ " + ", ".join(f"{a} => {t}" for a, t in self._display()) + " }"

    def _display(self):
        return sorted(zip(self.domain, self.entries), key=lambda p: _display_key(p[0]))


class OpaqueFn(SemValue):
    """Intensional function value; equality is an error."""

    def __init__(self, fn: Callable[[SemValue], Tree], label: str = "fn"):
        self.fn = fn
        self.label = label

    def __call__(self, a: SemValue) -> Tree:
        return self.fn(a)

    def __eq__(self, other):
        if self is other:
            return True
        raise OpaqueEquality(f"cannot decide equality of intensional value {self.label}")

    def __hash__(self) -> int:
        return id(self)

    def __str__(self) -> str:
        return f"<{self.label}>"

    __repr__ = __str__


class OpaqueHandler(OpaqueFn):
    """Denotation of a handler: a function from trees to trees."""

    def __init__(self, fn: Callable[[Tree], Tree], label: str = "handler"):
        super().__init__(fn, label)


# --------------------------------------------------------------------------
# Trees


class Tree(_Hashed):
    __slots__ = ()


@dataclass(frozen=True, eq=False)
class Leaf(Tree):
    value: SemValue

    def __post_init__(self):
        object.__setattr__(self, "_h", hash(("leaf", self.value)))

    __hash__ = _Hashed.__hash__

    def __eq__(self, other):
        if self is other:
            return True
        return isinstance(other, Leaf) and self._h == other._h and self.value == other.value

    depth = 0

    @property
    def size(self) -> int:
        return 1

    def __str__(self) -> str:
        return f"return {self.value}"


@dataclass(frozen=True, eq=False)
class Node(Tree):
    """Operation node; ``children`` pairs each result value with its subtree,
    in the canonical enumeration order of the result type."""

    op: str
    arg: SemValue
    children: tuple[tuple[SemValue, Tree], ...]

    def __post_init__(self):
        object.__setattr__(self, "_h", hash(("node", self.op, self.arg, self.children)))
        object.__setattr__(self, "depth", 1 + max((t.depth for _, t in self.children), default=0))

    __hash__ = _Hashed.__hash__

    def __eq__(self, other):
        if self is other:
            return True
        return (
            isinstance(other, Node)
            and self._h == other._h
            and self.op == other.op
            and self.arg == other.arg
            and self.children == other.children
        )

    def child(self, b: SemValue) -> Tree:
        for key, t in self.children:
            if key == b:
                return t
        raise KeyError(b)

    @property
    def size(self) -> int:
        return 1 + sum(t.size for _, t in self.children)

    def __str__(self) -> str:
        kids = sorted(self.children, key=lambda p: _display_key(p[0]))
        if len(kids) == 1 and kids[0][0] == STAR:
            body = f"⋆ => {kids[0][1]}"
        else:
            body = ", ".join(f"{b} => {t}" for b, t in kids)
        return f"{self.op}({self.arg}){{ {body} }}"


def _display_key(v: SemValue):
    # tt is displayed before ff
    return (0,) if v == TT else (1,) if v == FF else (2,)


def node(op: str, arg: SemValue, children: Mapping[SemValue, Tree]) -> Node:
    return Node(op, arg, tuple(sorted(children.items(), key=lambda p: _order_key(p[0]))))


def _order_key(v: SemValue):
    # canonical storage order: ff before tt
    return (0,) if v == FF else (1,) if v == TT else (2,)


def show_tree(t: Tree) -> str:
    return str(t)


# --------------------------------------------------------------------------
# Ground enumeration


def enumerate_ground(a: ValueType):
    """``[⋆]`` for unit, ``[ff, tt]`` for bool, ``NotEnumerable`` otherwise."""
    match a:
        case UnitT():
            return [STAR]
        case BoolT():
            return [FF, TT]
    return NotEnumerable


def ground_values(a: ValueType) -> list[SemValue]:
    vals = enumerate_ground(a)
    if vals is NotEnumerable:
        raise NotEnumerableError(f"type {a} is not enumerable")
    return vals


def is_ground(a: ValueType) -> bool:
    return enumerate_ground(a) is not NotEnumerable


# --------------------------------------------------------------------------
# Interpretations and lifts


@dataclass(frozen=True)
class Interp:
    """Per-operation functions ``H_op(a, kappa)`` over some target set."""

    sig: Signature
    ops: Mapping[str, Callable[[SemValue, Callable[[SemValue], object]], object]]

    def __post_init__(self):
        if set(self.ops) != set(self.sig.names):
            raise ValueError(f"interpretation covers {sorted(self.ops)}, signature has {list(self.sig.names)}")

    def __call__(self, op: str, a: SemValue, kappa: Callable):
        fn = self.ops.get(op)
        if fn is None:
            raise UncoveredOp(op)
        return fn(a, kappa)


def free_interp(sig: Signature) -> Interp:
    fns = {}
    for op, _, b in sig:
        results = enumerate_ground(b)
        if results is NotEnumerable:
            raise NonGroundOpResult(op)
        fns[op] = _free_op(op, tuple(results))
    return Interp(sig, fns)


def _free_op(op: str, results: tuple[SemValue, ...]):
    def h(a, kappa):
        return Node(op, a, tuple((b, kappa(b)) for b in results))

    return h


def lift(h: Interp, f: Callable[[SemValue], object]) -> Callable[[Tree], object]:
    """The unique extension of ``f`` along ``h``: leaves by ``f``, nodes by ``h``."""

    def go(t: Tree):
        if isinstance(t, Leaf):
            return f(t.value)
        kids = t.children
        return h(t.op, t.arg, lambda b: go(_lookup(kids, b)))

    return go


def _lookup(kids, b):
    for key, t in kids:
        if key == b:
            return t
    raise KeyError(b)


def bind(t: Tree, f: Callable[[SemValue], Tree]) -> Tree:
    """Lift of ``f`` along the free interpretation of every operation in ``t``."""
    if isinstance(t, Leaf):
        return f(t.value)
    return Node(t.op, t.arg, tuple((b, bind(c, f)) for b, c in t.children))


def map_leaves(t: Tree, f: Callable[[SemValue], SemValue]) -> Tree:
    return bind(t, lambda v: Leaf(f(v)))


# --------------------------------------------------------------------------
# Denotations


class Closure(SemValue):
    """Function value produced by denoting ``fun x -> c`` in an environment."""

    def __init__(self, denoter: Denoter, param: str, body: Comp, env: Mapping[str, SemValue]):
        self.denoter = denoter
        self.param = param
        self.body = body
        self.env = env

    def __call__(self, a: SemValue) -> Tree:
        return self.denoter.comp(self.body, {**self.env, self.param: a})

    def __eq__(self, other):
        if self is other:
            return True
        raise OpaqueEquality("cannot compare untabulated function values")

    def __hash__(self) -> int:
        return id(self)

    def __str__(self) -> str:
        return "<closure>"


class Denoter:
    """Denotes terms given the types of all operations that may occur."""

    def __init__(self, ops: Signature):
        self.ops = ops
        self._results: dict[str, tuple[SemValue, ...]] = {}

    def results(self, op: str) -> tuple[SemValue, ...]:
        r = self._results.get(op)
        if r is None:
            if op not in self.ops:
                raise UncoveredOp(op)
            vals = enumerate_ground(self.ops[op][1])
            if vals is NotEnumerable:
                raise NonGroundOpResult(op)
            r = self._results[op] = tuple(vals)
        return r

    def value(self, v: Value, env: Mapping[str, SemValue]) -> SemValue:
        match v:
            case Var(x):
                if x not in env:
                    raise EnvMismatch(x)
                return env[x]
            case Unit():
                return STAR
            case BoolLit(b):
                return TT if b else FF
            case Fun(x, body):
                return Closure(self, x, body, env)
            case Handler():
                return OpaqueHandler(self.handler(v, env))
        raise TypeError(f"not a value: {v!r}")

    def clauses(self, h: Handler, env: Mapping[str, SemValue]) -> Interp:
        fns = {}
        for c in h.clauses:
            fns[c.op] = self._clause(c, env)
        missing = [c.op for c in h.clauses if c.op not in self.ops]
        if missing:
            raise UncoveredOp(missing[0])
        return Interp(Signature(tuple((c.op, *self.ops[c.op]) for c in h.clauses)), fns)

    def _clause(self, c, env):
        def h(a, kappa):
            return self.comp(c.body, {**env, c.param: a, c.cont: OpaqueFn(kappa, "k")})

        return h

    def handler(self, h: Handler, env: Mapping[str, SemValue]) -> Callable[[Tree], Tree]:
        interp = self.clauses(h, env)
        return lift(interp, lambda a: self.comp(h.ret_body, {**env, h.ret_param: a}))

    def comp(self, c: Comp, env: Mapping[str, SemValue]) -> Tree:
        match c:
            case Return(v):
                return Leaf(self.value(v, env))
            case Op(op, v, y, body):
                a = self.value(v, env)
                return Node(op, a, tuple((b, self.comp(body, {**env, y: b})) for b in self.results(op)))
            case Do(x, c1, c2):
                return bind(self.comp(c1, env), lambda a: self.comp(c2, {**env, x: a}))
            case If(v, c1, c2):
                b = self.value(v, env)
                if b == TT:
                    return self.comp(c1, env)
                if b == FF:
                    return self.comp(c2, env)
                raise TypeError(f"condition denotes {b}, not a boolean")
            case App(f, v):
                fn = self.value(f, env)
                return fn(self.value(v, env))
            case With(h, body):
                hv = self.value(h, env)
                return hv(self.comp(body, env))
        raise TypeError(f"not a computation: {c!r}")


def reify(v: SemValue, a: ValueType) -> SemValue:
    """Tabulate function values over enumerable domains, recursively."""
    match a:
        case UnitT() | BoolT():
            return v
        case FunT(arg, res):
            if isinstance(v, Table):
                return v
            dom = enumerate_ground(arg)
            if dom is NotEnumerable:
                return OpaqueFn(lambda x: reify_tree(v(x), res.value), "fn")
            return Table(tuple(dom), tuple(reify_tree(v(x), res.value) for x in dom))
        case HandlerT():
            return v
    raise TypeError(f"not a value type: {a!r}")


def reify_tree(t: Tree, a: ValueType) -> Tree:
    if isinstance(a, (UnitT, BoolT)):
        return t
    return map_leaves(t, lambda v: reify(v, a))


def _denoter(ops) -> Denoter:
    if isinstance(ops, Denoter):
        return ops
    if not isinstance(ops, Signature):
        ops = Signature.of(ops)
    return Denoter(ops)


def _check_env(gamma, env) -> None:
    if gamma is None:
        return
    missing = [x for x in gamma if x not in env]
    if missing:
        raise EnvMismatch(f"environment lacks {missing}")


def denote_value(gamma, v: Value, a: ValueType, env: Mapping[str, SemValue], ops) -> SemValue:
    _check_env(gamma, env)
    return reify(_denoter(ops).value(v, env), a)


def denote_comp(gamma, c: Comp, ty: CompT, env: Mapping[str, SemValue], ops) -> Tree:
    """Tree denoted by ``c`` at ``ty``; ``ops`` types every operation that may occur."""
    _check_env(gamma, env)
    d = _denoter(ops)
    for op, _, b in ty.sig:
        if enumerate_ground(b) is NotEnumerable:
            raise NonGroundOpResult(op)
    return reify_tree(d.comp(c, env), ty.value)


def denote_clauses(gamma, h: Handler, sig: Signature, dst: CompT, env: Mapping[str, SemValue], ops) -> Interp:
    """Interpretation of ``sig`` over the trees of ``dst`` given by the clauses of ``h``."""
    _check_env(gamma, env)
    d = _denoter(ops)
    base = d.clauses(h, env)
    fns = {op: _reified(base.ops[op], dst.value) for op in sig.names}
    return Interp(sig, fns)


def _reified(fn, a):
    return lambda x, kappa: reify_tree(fn(x, kappa), a)


def hsem_template(t: Template, h: Interp, env: Mapping[str, SemValue], zeta: Mapping[str, Callable], ops=None):
    """Interpret a template with ``h`` for operations and ``zeta`` for template variables."""
    d = _denoter(ops if ops is not None else h.sig)

    def go(t, env):
        match t:
            case TApp(z, v):
                if z not in zeta:
                    raise UnboundTemplateVariable(z)
                return zeta[z](d.value(v, env))
            case TIf(v, t1, t2):
                return go(t1, env) if d.value(v, env) == TT else go(t2, env)
            case TOp(op, v, y, body):
                return h(op, d.value(v, env), lambda b: go(body, {**env, y: b}))
        raise TypeError(f"not a template: {t!r}")

    return go(t, env)


# --------------------------------------------------------------------------
# Enumerating trees and reading them back as terms


def enumerate_trees(sig: Signature, leaves: Iterable[SemValue], depth: int) -> list[Tree]:
    """All trees of depth at most ``depth`` over ``sig`` with the given leaves, by depth."""
    leaves = list(leaves)
    by_depth: list[list[Tree]] = [[Leaf(v) for v in leaves]]
    upto: list[Tree] = list(by_depth[0])
    for d in range(1, depth + 1):
        layer: list[Tree] = []
        for op, a, b in sig:
            args = ground_values(a)
            results = ground_values(b)
            for arg in args:
                for kids in itertools.product(upto, repeat=len(results)):
                    if max(k.depth for k in kids) != d - 1:
                        continue
                    layer.append(Node(op, arg, tuple(zip(results, kids))))
        by_depth.append(layer)
        upto = upto + layer
    return upto


def count_trees(sig: Signature, n_leaves: int, depth: int) -> int:
    """Number of trees of depth at most ``depth``, without building them."""
    total = n_leaves
    for _ in range(depth):
        nxt = n_leaves
        for op, a, b in sig:
            nxt += len(ground_values(a)) * total ** len(ground_values(b))
        total = nxt
    return total


def semvalue_to_term(v: SemValue, a: Optional[ValueType] = None) -> Value:
    match v:
        case Star():
            return Unit()
        case BoolAtom(b):
            return BoolLit(b)
        case Table(domain, entries):
            x = "x"
            res_ty = a.result.value if isinstance(a, FunT) else None
            if len(domain) == 1:
                return Fun("_", tree_to_term(entries[0], res_ty))
            cases = dict(zip(domain, entries))
            return Fun(x, If(Var(x), tree_to_term(cases[TT], res_ty), tree_to_term(cases[FF], res_ty)))
    raise OpaqueEquality(f"cannot read back {v}")


def tree_to_term(t: Tree, a: Optional[ValueType] = None) -> Comp:
    """A computation whose denotation is ``t`` (for ground trees)."""
    if isinstance(t, Leaf):
        return Return(semvalue_to_term(t.value, a))
    arg = semvalue_to_term(t.arg)
    kids = dict(t.children)
    if len(kids) == 1:
        (only,) = kids.values()
        return Op(t.op, arg, "_", tree_to_term(only, a))
    return Op(t.op, arg, "y", If(Var("y"), tree_to_term(kids[TT], a), tree_to_term(kids[FF], a)))


def semvalue_of(v: Value) -> SemValue:
    """Denotation of a closed ground value literal."""
    match v:
        case Unit():
            return STAR
        case BoolLit(b):
            return TT if b else FF
    raise TypeError(f"not a ground literal: {v}")
