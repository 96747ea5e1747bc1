"""Seeded, type-directed generation of well-typed terms, templates and handlers.

Terms range over a fixed desk-scale pool of operations.  Every generated
computation checks at its ascribed type with an empty theory, so the free
respects oracle accepts every handler literal.  Function variables arise only
as handler continuations and are always applied.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

from .syntax import (
    BOOL,
    EMPTY_THEORY,
    UNIT,
    App,
    BoolLit,
    Clause,
    Comp,
    CompT,
    Do,
    Fun,
    FunT,
    Handler,
    If,
    Op,
    Return,
    Signature,
    TApp,
    Template,
    Theory,
    TIf,
    TOp,
    Unit,
    Value,
    ValueType,
    Var,
    With,
)

POOL = Signature.of({"choose": (UNIT, BOOL), "tick": (UNIT, UNIT)})
GROUND = (UNIT, BOOL)


@dataclass(frozen=True)
class Generated:
    term: Comp
    type: CompT


class TermGenerator:
    """Random closed computations of ground result type.

    ``size`` is a budget of syntax nodes; with budget 1 only returns and
    single operation calls are produced.
    """

    def __init__(self, seed: int, pool: Signature = POOL, theory: Theory = EMPTY_THEORY):
        self.rng = random.Random(seed)
        self.pool = pool
        # every computation type of a generated term carries this theory
        self.theory = theory
        self.counter = 0

    def fresh(self, base: str) -> str:
        self.counter += 1
        return f"{base}{self.counter}"

    def sig(self, allow_empty: bool = True) -> Signature:
        names = [op for op in self.pool.names if self.rng.random() < 0.6]
        if not names and not allow_empty:
            names = [self.rng.choice(self.pool.names)]
        return self.pool.restrict(names)

    def ground(self) -> ValueType:
        return self.rng.choice(GROUND)

    # -- values ------------------------------------------------------------

    def atom(self, ctx: dict, a: ValueType) -> Value:
        vars_ = [x for x, t in ctx.items() if t == a]
        if vars_ and self.rng.random() < 0.5:
            return Var(self.rng.choice(sorted(vars_)))
        if a == UNIT:
            return Unit()
        if a == BOOL:
            return BoolLit(self.rng.random() < 0.5)
        raise ValueError(f"no atom of type {a}")

    # -- computations ----------------------------------------------------------

    def comp(self, ctx: dict, a: ValueType, sig: Signature, size: int) -> Comp:
        rng = self.rng
        ks = [x for x, t in ctx.items() if isinstance(t, FunT) and t.result == CompT(a, sig, self.theory)]
        if size <= 1:
            if ks and rng.random() < 0.5:
                k = rng.choice(sorted(ks))
                return App(Var(k), self.atom(ctx, ctx[k].arg))
            if sig and rng.random() < 0.4:
                op = rng.choice(sig.names)
                pa, pb = sig[op]
                y = self.fresh("y")
                return Op(op, self.atom(ctx, pa), y, Return(self.atom({**ctx, y: pb}, a)))
            return Return(self.atom(ctx, a))
        kinds = ["return", "if", "do", "apply", "with"]
        weights = [1, 3, 3, 3, 3]
        if sig:
            kinds.append("op")
            weights.append(3)
        if ks:
            kinds.append("cont")
            weights.append(4)
        kind = rng.choices(kinds, weights)[0]
        n = size - 1
        match kind:
            case "return":
                return Return(self.atom(ctx, a))
            case "op":
                op = rng.choice(sig.names)
                pa, pb = sig[op]
                y = self.fresh("y")
                return Op(op, self.atom(ctx, pa), y, self.comp({**ctx, y: pb}, a, sig, n))
            case "if":
                l, r = self.split(n)
                return If(self.atom(ctx, BOOL), self.comp(ctx, a, sig, l), self.comp(ctx, a, sig, r))
            case "do":
                l, r = self.split(n)
                b = self.ground()
                x = self.fresh("x")
                return Do(x, self.comp(ctx, b, sig, l), self.comp({**ctx, x: b}, a, sig, r))
            case "apply":
                b = self.ground()
                x = self.fresh("x")
                return App(Fun(x, self.comp({**ctx, x: b}, a, sig, n)), self.atom(ctx, b))
            case "cont":
                k = rng.choice(sorted(ks))
                return App(Var(k), self.atom(ctx, ctx[k].arg))
            case "with":
                return self.with_handler(ctx, a, sig, n)
        raise AssertionError(kind)

    def split(self, n: int) -> tuple[int, int]:
        if n <= 1:
            return 1, 1
        l = self.rng.randint(1, n - 1)
        return l, n - l

    def with_handler(self, ctx: dict, a: ValueType, sig: Signature, n: int) -> Comp:
        inner = self.sig(allow_empty=False)
        b = self.ground()
        l, r = self.split(n)
        body = self.comp(ctx, b, inner, l)
        h = self.handler(ctx, inner, b, CompT(a, sig, self.theory), r)
        return With(h, body)

    def handler(self, ctx: dict, src_sig: Signature, src_value: ValueType, dst: CompT, size: int) -> Handler:
        parts = len(src_sig) + 1
        share = max(1, size // parts)
        x = self.fresh("x")
        ret = self.comp({**ctx, x: src_value}, dst.value, dst.sig, share)
        clauses = []
        for op, pa, pb in src_sig:
            p, k = self.fresh("p"), self.fresh("k")
            body = self.comp({**ctx, p: pa, k: FunT(pb, dst)}, dst.value, dst.sig, share)
            clauses.append(Clause(op, p, k, body))
        return Handler(x, ret, tuple(clauses))

    # -- top level -------------------------------------------------------------

    def term(self, size: int, sig: Optional[Signature] = None, value: Optional[ValueType] = None) -> Generated:
        sig = self.sig() if sig is None else sig
        a = self.ground() if value is None else value
        return Generated(self.comp({}, a, sig, size), CompT(a, sig, self.theory))


def generate_corpus(
    seed: int,
    count: int,
    size_budget: int,
    sig: Optional[Signature] = None,
    value: Optional[ValueType] = None,
) -> list[Generated]:
    """``count`` closed well-typed computations; deterministic in ``seed``."""
    g = TermGenerator(seed)
    out = []
    for _ in range(count):
        size = g.rng.randint(1, max(1, size_budget))
        out.append(g.term(size, sig, value))
    return out


# --------------------------------------------------------------------------
# Templates and clause sets


@dataclass(frozen=True)
class TemplateInstance:
    template: Template
    value_ctx: tuple[tuple[str, ValueType], ...]
    template_ctx: tuple[tuple[str, ValueType], ...]


class TemplateGenerator:
    def __init__(self, seed: int, sig: Signature):
        self.rng = random.Random(seed)
        self.sig = sig
        self.counter = 0

    def template(self, size: int, n_vars: int = 2, n_vals: int = 1) -> TemplateInstance:
        rng = self.rng
        zctx = tuple((f"z{i + 1}", rng.choice(GROUND)) for i in range(n_vars))
        vctx = tuple((f"x{i + 1}", rng.choice(GROUND)) for i in range(n_vals))
        t = self._go(dict(vctx), zctx, size)
        return TemplateInstance(t, vctx, zctx)

    def _atom(self, ctx: dict, a: ValueType) -> Value:
        vars_ = [x for x, t in ctx.items() if t == a]
        if vars_ and self.rng.random() < 0.6:
            return Var(self.rng.choice(sorted(vars_)))
        return Unit() if a == UNIT else BoolLit(self.rng.random() < 0.5)

    def _go(self, ctx: dict, zctx, size: int) -> Template:
        rng = self.rng
        if size <= 1 or rng.random() < 0.2:
            z, b = rng.choice(zctx)
            return TApp(z, self._atom(ctx, b))
        if self.sig and rng.random() < 0.65:
            op = rng.choice(self.sig.names)
            a, b = self.sig[op]
            self.counter += 1
            y = f"y{self.counter}"
            return TOp(op, self._atom(ctx, a), y, self._go({**ctx, y: b}, zctx, size - 1))
        n = size - 1
        l = max(1, n // 2)
        return TIf(self._atom(ctx, BOOL), self._go(ctx, zctx, l), self._go(ctx, zctx, max(1, n - l)))


def generate_handler(seed: int, src_sig: Signature, src_value: ValueType, dst: CompT, size: int) -> Handler:
    """A random handler literal of type ``src_value!src_sig/∅ => dst``."""
    return TermGenerator(seed, theory=dst.theory).handler({}, src_sig, src_value, dst, size)


def constructor_names(t) -> set[str]:
    """Names of syntax constructors occurring in ``t``."""
    out: set[str] = set()

    def go(t):
        match t:
            case BoolLit(True):
                out.add("true")
            case BoolLit(False):
                out.add("false")
            case _:
                out.add(type(t).__name__)
        for f in getattr(t, "__dataclass_fields__", {}):
            c = getattr(t, f)
            if isinstance(c, (Value, Comp, Clause)):
                go(c)
            elif isinstance(c, tuple):
                for x in c:
                    if isinstance(x, (Value, Comp, Clause)):
                        go(x)

    go(t)
    out.discard("Clause")
    return out


CONSTRUCTORS = ("Var", "Unit", "true", "false", "Fun", "Handler", "If", "App", "Return", "Op", "Do", "With")
