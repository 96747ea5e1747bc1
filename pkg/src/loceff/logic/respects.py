"""The respects judgement: evidence that operation clauses respect a theory.

Evidence is either a chain of per-equation proofs, checked in the equational or
predicate logic against the obligation produced by ``thandle``, or a request
for the bounded semantic check (``auto``), which compares handled templates in
the free model over enumerated probe continuations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Optional, Union

from ..equivalence import RefutedWithinBound, Related, tree_equiv
from ..freemodel import (
    FF,
    TT,
    NotEnumerable,
    Table,
    Tree,
    UncoveredOp,
    denote_clauses,
    enumerate_ground,
    enumerate_trees,
    hsem_template,
    semvalue_to_term,
    show_tree,
    tree_to_term,
)
from ..syntax import (
    App,
    Auto,
    ByName,
    CompEq,
    CompT,
    Equation,
    Fun,
    FunT,
    Handler,
    If,
    Signature,
    Span,
    TApp,
    Template,
    Theory,
    TIf,
    TOp,
    Value,
    ValueType,
    Var,
    fresh,
    subst,
)
from ..typecheck import Checker, No, TypeCheckError, Unknown, Verdict, Yes
from .proof import Proof, ProofChecker, ProofError

LOGICS = ("empty", "free", "eq", "pred")
DEFAULT_INSTANCE_CAP = 200_000


def thandle(h: Handler, t: Template, fns: Mapping[str, Value]) -> object:
    """Handle the operations of a template syntactically with the clauses of ``h``."""
    avoid = frozenset().union(*(f.free_vars for f in fns.values())) if fns else frozenset()

    def go(t: Template):
        match t:
            case TApp(z, v):
                if z not in fns:
                    raise KeyError(f"no function for template variable {z}")
                return App(fns[z], v)
            case TIf(v, t1, t2):
                return If(v, go(t1), go(t2))
            case TOp(op, v, y, body):
                clause = h.clause(op)
                if clause is None:
                    raise UncoveredOp(f"handler has no clause for {op}")
                if y in avoid:
                    y2 = fresh(y, avoid | body.free_vars)
                    body, y = subst(body, {y: Var(y2)}), y2
                k = Fun(y, go(body))
                return subst(clause.body, {clause.param: v, clause.cont: k})
        raise TypeError(f"not a template: {t!r}")

    return go(t)


# --------------------------------------------------------------------------
# Evidence


@dataclass(frozen=True)
class EquationProof:
    """Proof that the clauses respect one equation.

    ``fn_names`` names the functions standing for the template variables, in
    the order of the equation's template context; by default ``z`` becomes
    ``f`` and ``z1`` becomes ``f1``.
    """

    label: str
    proof: Proof
    fn_names: Optional[tuple[str, ...]] = None
    span: Optional[Span] = field(default=None, compare=False)


@dataclass(frozen=True)
class ProofEvidence:
    """A chain of equation proofs extending the empty-theory base case."""

    name: str
    equations: tuple[EquationProof, ...] = ()
    span: Optional[Span] = field(default=None, compare=False)

    def by_label(self, label: str) -> Optional[EquationProof]:
        for e in self.equations:
            if e.label == label:
                return e
        return None


Evidence = Union[ProofEvidence, Auto, None]


def default_fn_name(z: str) -> str:
    if z.startswith("z"):
        return "f" + z[1:]
    return "f_" + z


@dataclass(frozen=True)
class Obligation:
    label: str
    ctx: dict
    goal: CompEq
    fns: dict


def obligation(h: Handler, eq: Equation, dst: CompT, gamma: Mapping[str, ValueType], fn_names=None) -> Obligation:
    """``Γ, x_i:A_i, f_j:B_j→D ⊢ thandle(T1)[f/z] ≡_D thandle(T2)[f/z]``."""
    ctx = dict(gamma)
    vals: dict[str, Value] = {}
    for x, a in eq.value_ctx:
        name = x if x not in ctx else fresh(x, set(ctx) | {y for y, _ in eq.value_ctx})
        if name != x:
            vals[x] = Var(name)
        ctx[name] = a
    zs = [z for z, _ in eq.template_ctx]
    names = list(fn_names) if fn_names is not None else [default_fn_name(z) for z in zs]
    if len(names) != len(zs):
        raise ProofError(f"equation {eq.name} has {len(zs)} template variables, evidence names {len(names)}")
    fns: dict[str, Value] = {}
    for (z, b), f in zip(eq.template_ctx, names):
        if f in ctx:
            raise ProofError(f"function name {f} clashes with a variable in scope")
        ctx[f] = FunT(b, dst)
        fns[z] = Var(f)
    lhs = thandle(h, subst(eq.lhs, vals) if vals else eq.lhs, fns)
    rhs = thandle(h, subst(eq.rhs, vals) if vals else eq.rhs, fns)
    return Obligation(eq.name, ctx, CompEq(lhs, rhs, dst), fns)


# --------------------------------------------------------------------------
# Bounded semantic check


@dataclass(frozen=True)
class AutoCounterexample:
    label: str
    values: tuple[tuple[str, object], ...]
    fns: tuple[tuple[str, Table], ...]
    lhs: Tree
    rhs: Tree
    detail: str = ""

    def describe(self, fn_types: Mapping[str, ValueType] = {}) -> str:
        parts = [f"{x} = {v}" for x, v in self.values]
        for z, t in self.fns:
            parts.append(f"{z} = {_lambda(t, fn_types.get(z))}")
        inst = ", ".join(parts)
        return (
            f"equation {self.label} at {inst}: "
            f"left side denotes {show_tree(self.lhs)}, right side denotes {show_tree(self.rhs)}"
        )

    def __str__(self) -> str:
        return self.describe()


def _lambda(t: Table, a: Optional[ValueType]) -> str:
    v = semvalue_to_term(t, a)
    if isinstance(v, Fun) and v.param == "_":
        return f"λ_. {tree_to_term(t.entries[0])}"
    return str(v)


def _probe_order(values):
    """Enumeration order for probes: ``tt`` before ``ff``."""
    return sorted(values, key=lambda v: 0 if v == TT else 1 if v == FF else 2)


def auto_respects(
    h: Handler,
    theory: Theory,
    sig: Signature,
    dst: CompT,
    gamma: Mapping[str, ValueType] = {},
    depth: int = 2,
    steps: int = 10_000,
    ops: Optional[Signature] = None,
    cap: int = DEFAULT_INSTANCE_CAP,
) -> Verdict:
    """Compare both sides of every equation on enumerated instances."""
    ops = ops if ops is not None else sig
    leaves = enumerate_ground(dst.value)
    if leaves is NotEnumerable:
        return Unknown(f"result type {dst.value} is not enumerable")
    for _, a, b in dst.sig:
        if enumerate_ground(a) is NotEnumerable or enumerate_ground(b) is NotEnumerable:
            return Unknown(f"result signature {dst.sig} is not ground")
    probes = enumerate_trees(dst.sig, _probe_order(leaves), depth)
    free = sorted(x for x in h.free_vars if x in gamma)
    envs = _ground_assignments([(x, gamma[x]) for x in free])
    if envs is None:
        return Unknown("handler mentions variables of non-ground type")
    checked = 0
    unknown: Optional[str] = None
    for eq in theory:
        vctx = _ground_assignments(eq.value_ctx)
        if vctx is None:
            return Unknown(f"equation {eq.name} has a non-ground value context")
        tables = []
        for z, b in eq.template_ctx:
            dom = enumerate_ground(b)
            if dom is NotEnumerable:
                return Unknown(f"template variable {z} ranges over a non-ground domain")
            dom = tuple(_probe_order(dom))
            tables.append([Table(dom, entries) for entries in itertools.product(probes, repeat=len(dom))])
        total = len(envs) * len(vctx)
        for ts in tables:
            total *= len(ts)
        if checked + total > cap:
            return Unknown(f"more than {cap} instances")
        zs = [z for z, _ in eq.template_ctx]
        for env in envs:
            H = denote_clauses(None, h, sig, dst, env, ops)
            for vals in vctx:
                for choice in itertools.product(*tables):
                    checked += 1
                    zeta = dict(zip(zs, choice))
                    t1 = hsem_template(eq.lhs, H, {**env, **vals}, zeta, ops)
                    t2 = hsem_template(eq.rhs, H, {**env, **vals}, zeta, ops)
                    if t1 == t2:
                        continue
                    cex = AutoCounterexample(eq.name, tuple(vals.items()), tuple(zip(zs, choice)), t1, t2)
                    if not dst.theory:
                        return No(cex, cex.describe() + " (distinct trees, empty theory)")
                    v = tree_equiv(t1, t2, dst.theory, dst.sig, step_bound=steps)
                    if isinstance(v, Related):
                        continue
                    if isinstance(v, RefutedWithinBound):
                        return No(cex, cex.describe() + f" ({v.detail})")
                    unknown = unknown or f"{cex.describe()}: {v.detail}"
    if unknown:
        return Unknown(unknown)
    return Yes(f"all {checked} probe instances related (depth {depth})")


def _ground_assignments(ctx) -> Optional[list[dict]]:
    names, doms = [], []
    for x, a in ctx:
        d = enumerate_ground(a)
        if d is NotEnumerable:
            return None
        names.append(x)
        doms.append(_probe_order(d))
    return [dict(zip(names, vs)) for vs in itertools.product(*doms)]


# --------------------------------------------------------------------------
# The judgement


def check_respects(
    h: Handler,
    theory: Theory,
    sig: Signature,
    dst: CompT,
    evidence: Evidence,
    logic: str = "pred",
    checker: Optional[Checker] = None,
    gamma: Mapping[str, ValueType] = {},
    theorems: Optional[Mapping] = None,
) -> Verdict:
    """Decide ``h : E ⊨ Σ ⇛ D`` with the given evidence in the given logic."""
    if logic not in LOGICS:
        raise ValueError(f"unknown logic {logic!r}; expected one of {LOGICS}")
    checker = checker or Checker(sig)
    if logic == "empty":
        return Unknown("the empty logic proves nothing")
    if not theory:
        return Yes("empty theory")
    if logic == "free":
        return Unknown("the free logic only respects the empty theory")
    if isinstance(evidence, Auto):
        return auto_respects(h, theory, sig, dst, gamma, evidence.depth, evidence.steps, checker.ops)
    if evidence is None:
        return Unknown("no evidence given")
    labels = {e.label for e in theory}
    given = [e.label for e in evidence.equations]
    dup = sorted({l for l in given if given.count(l) > 1})
    if dup:
        raise ProofError(f"evidence {evidence.name} proves {dup} more than once", evidence.span)
    extra = sorted(set(given) - labels)
    if extra:
        raise ProofError(f"evidence {evidence.name} proves {extra}, which are not in theory {theory}", evidence.span)
    missing = sorted(labels - set(given))
    if missing:
        return Unknown(f"evidence {evidence.name} has no proof for {missing}")
    pc = ProofChecker(checker, logic, theorems)
    for eq in theory:
        ep = evidence.by_label(eq.label)
        ob = obligation(h, eq, dst, gamma, ep.fn_names)
        pc.check(ob.ctx, {}, ep.proof, ob.goal)
    return Yes(f"proofs for {', '.join(sorted(labels))} checked")


class LogicOracle:
    """Respects oracle that resolves ``by NAME`` evidence against proof scripts."""

    def __init__(self, evidence: Mapping[str, ProofEvidence] = {}, logic: str = "pred", theorems=None):
        self.evidence = dict(evidence)
        self.logic = logic
        self.theorems = dict(theorems or {})

    def respects(self, checker: Checker, gamma, handler: Handler, src: CompT, dst: CompT) -> Verdict:
        ev: Evidence
        match handler.evidence:
            case ByName(name):
                if name not in self.evidence:
                    return Unknown(f"no evidence named {name}")
                ev = self.evidence[name]
            case Auto() as a:
                ev = a
            case _:
                ev = None
        try:
            return check_respects(handler, src.theory, src.sig, dst, ev, self.logic, checker, gamma, self.theorems)
        except (ProofError, TypeCheckError) as e:
            return Unknown(f"{e.code}: {e}")
