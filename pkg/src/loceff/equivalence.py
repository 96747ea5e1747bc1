"""Executable equivalence of trees modulo a theory.

Two engines realize the closure relation on free-model trees:

* ``tree_equiv`` searches for a rewrite path between two trees, applying
  equation instances at every position in both directions.  A ``Related``
  verdict carries a replayable witness.
* ``tree_oracle`` enumerates every tree up to a depth and computes the
  congruence closure of all equation instances inside that universe.  It is a
  sound under-approximation, so a negative answer is reported as "not related
  within bound" rather than as a disproof.
"""

from __future__ import annotations

import functools
import itertools
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union

from scipy.cluster.hierarchy import DisjointSet

from .freemodel import (
    FF,
    STAR,
    TT,
    Leaf,
    Node,
    NotEnumerable,
    OpaqueEquality,
    SemValue,
    Tree,
    count_trees,
    enumerate_ground,
    enumerate_trees,
    free_interp,
    hsem_template,
)
from .syntax import (
    BoolLit,
    BoolT,
    Equation,
    FunT,
    HandlerT,
    Signature,
    TApp,
    Template,
    Theory,
    TIf,
    TOp,
    Unit,
    UnitT,
    ValueType,
    Var,
)

log = logging.getLogger(__name__)

DEFAULT_STEP_BOUND = 10_000
DEFAULT_SIZE_FACTOR = 4
DEFAULT_UNIVERSE_CAP = 100_000


class NonGroundTemplateCtx(ValueError):
    pass


class UniverseTooLarge(ValueError):
    def __init__(self, size: int, cap: int):
        self.size = size
        self.cap = cap
        super().__init__(f"universe of {size} trees exceeds cap {cap}")


class OutsideUniverse(KeyError):
    pass


# --------------------------------------------------------------------------
# Context enumeration and template matching

Zeta = dict[str, dict[SemValue, Tree]]


def context_assignments(ctx: Sequence[tuple[str, ValueType]]) -> list[dict[str, SemValue]]:
    """All assignments of ground values to a value context."""
    domains = []
    for x, a in ctx:
        vals = enumerate_ground(a)
        if vals is NotEnumerable:
            raise NonGroundTemplateCtx(f"context variable {x} : {a} is not enumerable")
        domains.append([(x, v) for v in vals])
    return [dict(combo) for combo in itertools.product(*domains)]


def _ground_value(v, env):
    match v:
        case Var(x):
            return env[x]
        case Unit():
            return STAR
        case BoolLit(b):
            return TT if b else FF
    raise NonGroundTemplateCtx(f"template argument {v} is not a ground value")


def _match(t: Template, tree: Tree, env: dict, zeta: Zeta) -> Optional[Zeta]:
    match t:
        case TApp(z, v):
            a = _ground_value(v, env)
            bound = zeta.get(z, {})
            if a in bound:
                return zeta if bound[a] == tree else None
            return {**zeta, z: {**bound, a: tree}}
        case TIf(v, t1, t2):
            return _match(t1 if _ground_value(v, env) == TT else t2, tree, env, zeta)
        case TOp(op, v, y, body):
            if not isinstance(tree, Node) or tree.op != op or tree.arg != _ground_value(v, env):
                return None
            for b, child in tree.children:
                zeta = _match(body, child, {**env, y: b}, zeta)
                if zeta is None:
                    return None
            return zeta
    raise TypeError(f"not a template: {t!r}")


@dataclass(frozen=True)
class Match:
    env: tuple[tuple[str, SemValue], ...]
    zeta: Mapping[str, Mapping[SemValue, Tree]]
    position: tuple[int, ...] = ()


def match_template(
    t: Template,
    tree: Tree,
    sig: Optional[Signature] = None,
    env: Optional[Mapping[str, SemValue]] = None,
    value_ctx: Sequence[tuple[str, ValueType]] = (),
) -> list[Match]:
    """All ways ``tree`` is the free-interpretation denotation of ``t``.

    With ``env`` given only that assignment is tried; otherwise every ground
    assignment of ``value_ctx``.
    """
    envs = [dict(env)] if env is not None else context_assignments(value_ctx)
    out = []
    for e in envs:
        zeta = _match(t, tree, e, {})
        if zeta is not None:
            out.append(Match(tuple(sorted(e.items(), key=lambda p: p[0])), zeta))
    return out


def _demands(t: Template, env: dict, results: Mapping[str, Sequence[SemValue]]) -> set[tuple[str, SemValue]]:
    match t:
        case TApp(z, v):
            return {(z, _ground_value(v, env))}
        case TIf(v, t1, t2):
            return _demands(t1 if _ground_value(v, env) == TT else t2, env, results)
        case TOp(op, v, y, body):
            out: set = set()
            for b in results[op]:
                out |= _demands(body, {**env, y: b}, results)
            return out
    raise TypeError(t)


def instantiate_tree(t: Template, env: Mapping[str, SemValue], zeta: Mapping[str, Mapping[SemValue, Tree]], sig: Signature) -> Tree:
    """Free-interpretation denotation of ``t``; ``zeta`` given as tables."""
    fns = {z: (lambda a, tab=tab: tab[a]) for z, tab in zeta.items()}
    return hsem_template(t, _free(sig), dict(env), fns, sig)


@functools.lru_cache(maxsize=64)
def _free(sig: Signature):
    return free_interp(sig)


# --------------------------------------------------------------------------
# Rewrite rules


@dataclass(frozen=True)
class RewriteRule:
    label: str
    direction: str  # "lr" or "rl"
    equation: Equation
    source: Template
    target: Template
    balanced: bool

    @property
    def key(self) -> tuple[str, str]:
        return (self.label, self.direction)

    def __str__(self) -> str:
        arrow = "->" if self.direction == "lr" else "<-"
        return f"{self.label}{arrow}"


_warned: set[tuple[str, str]] = set()


def compile_rules(theory: Theory, sig: Signature) -> list[RewriteRule]:
    """Both directions of every equation; unbalanced directions are disabled."""
    results = {}
    for op, _, b in sig:
        vals = enumerate_ground(b)
        if vals is NotEnumerable:
            raise NonGroundTemplateCtx(f"operation {op} has non-enumerable result type")
        results[op] = vals
    for _, a in (entry for eq in theory for entry in eq.template_ctx):
        if enumerate_ground(a) is NotEnumerable:
            raise NonGroundTemplateCtx(f"template variable argument type {a} is not enumerable")
    rules = []
    for eq in theory:
        envs = context_assignments(eq.value_ctx)
        for direction, src, dst in (("lr", eq.lhs, eq.rhs), ("rl", eq.rhs, eq.lhs)):
            balanced = all(_demands(dst, e, results) <= _demands(src, e, results) for e in envs)
            if not balanced and (eq.name, direction) not in _warned:
                _warned.add((eq.name, direction))
                log.warning("equation %s is unbalanced in direction %s; direction disabled for rewriting", eq.name, direction)
            rules.append(RewriteRule(eq.name, direction, eq, src, dst, balanced))
    return sorted(rules, key=lambda r: r.key)


@dataclass(frozen=True)
class RewriteStep:
    label: str
    direction: str
    position: tuple[int, ...]
    env: tuple[tuple[str, SemValue], ...]
    before: Tree
    after: Tree

    def reversed(self) -> RewriteStep:
        flip = "rl" if self.direction == "lr" else "lr"
        return RewriteStep(self.label, flip, self.position, self.env, self.after, self.before)

    def __str__(self) -> str:
        arrow = "->" if self.direction == "lr" else "<-"
        pos = ".".join(map(str, self.position)) or "root"
        env = ", ".join(f"{x}={v}" for x, v in self.env)
        return f"{self.label} {arrow} at {pos}" + (f" [{env}]" if env else "")


def subtree(t: Tree, pos: tuple[int, ...]) -> Tree:
    for i in pos:
        t = t.children[i][1]
    return t


def replace_at(t: Tree, pos: tuple[int, ...], new: Tree) -> Tree:
    if not pos:
        return new
    i, rest = pos[0], pos[1:]
    kids = list(t.children)
    b, child = kids[i]
    kids[i] = (b, replace_at(child, rest, new))
    return Node(t.op, t.arg, tuple(kids))


def positions(t: Tree, prefix: tuple[int, ...] = ()) -> Iterator[tuple[tuple[int, ...], Tree]]:
    yield prefix, t
    if isinstance(t, Node):
        for i, (_, child) in enumerate(t.children):
            yield from positions(child, prefix + (i,))


def rewrites(t: Tree, rules: Sequence[RewriteRule], sig: Signature) -> Iterator[RewriteStep]:
    """Every single-step rewrite of ``t``, ordered by rule label, direction, position."""
    spots = list(positions(t))
    for rule in rules:
        if not rule.balanced:
            continue
        envs = context_assignments(rule.equation.value_ctx)
        for pos, sub in spots:
            for env in envs:
                zeta = _match(rule.source, sub, env, {})
                if zeta is None:
                    continue
                new = instantiate_tree(rule.target, env, zeta, sig)
                if new == sub:
                    continue
                yield RewriteStep(
                    rule.label, rule.direction, pos, tuple(sorted(env.items(), key=lambda p: p[0])), t, replace_at(t, pos, new)
                )


def check_step(step: RewriteStep, theory: Theory) -> bool:
    """Whether ``step`` is an instance of a theory equation at its position."""
    eq = theory.by_label(step.label)
    if eq is None:
        return False
    a, b = subtree(step.before, step.position), subtree(step.after, step.position)
    src, dst = (eq.lhs, eq.rhs) if step.direction == "lr" else (eq.rhs, eq.lhs)
    env = dict(step.env)
    z1 = _match(src, a, env, {})
    if z1 is None:
        return False
    z2 = _match(dst, b, env, z1)
    if z2 is None:
        return False
    outside = positions_differ(step.before, step.after, step.position)
    return not outside


def positions_differ(t1: Tree, t2: Tree, pos: tuple[int, ...]) -> bool:
    """True when ``t1`` and ``t2`` differ somewhere outside the subtree at ``pos``."""
    if not pos:
        return False
    if not (isinstance(t1, Node) and isinstance(t2, Node)):
        return True
    if t1.op != t2.op or t1.arg != t2.arg or len(t1.children) != len(t2.children):
        return True
    i = pos[0]
    for j, ((b1, c1), (b2, c2)) in enumerate(zip(t1.children, t2.children)):
        if b1 != b2:
            return True
        if j == i:
            if positions_differ(c1, c2, pos[1:]):
                return True
        elif c1 != c2:
            return True
    return False


def replay(path: Sequence[RewriteStep], start: Tree, theory: Theory) -> Tree:
    """Re-check a witness path; returns its final tree."""
    t = start
    for step in path:
        if step.before != t or not check_step(step, theory):
            raise ValueError(f"invalid rewrite step {step}")
        t = step.after
    return t


# --------------------------------------------------------------------------
# Verdicts


@dataclass(frozen=True)
class Related:
    path: tuple[RewriteStep, ...] = ()
    probe_relative: bool = False

    @property
    def depth(self) -> int:
        if not self.path:
            return 0
        return max(max(s.before.depth, s.after.depth) for s in self.path)

    def __str__(self) -> str:
        return "related" + (" (relative to probes)" if self.probe_relative else "")


@dataclass(frozen=True)
class RefutedWithinBound:
    bound: object
    detail: str = ""

    def __str__(self) -> str:
        return f"not related within bound {self.bound}"


@dataclass(frozen=True)
class UnknownWithinBound:
    bound: object
    detail: str = ""

    def __str__(self) -> str:
        return f"unknown within bound {self.bound}"


EquivVerdict = Union[Related, RefutedWithinBound, UnknownWithinBound]


# --------------------------------------------------------------------------
# Search


def tree_equiv(
    t1: Tree,
    t2: Tree,
    theory: Theory,
    sig: Signature,
    step_bound: int = DEFAULT_STEP_BOUND,
    size_bound: Optional[int] = None,
    oracle_leaves: Optional[Sequence[SemValue]] = None,
    universe_cap: int = DEFAULT_UNIVERSE_CAP,
) -> EquivVerdict:
    """Bidirectional breadth-first search for a rewrite path from ``t1`` to ``t2``."""
    if step_bound <= 0:
        raise ValueError("step bound must be positive")
    if size_bound is None:
        size_bound = DEFAULT_SIZE_FACTOR * max(t1.size, t2.size)
    if size_bound <= 0:
        raise ValueError("size bound must be positive")
    if t1 == t2:
        return Related(())
    rules = compile_rules(theory, sig)
    # parents[side][tree] = (previous tree, step) ; side 0 grows from t1, side 1 from t2
    parents: list[dict[Tree, Optional[tuple[Tree, RewriteStep]]]] = [{t1: None}, {t2: None}]
    frontiers = [deque([t1]), deque([t2])]
    expanded = 0
    while frontiers[0] or frontiers[1]:
        side = 0 if (frontiers[0] and (len(frontiers[0]) <= len(frontiers[1]) or not frontiers[1])) else 1
        layer = list(frontiers[side])
        frontiers[side].clear()
        for t in layer:
            expanded += 1
            if expanded > step_bound:
                return _fallback(t1, t2, theory, sig, step_bound, size_bound, oracle_leaves, universe_cap)
            for step in rewrites(t, rules, sig):
                nxt = step.after
                if nxt.size > size_bound or nxt in parents[side]:
                    continue
                parents[side][nxt] = (t, step)
                if nxt in parents[1 - side]:
                    return Related(_join(parents, nxt, side))
                frontiers[side].append(nxt)
    return _fallback(t1, t2, theory, sig, step_bound, size_bound, oracle_leaves, universe_cap)


def _trace(parents: dict, t: Tree) -> list[RewriteStep]:
    steps = []
    while parents[t] is not None:
        prev, step = parents[t]
        steps.append(step)
        t = prev
    steps.reverse()
    return steps


def _join(parents, meet: Tree, side: int) -> tuple[RewriteStep, ...]:
    fwd = _trace(parents[0], meet)
    bwd = _trace(parents[1], meet)
    return tuple(fwd + [s.reversed() for s in reversed(bwd)])


def _leaves_of(t: Tree) -> set:
    if isinstance(t, Leaf):
        return {t.value}
    out = set()
    for _, c in t.children:
        out |= _leaves_of(c)
    return out


def _fallback(t1, t2, theory, sig, step_bound, size_bound, leaves, cap) -> EquivVerdict:
    bound = {"steps": step_bound, "size": size_bound}
    depth = max(t1.depth, t2.depth)
    try:
        leaves = list(leaves) if leaves is not None else sorted(_leaves_of(t1) | _leaves_of(t2), key=_leaf_key)
        oracle = tree_oracle(theory, sig, depth, leaves, cap)
        if not oracle.related(t1, t2):
            return RefutedWithinBound({**bound, "oracle_depth": depth}, "search exhausted; oracle keeps the trees apart")
        return UnknownWithinBound(bound, "oracle relates the trees but search found no path")
    except (UniverseTooLarge, NonGroundTemplateCtx, OutsideUniverse, OpaqueEquality, TypeError) as e:
        return UnknownWithinBound(bound, f"search exhausted; oracle unavailable: {e}")


def _leaf_key(v: SemValue):
    return (0,) if v == FF else (1,) if v == TT else (2, str(v))


# --------------------------------------------------------------------------
# Oracle


@dataclass
class TreeOracle:
    theory: Theory
    sig: Signature
    depth: int
    leaves: tuple[SemValue, ...]
    universe: list[Tree]
    index: dict[Tree, int]
    classes: DisjointSet = field(repr=False)
    instances: int = 0

    @property
    def size(self) -> int:
        return len(self.universe)

    def __contains__(self, t: Tree) -> bool:
        return t in self.index

    def _idx(self, t: Tree) -> int:
        i = self.index.get(t)
        if i is None:
            raise OutsideUniverse(f"tree outside the depth-{self.depth} universe: {t}")
        return i

    def related(self, t1: Tree, t2: Tree) -> bool:
        return self.classes.connected(self._idx(t1), self._idx(t2))

    def query(self, t1: Tree, t2: Tree) -> str:
        return "related" if self.related(t1, t2) else "notRelatedWithinBound"

    def representative(self, t: Tree) -> int:
        return self.classes[self._idx(t)]

    def partition(self) -> list[list[Tree]]:
        groups = [sorted((self.universe[i] for i in s), key=lambda t: (t.depth, t.size, str(t))) for s in self.classes.subsets()]
        return sorted(groups, key=lambda g: (g[0].depth, g[0].size, str(g[0])))


def universe_size(sig: Signature, n_leaves: int, depth: int) -> int:
    return count_trees(sig, n_leaves, depth)


def tree_oracle(
    theory: Theory,
    sig: Signature,
    depth: int,
    leaves: Optional[Iterable[SemValue]] = None,
    cap: int = DEFAULT_UNIVERSE_CAP,
) -> TreeOracle:
    """Congruence closure of all equation instances among trees of bounded depth."""
    leaves = tuple(leaves) if leaves is not None else (FF, TT)
    estimate = count_trees(sig, len(leaves), depth)
    if estimate > cap:
        raise UniverseTooLarge(estimate, cap)
    universe = enumerate_trees(sig, leaves, depth)
    index = {t: i for i, t in enumerate(universe)}
    ds = DisjointSet(range(len(universe)))
    by_depth = [[t for t in universe if t.depth <= d] for d in range(depth + 1)]
    n_instances = 0
    for eq in theory:
        zdepth = _template_var_depths(eq)
        for env in context_assignments(eq.value_ctx):
            for zeta in _zeta_tables(eq, zdepth, by_depth, depth):
                try:
                    a = instantiate_tree(eq.lhs, env, zeta, sig)
                    b = instantiate_tree(eq.rhs, env, zeta, sig)
                except KeyError:
                    continue
                ia, ib = index.get(a), index.get(b)
                if ia is not None and ib is not None:
                    n_instances += 1
                    ds.merge(ia, ib)
    _congruence(universe, ds)
    return TreeOracle(theory, sig, depth, leaves, universe, index, ds, n_instances)


def _congruence(universe: list[Tree], ds: DisjointSet) -> None:
    nodes = [(i, t) for i, t in enumerate(universe) if isinstance(t, Node)]
    child_idx = {}
    index = {t: i for i, t in enumerate(universe)}
    for i, t in nodes:
        child_idx[i] = tuple(index[c] for _, c in t.children)
    while True:
        seen: dict = {}
        merged = False
        for i, t in nodes:
            key = (t.op, t.arg, tuple(ds[c] for c in child_idx[i]))
            j = seen.setdefault(key, i)
            if j != i and not ds.connected(i, j):
                ds.merge(i, j)
                merged = True
        if not merged:
            return


def _template_var_depths(eq: Equation) -> dict[str, int]:
    depths: dict[str, int] = {z: 0 for z, _ in eq.template_ctx}

    def go(t, d):
        match t:
            case TApp(z, _):
                depths[z] = max(depths.get(z, 0), d)
            case TIf(_, t1, t2):
                go(t1, d)
                go(t2, d)
            case TOp(_, _, _, body):
                go(body, d + 1)

    go(eq.lhs, 0)
    go(eq.rhs, 0)
    return depths


def _zeta_tables(eq: Equation, zdepth: dict[str, int], by_depth: list[list[Tree]], depth: int):
    per_z = []
    for z, a in eq.template_ctx:
        dom = enumerate_ground(a)
        if dom is NotEnumerable:
            raise NonGroundTemplateCtx(f"template variable {z} has non-enumerable argument type {a}")
        d = depth - zdepth[z]
        if d < 0:
            return
        pool = by_depth[d]
        per_z.append([(z, dict(zip(dom, entries))) for entries in itertools.product(pool, repeat=len(dom))])
    for combo in itertools.product(*per_z):
        yield dict(combo)


# --------------------------------------------------------------------------
# Value relations


def rel_value(
    a: ValueType,
    x: SemValue,
    y: SemValue,
    probes: Optional[Mapping] = None,
    step_bound: int = DEFAULT_STEP_BOUND,
    size_bound: Optional[int] = None,
    sig: Optional[Signature] = None,
) -> EquivVerdict:
    """Relation on semantic values: identity at ground types, pointwise at functions."""
    match a:
        case UnitT() | BoolT():
            return Related(()) if x == y else RefutedWithinBound("ground", f"{x} differs from {y}")
        case FunT(arg, res):
            dom = enumerate_ground(arg)
            relative = dom is NotEnumerable
            if relative:
                dom = list((probes or {}).get(arg, []))
                if not dom:
                    return UnknownWithinBound("probes", f"no probes for argument type {arg}")
            path: list = []
            unknown = None
            for v in dom:
                r = tree_equiv(x(v), y(v), res.theory, res.sig, step_bound, size_bound)
                if isinstance(r, RefutedWithinBound):
                    return RefutedWithinBound(r.bound, f"at argument {v}: {r.detail}")
                if isinstance(r, UnknownWithinBound):
                    unknown = r
                else:
                    path.extend(r.path)
            if unknown is not None:
                return unknown
            return Related(tuple(path), probe_relative=relative)
        case HandlerT(src, dst):
            dom = list((probes or {}).get(src, []))
            if not dom:
                return UnknownWithinBound("probes", "no probe trees for handler argument")
            for t in dom:
                r = tree_equiv(x(t), y(t), dst.theory, dst.sig, step_bound, size_bound)
                if not isinstance(r, Related):
                    return r
            return Related((), probe_relative=True)
    raise TypeError(f"not a value type: {a!r}")
