"""Property suites over generated terms and the shipped corpus.

Each suite returns a ``Report``; a suite passes when it has no failures.  The
suites are deterministic in the configured seed.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

from .config import Config
from .equivalence import (
    Related,
    UniverseTooLarge,
    compile_rules,
    rewrites,
    tree_equiv,
    tree_oracle,
    universe_size,
)
from .freemodel import (
    FF,
    TT,
    Denoter,
    Leaf,
    Table,
    Tree,
    bind,
    denote_clauses,
    denote_comp,
    enumerate_trees,
    free_interp,
    ground_values,
    hsem_template,
    lift,
    reify_tree,
    semvalue_of,
    semvalue_to_term,
)
from .generate import POOL, TemplateGenerator, generate_corpus, generate_handler
from .interpreter import Stepped, Stuck, ValueResult, run, size, step
from .logic.proof import Have, walk
from .logic.respects import AutoCounterexample, auto_respects, check_respects, obligation, thandle
from .syntax import (
    BOOL,
    EMPTY_THEORY,
    UNIT,
    BoolLit,
    ByName,
    CompEq,
    CompT,
    Forall,
    FunT,
    Handler,
    HandlerT,
    Signature,
    Theory,
)
from .typecheck import Checker, No, TypeCheckError, Yes

CHOOSE = Signature.of({"choose": (UNIT, BOOL)})

# shipped proof files that no program imports, keyed by the program they prove facts about
STANDALONE_PROOFS = {"nondet.lae": ("nondet_facts.laeproof",)}


def merge_sigs(*sigs: Signature) -> Signature:
    ops: dict = {}
    for sig in sigs:
        for op, a, b in sig:
            ops[op] = (a, b)
    return Signature.of(ops)


@dataclass
class Report:
    name: str
    checked: int = 0
    failures: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures

    def fail(self, msg: str) -> None:
        self.failures.append(msg)

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        extra = f"; {len(self.failures)} failures" if self.failures else ""
        return f"{status} {self.name}: {self.checked} checked in {self.seconds:.2f}s{extra}"

    def record(self) -> dict:
        return {
            "suite": self.name,
            "ok": self.ok,
            "checked": self.checked,
            "failures": self.failures[:20],
            "notes": self.notes,
            "seconds": round(self.seconds, 3),
        }


def _timed(fn: Callable[..., Report]) -> Callable[..., Report]:
    def wrapper(*args, **kwargs) -> Report:
        t0 = time.perf_counter()
        r = fn(*args, **kwargs)
        r.seconds = time.perf_counter() - t0
        return r

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


# --------------------------------------------------------------------------
# Operational suites


@_timed
def safety(cfg: Config = Config(), corpus=None) -> Report:
    """Progress, preservation and termination along every reduction sequence."""
    rep = Report("safety")
    corpus = corpus if corpus is not None else generate_corpus(cfg.seed, cfg.corpus_count, cfg.size_budget)
    checker = Checker(POOL)
    for i, g in enumerate(corpus):
        rep.checked += 1
        c = g.term
        fuel = 10 * size(c) ** 2
        try:
            checker.check_comp({}, c, g.type)
        except TypeCheckError as e:
            rep.fail(f"term {i} is ill-typed before any step: {e}")
            continue
        for n in itertools.count():
            if n > fuel:
                rep.fail(f"term {i} did not terminate within fuel {fuel}")
                break
            r = step(c)
            if isinstance(r, Stuck):
                rep.fail(f"term {i} stuck after {n} steps: {r.reason}")
                break
            if not isinstance(r, Stepped):
                break
            c = r.next
            try:
                checker.check_comp({}, c, g.type)
            except TypeCheckError as e:
                rep.fail(f"term {i} lost its type after {n + 1} steps ({r.rule}): {e}")
                break
    return rep


@_timed
def denotation_invariance(cfg: Config = Config(), corpus=None) -> Report:
    """The denotation of a term is unchanged by every reduction step."""
    rep = Report("denotation invariance")
    corpus = corpus if corpus is not None else generate_corpus(cfg.seed, cfg.corpus_count, cfg.size_budget)
    for i, g in enumerate(corpus):
        c = g.term
        before = denote_comp(None, c, g.type, {}, POOL)
        while True:
            r = step(c)
            if not isinstance(r, Stepped):
                break
            rep.checked += 1
            after = denote_comp(None, r.next, g.type, {}, POOL)
            if after != before:
                rep.fail(f"term {i}: step {r.rule} changed {before} into {after}")
                break
            c = r.next
    return rep


@_timed
def adequacy(cfg: Config = Config(), corpus=None) -> Report:
    """Closed boolean computations denote a leaf iff they evaluate to that boolean."""
    rep = Report("adequacy")
    if corpus is None:
        corpus = generate_corpus(cfg.seed + 1, cfg.adequacy_count, cfg.size_budget, Signature(()), BOOL)
    for i, g in enumerate(corpus):
        rep.checked += 1
        tree = denote_comp(None, g.term, g.type, {}, POOL)
        res = run(g.term, fuel=10 * size(g.term) ** 2).result
        ran = semvalue_of(res.value) if isinstance(res, ValueResult) and isinstance(res.value, BoolLit) else None
        denoted = tree.value if isinstance(tree, Leaf) else None
        if denoted is None or ran is None or denoted != ran:
            rep.fail(f"term {i}: denotes {tree}, evaluates to {res}")
    return rep


# --------------------------------------------------------------------------
# Semantic suites


def _random_table(rng: random.Random, dom: list, trees: list[Tree]) -> Table:
    return Table(tuple(dom), tuple(rng.choice(trees) for _ in dom))


@_timed
def lift_square(cfg: Config = Config(), count: Optional[int] = None) -> Report:
    """Lifting commutes with template interpretation.

    For a template ``T``, clauses ``H`` and return clause ``f``, lifting the
    free interpretation of ``T`` equals interpreting ``T`` with ``H`` over the
    lifted template functions.
    """
    rep = Report("lift square")
    count = count if count is not None else cfg.square_count
    rng = random.Random(cfg.seed + 2)
    tg = TemplateGenerator(cfg.seed + 3, CHOOSE)
    free = free_interp(CHOOSE)
    d = Denoter(POOL)
    for i in range(count):
        inst = tg.template(rng.randint(1, 5), n_vars=rng.randint(1, 2), n_vals=rng.randint(0, 1))
        src_value = rng.choice((UNIT, BOOL))
        dst = CompT(rng.choice((UNIT, BOOL)), POOL.restrict(rng.sample(POOL.names, rng.randint(0, 2))), EMPTY_THEORY)
        h = generate_handler(cfg.seed * 1000 + i, CHOOSE, src_value, dst, rng.randint(2, 6))
        H = denote_clauses(None, h, CHOOSE, dst, {}, POOL)
        f = lambda v, h=h: reify_tree(d.comp(h.ret_body, {h.ret_param: v}), dst.value)
        phi = lift(H, f)
        src_trees = enumerate_trees(CHOOSE, ground_values(src_value), 1)
        env = {x: rng.choice(ground_values(a)) for x, a in inst.value_ctx}
        zeta = {z: _random_table(rng, ground_values(b), src_trees) for z, b in inst.template_ctx}
        left = phi(hsem_template(inst.template, free, env, zeta, POOL))
        right = hsem_template(inst.template, H, env, {z: (lambda a, t=t: phi(t(a))) for z, t in zeta.items()}, POOL)
        rep.checked += 1
        if left != right:
            rep.fail(f"instance {i}: template {inst.template} with handler {h}: {left} vs {right}")
    return rep


def _oracle_cache(cfg: Config):
    cache: dict = {}

    def get(theory: Theory, sig: Signature, depth: int, leaves: tuple):
        key = (theory, sig, depth, leaves)
        if key not in cache:
            cache[key] = tree_oracle(theory, sig, depth, leaves, cfg.universe_cap)
        return cache[key]

    return get


def _related_pairs(oracle, max_depth: int) -> list[tuple[Tree, Tree]]:
    small = [t for t in oracle.universe if t.depth <= max_depth]
    return [(a, b) for a in small for b in small if oracle.related(a, b)]


@_timed
def lift_preserves_relation(cfg: Config = Config(), theory: Optional[Theory] = None, samples: int = 40) -> Report:
    """Lifts of related tables along the free interpretation send related trees to related trees.

    Trees and table entries are split so that every result stays inside the
    universe of the configured oracle depth.
    """
    from .loader import load

    theory = theory if theory is not None else load("nondet.lae").program.theory("idem")
    rep = Report(f"lift preserves relation {theory}")
    depth = cfg.oracle_depth
    leaves = (FF, TT)
    n = universe_size(CHOOSE, len(leaves), depth)
    if n > cfg.universe_cap:
        rep.fail(f"universe at depth {depth} has {n} trees, above cap {cfg.universe_cap}")
        return rep
    oracle = tree_oracle(theory, CHOOSE, depth, leaves, cfg.universe_cap)
    rep.notes.append(f"universe size {oracle.size} at depth {depth}")
    rng = random.Random(cfg.seed + 4)
    for tree_depth in range(1, depth):
        entry_depth = depth - tree_depth
        entries = [t for t in oracle.universe if t.depth <= entry_depth]
        by_class: dict[int, list[Tree]] = {}
        for e in entries:
            by_class.setdefault(oracle.representative(e), []).append(e)
        for t1, t2 in _related_pairs(oracle, tree_depth):
            for _ in range(samples):
                g1, g2 = [], []
                for _ in leaves:
                    e = rng.choice(entries)
                    g1.append(e)
                    g2.append(rng.choice(by_class[oracle.representative(e)]))
                G1, G2 = Table(leaves, tuple(g1)), Table(leaves, tuple(g2))
                a, b = bind(t1, G1), bind(t2, G2)
                rep.checked += 1
                if not oracle.related(a, b):
                    rep.fail(f"{t1} ~ {t2} and {G1} ~ {G2} but lifts {a} and {b} are apart")
    return rep


def instance_check(h: Handler, theory: Theory, sig: Signature, dst: CompT, oracle_for, gamma_envs=({},), probe_depth: int = 2):
    """Both sides of every equation, interpreted by the clauses, are oracle-related.

    Returns ``(checked, failures, skipped)``; instances whose trees fall outside
    the capped universe are skipped and counted.
    """
    checked, failures, skipped = 0, [], 0
    leaves = tuple(ground_values(dst.value))
    probes = enumerate_trees(dst.sig, sorted(leaves, key=lambda v: 0 if v == TT else 1), probe_depth)
    for env in gamma_envs:
        H = denote_clauses(None, h, sig, dst, env, merge_sigs(POOL, sig, dst.sig))
        for eq in theory:
            zs = [(z, ground_values(b)) for z, b in eq.template_ctx]
            tables = [[Table(tuple(dom), es) for es in itertools.product(probes, repeat=len(dom))] for _, dom in zs]
            for vals in _assignments(eq.value_ctx):
                for choice in itertools.product(*tables):
                    zeta = {z: t for (z, _), t in zip(zs, choice)}
                    ops = merge_sigs(POOL, sig, dst.sig)
                    t1 = hsem_template(eq.lhs, H, {**env, **vals}, zeta, ops)
                    t2 = hsem_template(eq.rhs, H, {**env, **vals}, zeta, ops)
                    if t1 == t2:
                        checked += 1
                        continue
                    d = max(t1.depth, t2.depth)
                    try:
                        oracle = oracle_for(dst.theory, dst.sig, d, leaves)
                    except UniverseTooLarge:
                        skipped += 1
                        continue
                    checked += 1
                    if not oracle.related(t1, t2):
                        failures.append(f"equation {eq.name} at {vals} {zeta}: {t1} vs {t2}")
    return checked, failures, skipped


def _assignments(ctx) -> list[dict]:
    names = [x for x, _ in ctx]
    doms = [ground_values(a) for _, a in ctx]
    return [dict(zip(names, vs)) for vs in itertools.product(*doms)]


@_timed
def accepted_handlers_instances(cfg: Config = Config(), label: str = "idem", generated: int = 30) -> Report:
    """Handlers accepted for a theory pass the semantic instance check.

    Covers the corpus handlers accepted by their proof scripts and generated
    handlers accepted by the bounded check.
    """
    from .loader import load

    rep = Report(f"accepted handlers respect {{{label}}}")
    oracle_for = _oracle_cache(cfg)
    nondet = load("nondet.lae").program
    theory = nondet.theory(label)
    for fname, hname in (("pickleft.lae", "pickLeft"), ("yieldall.lae", "yieldAll"), ("collect.lae", "collectToList")):
        loaded = load(fname)
        let = loaded.program.lets[hname]
        ht = let.type
        if not isinstance(ht, HandlerT) or not set(theory.labels) <= set(ht.src.theory.labels):
            continue
        h = loaded.program.closed(let.term)
        verdict = check_respects(h, ht.src.theory, ht.src.sig, ht.dst, loaded.evidence[h.evidence.name], "pred", loaded.checker(), {}, loaded.closed_theorems())
        if not isinstance(verdict, Yes):
            rep.fail(f"{hname} is not accepted: {verdict}")
            continue
        checked, fails, skipped = instance_check(h, theory, ht.src.sig, ht.dst, oracle_for)
        rep.checked += checked
        rep.failures += [f"{hname}: {f}" for f in fails]
        rep.notes.append(f"{hname}: {checked} instances, {skipped} outside the universe")
    dst = CompT(BOOL, CHOOSE, theory)
    accepted = 0
    for i in range(generated):
        h = generate_handler(cfg.seed * 7919 + i, CHOOSE, BOOL, dst, 3)
        try:
            v = auto_respects(h, theory, CHOOSE, dst, {}, 2, cfg.step_bound, POOL)
        except Exception as e:  # noqa: BLE001 - recorded as a failure
            rep.fail(f"generated handler {i}: bounded check raised {e!r}")
            continue
        if not isinstance(v, Yes):
            continue
        accepted += 1
        checked, fails, skipped = instance_check(h, theory, CHOOSE, dst, oracle_for)
        rep.checked += checked
        rep.failures += [f"generated handler {h}: {f}" for f in fails]
    rep.notes.append(f"{accepted} of {generated} generated handlers accepted")
    sizes = sorted({universe_size(CHOOSE, 2, d) for d in range(cfg.oracle_depth + 1)})
    rep.notes.append(f"universe sizes up to depth {cfg.oracle_depth}: {sizes}")
    return rep


# --------------------------------------------------------------------------
# Equivalence and logic suites


def shipped_theories() -> list[tuple[str, Theory, Signature]]:
    from .loader import load

    nondet = load("nondet.lae").program
    yields = load("yieldall.lae").program
    gens = load("generators.lae").program
    out = [(n, nondet.theory(n), CHOOSE) for n in ("comm", "idem", "assoc")]
    out.append(("nondet", nondet.theory("nondet"), CHOOSE))
    out.append(("generator", yields.theory("generator"), yields.signature.restrict(["yield"])))
    out.append(("exhaustion", gens.theory("exhaustion"), gens.signature.restrict(["next"])))
    return out


@_timed
def search_oracle_coherence(cfg: Config = Config(), walks: int = 40, walk_len: int = 3) -> Report:
    """Every path found by the search is confirmed by the bounded oracle.

    The oracle runs at the witness depth plus two, lowered to the deepest
    universe under the cap when that is too large.
    """
    rep = Report("search/oracle coherence")
    oracle_for = _oracle_cache(cfg)
    rng = random.Random(cfg.seed + 5)
    lowered = 0
    for name, theory, sig in shipped_theories():
        leaves = (FF, TT)
        starts = enumerate_trees(sig, leaves, 2)
        rules = compile_rules(theory, sig)
        for _ in range(walks):
            t = rng.choice(starts)
            u = t
            for _ in range(rng.randint(1, walk_len)):
                steps = [s for s in rewrites(u, rules, sig) if s.after.depth <= 3]
                if not steps:
                    break
                u = rng.choice(steps).after
            # unrelated pairs exhaust the search, so random pairs get a smaller bound
            if rng.random() < 0.3:
                other, bound = rng.choice(starts), min(cfg.step_bound, 300)
            else:
                other, bound = u, cfg.step_bound
            v = tree_equiv(t, other, theory, sig, step_bound=bound)
            if not isinstance(v, Related):
                continue
            want = v.depth + 2
            depth = want
            while depth > max(v.depth, t.depth, other.depth) and universe_size(sig, len(leaves), depth) > cfg.universe_cap:
                depth -= 1
            if depth < want:
                lowered += 1
            try:
                oracle = oracle_for(theory, sig, depth, leaves)
            except UniverseTooLarge as e:
                rep.notes.append(f"{name}: skipped a pair, {e}")
                continue
            rep.checked += 1
            if not oracle.related(t, other):
                rep.fail(f"{name}: search relates {t} and {other}, oracle at depth {depth} does not")
    rep.notes.append(f"oracle depth lowered below witness depth + 2 for {lowered} pairs")
    return rep


def _probe_values(a, dst_trees_for, depth: int):
    """Semantic values used to instantiate a variable of type ``a``."""
    if isinstance(a, FunT):
        dom = ground_values(a.arg)
        trees = dst_trees_for(a.result, depth)
        return [Table(tuple(dom), es) for es in itertools.product(trees, repeat=len(dom))]
    return ground_values(a)


def _strip_foralls(phi):
    ctx = []
    while isinstance(phi, Forall):
        ctx.append((phi.var, phi.type))
        phi = phi.body
    return ctx, phi


@_timed
def proof_corpus_soundness(cfg: Config = Config(), probe_depth: int = 1) -> Report:
    """Equations established by the shipped proofs hold on ground instances.

    Checks every respects obligation and every closed ``have`` equation in the
    shipped proof files: both sides, denoted under enumerated values and probe
    functions, are equal or related by the oracle of their type.
    """
    from .loader import Loaded, check_theorems, corpus_dir, load
    from .logic.script import read_proof_file

    rep = Report("proof corpus soundness")
    oracle_for = _oracle_cache(cfg)
    trees_cache: dict = {}

    def dst_trees(c: CompT, depth: int):
        key = (c.value, c.sig, depth)
        if key not in trees_cache:
            trees_cache[key] = enumerate_trees(c.sig, ground_values(c.value), depth)
        return trees_cache[key]

    def check_eq(where: str, ctx, eq: CompEq, ops: Signature) -> None:
        doms = [_probe_values(a, dst_trees, probe_depth) for _, a in ctx]
        names = [x for x, _ in ctx]
        ty = eq.type
        leaves = tuple(ground_values(ty.value))
        for vals in itertools.product(*doms):
            env = dict(zip(names, vals))
            t1 = denote_comp(None, eq.lhs, ty, env, ops)
            t2 = denote_comp(None, eq.rhs, ty, env, ops)
            if t1 == t2:
                rep.checked += 1
                continue
            try:
                oracle = oracle_for(ty.theory, ty.sig, max(t1.depth, t2.depth), leaves)
            except UniverseTooLarge as e:
                rep.notes.append(f"{where}: skipped an instance, {e}")
                continue
            rep.checked += 1
            if not oracle.related(t1, t2):
                rep.fail(f"{where}: {t1} and {t2} are apart")

    for path in sorted(corpus_dir().glob("*.lae")):
        loaded = load(path)
        prog = loaded.program
        ops = merge_sigs(POOL, prog.signature)
        for name, let in prog.lets.items():
            if not isinstance(let.type, HandlerT):
                continue
            h = prog.closed(let.term)
            if not isinstance(h, Handler) or not isinstance(h.evidence, ByName):
                continue
            ev = loaded.evidence.get(h.evidence.name)
            if ev is None:
                continue
            for ep in ev.equations:
                eq = prog.equations[ep.label]
                ob = obligation(h, eq, let.type.dst, {}, ep.fn_names)
                check_eq(f"{name} respects {ep.label}", list(ob.ctx.items()), ob.goal, ops)
                for node in walk(ep.proof):
                    if isinstance(node, Have) and not node.formula.free_vars:
                        ctx, body = _strip_foralls(node.formula)
                        if isinstance(body, CompEq):
                            check_eq(f"{name}/{ep.label}: have {node.name}", ctx, body, ops)
        theorems = dict(loaded.theorems)
        for proof_name in STANDALONE_PROOFS.get(path.name, ()):
            pf = read_proof_file((corpus_dir() / proof_name).read_text(encoding="utf-8"), prog, proof_name)
            theorems.update(pf.theorems)
            check_theorems(Loaded(prog, {}, pf.theorems), loaded.checker(), "pred")
        for name, th in theorems.items():
            ctx, body = _strip_foralls(th.formula)
            if isinstance(body, CompEq):
                check_eq(f"theorem {name}", list(th.ctx) + ctx, body, ops)
    return rep


@_timed
def thandle_coherence(cfg: Config = Config(), count: int = 100) -> Report:
    """Syntactic handling of a template denotes its semantic handling."""
    rep = Report("thandle/hsem coherence")
    rng = random.Random(cfg.seed + 6)
    tg = TemplateGenerator(cfg.seed + 7, CHOOSE)
    d = Denoter(POOL)
    for i in range(count):
        inst = tg.template(rng.randint(1, 4), n_vars=rng.randint(1, 2), n_vals=rng.randint(0, 1))
        dst = CompT(rng.choice((UNIT, BOOL)), POOL.restrict(rng.sample(POOL.names, rng.randint(0, 2))), EMPTY_THEORY)
        h = generate_handler(cfg.seed * 31 + i, CHOOSE, BOOL, dst, rng.randint(2, 5))
        trees = enumerate_trees(dst.sig, ground_values(dst.value), 1)
        tables = {z: _random_table(rng, ground_values(b), trees) for z, b in inst.template_ctx}
        fns = {z: semvalue_to_term(t, FunT(b, dst)) for (z, b), t in zip(inst.template_ctx, tables.values())}
        env = {x: rng.choice(ground_values(a)) for x, a in inst.value_ctx}
        syntactic = denote_comp(None, thandle(h, inst.template, fns), dst, env, POOL)
        H = denote_clauses(None, h, CHOOSE, dst, {}, POOL)
        semantic = hsem_template(inst.template, H, env, {z: d.value(f, {}) for z, f in fns.items()}, POOL)
        rep.checked += 1
        if syntactic != semantic:
            rep.fail(f"instance {i}: {inst.template} under {h}: {syntactic} vs {semantic}")
    return rep


@_timed
def replay_counterexamples(cfg: Config = Config(), generated: int = 40) -> Report:
    """Refutations of the bounded check replay to distinct, unrelated trees."""
    from .loader import load

    rep = Report("auto counterexample replay")
    nondet = load("nondet.lae").program
    cases = []
    pick = load("pickleft.lae")
    h = pick.program.closed(pick.program.term("pickLeft"))
    cases.append((h, nondet.theory("comm"), CompT(BOOL, Signature(()), EMPTY_THEORY)))
    for label in ("comm", "idem", "assoc"):
        dst = CompT(BOOL, POOL.restrict(["tick"]), EMPTY_THEORY)
        for i in range(generated // 3):
            cases.append((generate_handler(cfg.seed * 104729 + i, CHOOSE, BOOL, dst, 3), nondet.theory(label), dst))
    for h, theory, dst in cases:
        v = auto_respects(h, theory, CHOOSE, dst, {}, 2, cfg.step_bound, POOL)
        if not isinstance(v, No):
            continue
        cex: AutoCounterexample = v.counterexample
        eq = theory.by_label(cex.label)
        H = denote_clauses(None, h, CHOOSE, dst, {}, POOL)
        vals = dict(cex.values)
        t1 = hsem_template(eq.lhs, H, vals, dict(cex.fns), POOL)
        t2 = hsem_template(eq.rhs, H, vals, dict(cex.fns), POOL)
        rep.checked += 1
        if (t1, t2) != (cex.lhs, cex.rhs):
            rep.fail(f"replay of {cex} gives {t1} vs {t2}")
        elif t1 == t2:
            rep.fail(f"counterexample {cex} has equal sides")
        elif dst.theory:
            oracle = tree_oracle(dst.theory, dst.sig, max(t1.depth, t2.depth), tuple(ground_values(dst.value)), cfg.universe_cap)
            if oracle.related(t1, t2):
                rep.fail(f"counterexample {cex} is related by the oracle")
    return rep


# --------------------------------------------------------------------------


def all_suites(cfg: Config = Config()) -> list[Callable[[Config], Report]]:
    return [
        safety,
        denotation_invariance,
        adequacy,
        lift_square,
        lift_preserves_relation,
        lambda c: lift_preserves_relation(c, _theory("comm")),
        accepted_handlers_instances,
        lambda c: accepted_handlers_instances(c, "comm"),
        search_oracle_coherence,
        proof_corpus_soundness,
        thandle_coherence,
        replay_counterexamples,
    ]


def _theory(label: str) -> Theory:
    from .loader import load

    return load("nondet.lae").program.theory(label)


def run_all(cfg: Config = Config(), on_report: Optional[Callable[[Report], None]] = None) -> list[Report]:
    corpus = generate_corpus(cfg.seed, cfg.corpus_count, cfg.size_budget)
    out = []
    for suite in all_suites(cfg):
        if suite in (safety, denotation_invariance):
            r = suite(cfg, corpus)
        else:
            r = suite(cfg)
        out.append(r)
        if on_report:
            on_report(r)
    return out
