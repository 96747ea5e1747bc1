"""One test per acceptance criterion; each prints a PASS/FAIL line."""

from __future__ import annotations

import io
import time

import pytest

from loceff import properties as P
from loceff.cli import main
from loceff.config import Config
from loceff.equivalence import universe_size
from loceff.freemodel import TT, FF, Leaf
from loceff.loader import load
from loceff.logic.proof import Induction, Inherit, count_nodes, walk
from loceff.logic.respects import auto_respects, check_respects
from loceff.parser import parse_comp
from loceff.syntax import BOOL, CompT
from loceff.typecheck import No, TheoryMismatch, Yes

from conftest import CHOOSE

CFG = Config()


def report(n: int, name: str, ok: bool, detail: str = "") -> None:
    print(f"{'PASS' if ok else 'FAIL'} acceptance {n} {name}" + (f": {detail}" if detail else ""))
    assert ok, detail


def _handler(loaded, name):
    let = loaded.program.lets[name]
    return let.term, let.type


def test_pickleft_verified_by_scripts():
    t0 = time.perf_counter()
    loaded = load("pickleft.lae")
    h, ht = _handler(loaded, "pickLeft")
    assert {e.label for e in ht.src.theory} == {"idem", "assoc"}
    assert ht.dst == CompT(BOOL)
    ev = loaded.evidence["pickleft_proof"]
    v = check_respects(h, ht.src.theory, ht.src.sig, ht.dst, ev, checker=loaded.checker())
    loaded.check()
    dt = time.perf_counter() - t0
    rules = [getattr(p, "tag", None) for e in ev.equations for p in walk(e.proof)]
    ok = isinstance(v, Yes) and dt < 1.0 and "beta_apply" in rules and "beta_if_true" in rules
    report(1, "pickLeft respects idem and assoc", ok, f"{v}, {dt:.3f}s")


def test_pickleft_comm_counterexample():
    loaded = load("pickleft.lae")
    h, ht = _handler(loaded, "pickLeft")
    comm = loaded.program.theory("comm")
    v = auto_respects(h, comm, CHOOSE, ht.dst)
    cex = v.counterexample if isinstance(v, No) else None
    fns = dict(cex.fns) if cex else {}
    ok = (
        cex is not None
        and fns["z1"].entries == (Leaf(TT),)
        and fns["z2"].entries == (Leaf(FF),)
        and cex.lhs == Leaf(TT)
        and cex.rhs == Leaf(FF)
    )
    out, err = io.StringIO(), io.StringIO()
    code = main(["verify", "pickleft.lae", "--handler", "pickLeft", "--theory", "comm", "--auto"], out, err)
    text = out.getvalue()
    expected = (
        "counterexample: equation comm at z1 = λ_. return true, z2 = λ_. return false: "
        "left side denotes return tt, right side denotes return ff"
    )
    ok = ok and code == 1 and expected in text
    report(2, "pickLeft against comm refuted", ok, text.strip())


def test_yieldall_verified_by_induction():
    t0 = time.perf_counter()
    loaded = load("yieldall.lae")
    h, ht = _handler(loaded, "yieldAll")
    ev = loaded.evidence["yieldall_proof"]
    v = check_respects(h, ht.src.theory, ht.src.sig, ht.dst, ev, checker=loaded.checker())
    dt = time.perf_counter() - t0
    (ep,) = ev.equations
    inductions = count_nodes(ep.proof, Induction)
    inherits = [p.label for p in walk(ep.proof) if isinstance(p, Inherit)]
    ok = isinstance(v, Yes) and inductions == 2 and "yieldOrder" in inherits and dt < 5.0
    report(3, "yieldAll respects comm", ok, f"{v}, {inductions} inductions, {dt:.3f}s")


def test_safety():
    r = P.safety(CFG)
    print(r.line())
    report(4, "safety", r.ok and r.checked == 1000 and r.seconds < 60, r.line())


def test_denotation_invariance():
    r = P.denotation_invariance(CFG)
    print(r.line())
    report(5, "denotation invariance", r.ok and r.checked > 0, r.line())


def test_adequacy():
    r = P.adequacy(CFG)
    print(r.line())
    report(6, "adequacy", r.ok and r.checked == 500, r.line())


def test_lift_square():
    r = P.lift_square(CFG)
    print(r.line())
    report(7, "lift square", r.ok and r.checked == 200, r.line())


def test_instance_suite():
    nondet = load("nondet.lae").program
    size = universe_size(CHOOSE, 2, CFG.oracle_depth)
    print(f"universe at depth {CFG.oracle_depth}: {size} trees")
    ok, lines = size < 10**5, []
    for label in ("idem", "comm"):
        lifted = P.lift_preserves_relation(CFG, nondet.theory(label))
        accepted = P.accepted_handlers_instances(CFG, label)
        for r in (lifted, accepted):
            print(r.line())
            for n in r.notes:
                print("  ", n)
            ok = ok and r.ok and r.checked > 0
            lines.append(r.line())
    report(8, "instance suite for idem and comm", ok, "; ".join(lines))


def test_search_oracle_coherence_and_proof_soundness():
    coh = P.search_oracle_coherence(CFG)
    snd = P.proof_corpus_soundness(CFG)
    for r in (coh, snd):
        print(r.line())
    ok = coh.ok and snd.ok and coh.checked > 0 and snd.checked > 0
    report(9, "search/oracle coherence", ok, f"{coh.line()}; {snd.line()}")


def test_collect_after_full_theory_rejected():
    loaded = load("collect.lae")
    checker = loaded.checker()
    loaded.check()
    c = parse_comp("with collectToList handle chooseFromList ()", loaded.program)
    gamma = {n: l.type for n, l in loaded.program.lets.items() if l.type is not None and not isinstance(l.type, CompT)}
    with pytest.raises(TheoryMismatch) as e:
        checker.check_comp(gamma, c, loaded.program.types["L"])
    report(10, "collectToList composition rejected", True, str(e.value))
