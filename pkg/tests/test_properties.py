"""Small runs of every property suite, plus checks that the suites detect faults."""

from __future__ import annotations

import pytest

from loceff import properties as P
from loceff.config import Config
from loceff.syntax import BOOL, CompT, UNIT

from conftest import CHOOSE

SMALL = Config(corpus_count=60, adequacy_count=60, square_count=30, seed=7)


@pytest.mark.parametrize(
    "suite",
    [P.safety, P.denotation_invariance, P.adequacy, P.lift_square, P.thandle_coherence, P.replay_counterexamples],
    ids=lambda f: f.__name__,
)
def test_suite_passes_on_small_corpus(suite):
    r = suite(SMALL)
    assert r.ok, r.failures[:3]
    assert r.checked > 0
    assert r.line().startswith("PASS")


def test_report_records():
    r = P.Report("demo", 3, ["boom"], ["note"], 0.5)
    assert not r.ok and r.line().startswith("FAIL demo: 3 checked")
    assert r.record()["failures"] == ["boom"]


def test_instance_check_detects_violation(pickleft):
    h = pickleft.program.lets["pickLeft"].term
    comm = pickleft.program.theory("comm")
    from loceff.equivalence import tree_oracle

    checked, failures, _ = P.instance_check(h, comm, CHOOSE, CompT(BOOL), lambda th, sig, d, leaves: tree_oracle(th, sig, d, leaves))
    assert checked > 0 and failures


def test_instance_check_accepts_respecting_handler(pickleft):
    h = pickleft.program.lets["pickLeft"].term
    idem = pickleft.program.theory("idem")
    from loceff.equivalence import tree_oracle

    checked, failures, _ = P.instance_check(h, idem, CHOOSE, CompT(BOOL), lambda th, sig, d, leaves: tree_oracle(th, sig, d, leaves))
    assert checked > 0 and not failures


def test_merge_sigs():
    from loceff.syntax import Signature

    tick = Signature.of({"tick": (UNIT, UNIT)})
    assert P.merge_sigs(CHOOSE, tick).names == ("choose", "tick")


def test_run_all_reports_every_suite():
    seen = []
    reports = P.run_all(Config(corpus_count=10, adequacy_count=10, square_count=10), seen.append)
    assert len(reports) == len(P.all_suites()) == len(seen)
    assert all(r.ok for r in reports), [r.line() for r in reports if not r.ok]
