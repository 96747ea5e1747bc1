from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from loceff.equivalence import (
    Related,
    RefutedWithinBound,
    UniverseTooLarge,
    UnknownWithinBound,
    check_step,
    compile_rules,
    match_template,
    rel_value,
    replay,
    rewrites,
    tree_equiv,
    tree_oracle,
    universe_size,
)
from loceff.freemodel import FF, STAR, TT, Leaf, Table, enumerate_trees, node
from loceff.syntax import BOOL, Theory

from conftest import CHOOSE, T

CHOICE = node("choose", STAR, {TT: Leaf(TT), FF: Leaf(FF)})
SWAPPED = node("choose", STAR, {TT: Leaf(FF), FF: Leaf(TT)})
IDEM_TT = node("choose", STAR, {TT: Leaf(TT), FF: Leaf(TT)})
EMPTY = Theory(())


@pytest.fixture(scope="module")
def th(nondet):
    return nondet.program.theory


def test_rel_value_ground():
    assert isinstance(rel_value(BOOL, TT, TT), Related)
    assert isinstance(rel_value(BOOL, TT, FF), RefutedWithinBound)


def test_rel_value_function_via_idem(nondet):
    a = T("unit -> bool!{choose}/{idem}", nondet)
    f, g = Table((STAR,), (IDEM_TT,)), Table((STAR,), (Leaf(TT),))
    r = rel_value(a, f, g)
    assert isinstance(r, Related) and len(r.path) == 1


def test_rel_value_function_refuted(nondet):
    a = T("unit -> bool!{choose}/{idem}", nondet)
    r = rel_value(a, Table((STAR,), (Leaf(TT),)), Table((STAR,), (Leaf(FF),)))
    assert isinstance(r, RefutedWithinBound)


def test_rel_value_handler_without_probes(nondet):
    a = T("(bool!{choose}) => bool!{}", nondet)
    assert isinstance(rel_value(a, None, None), UnknownWithinBound)


def test_match_idem_lhs(th):
    (m,) = match_template(th("idem").by_label("idem").lhs, IDEM_TT, CHOOSE)
    assert m.zeta == {"z": {STAR: Leaf(TT)}}


def test_match_idem_fails_on_distinct_branches(th):
    assert match_template(th("idem").by_label("idem").lhs, CHOICE, CHOOSE) == []


def test_match_comm_lhs(th):
    t1, t2 = IDEM_TT, Leaf(FF)
    (m,) = match_template(th("comm").by_label("comm").lhs, node("choose", STAR, {TT: t1, FF: t2}), CHOOSE)
    assert m.zeta == {"z1": {STAR: t1}, "z2": {STAR: t2}}


def test_equiv_reflexive(th):
    r = tree_equiv(CHOICE, CHOICE, th("comm"), CHOOSE)
    assert isinstance(r, Related) and r.path == ()


def test_equiv_comm_one_step(th):
    r = tree_equiv(CHOICE, SWAPPED, th("comm"), CHOOSE)
    assert isinstance(r, Related) and len(r.path) == 1
    assert r.path[0].label == "comm"


def test_equiv_refuted_leaves(th):
    r = tree_equiv(Leaf(TT), Leaf(FF), th("comm", "idem", "assoc"), CHOOSE)
    assert isinstance(r, RefutedWithinBound)


def test_equiv_empty_theory_is_equality():
    assert isinstance(tree_equiv(CHOICE, SWAPPED, EMPTY, CHOOSE), RefutedWithinBound)


def test_equiv_bound_validation(th):
    with pytest.raises(ValueError):
        tree_equiv(CHOICE, SWAPPED, th("comm"), CHOOSE, step_bound=0)


def test_witness_replays(th):
    comm = th("comm", "idem")
    a = node("choose", STAR, {TT: CHOICE, FF: IDEM_TT})
    b = node("choose", STAR, {TT: Leaf(TT), FF: SWAPPED})
    r = tree_equiv(a, b, comm, CHOOSE)
    assert isinstance(r, Related)
    assert replay(r.path, a, comm) == b
    assert all(check_step(s, comm) for s in r.path)


def test_rewrites_are_theory_instances(th):
    theory = th("comm", "idem", "assoc")
    rules = compile_rules(theory, CHOOSE)
    for t in enumerate_trees(CHOOSE, [FF, TT], 2):
        for s in rewrites(t, rules, CHOOSE):
            assert check_step(s, theory)


def test_oracle_idem_depth_one(th):
    o = tree_oracle(th("idem"), CHOOSE, 1)
    assert o.size == 6
    assert o.related(IDEM_TT, Leaf(TT))
    assert not o.related(CHOICE, Leaf(TT))
    assert o.query(CHOICE, SWAPPED) == "notRelatedWithinBound"


def test_oracle_empty_theory_singletons():
    o = tree_oracle(EMPTY, CHOOSE, 2)
    assert all(len(c) == 1 for c in o.partition())


def test_oracle_comm_depth_one(th):
    o = tree_oracle(th("comm"), CHOOSE, 1)
    assert o.related(CHOICE, SWAPPED)
    assert not o.related(Leaf(TT), Leaf(FF))


def test_oracle_universe_cap(th):
    assert universe_size(CHOOSE, 2, 4) > 10**5
    with pytest.raises(UniverseTooLarge):
        tree_oracle(th("comm"), CHOOSE, 4)


def test_oracle_congruence(th):
    o = tree_oracle(th("comm"), CHOOSE, 2)
    assert o.related(node("choose", STAR, {TT: CHOICE, FF: Leaf(TT)}), node("choose", STAR, {TT: SWAPPED, FF: Leaf(TT)}))


@pytest.fixture(scope="module")
def idem2(nondet):
    return tree_oracle(nondet.program.theory("idem", "comm"), CHOOSE, 2)


TREES2 = enumerate_trees(CHOOSE, [FF, TT], 2)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(TREES2), st.sampled_from(TREES2), st.sampled_from(TREES2))
def test_oracle_is_an_equivalence(idem2, a, b, c):
    assert idem2.query(a, b) == idem2.query(b, a)
    if idem2.related(a, b) and idem2.related(b, c):
        assert idem2.related(a, c)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(TREES2), st.sampled_from(TREES2))
def test_search_related_implies_oracle_related(idem2, a, b):
    r = tree_equiv(a, b, idem2.theory, CHOOSE, step_bound=200)
    if isinstance(r, Related) and r.depth <= 2:
        assert idem2.related(a, b)
