from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from loceff.freemodel import (
    FF,
    STAR,
    TT,
    Leaf,
    NotEnumerable,
    OpaqueEquality,
    OpaqueFn,
    Table,
    bind,
    count_trees,
    denote_clauses,
    denote_comp,
    enumerate_ground,
    enumerate_trees,
    free_interp,
    hsem_template,
    lift,
    node,
    semvalue_of,
    semvalue_to_term,
    show_tree,
    tree_to_term,
)
from loceff.generate import POOL, TermGenerator
from loceff.interpreter import ValueResult, run
from loceff.syntax import BOOL, UNIT, BoolLit, CompT, FunT, Signature

from conftest import CHOOSE, YIELD, C

CHOICE = node("choose", STAR, {TT: Leaf(TT), FF: Leaf(FF)})


def const(t):
    return Table((STAR,), (t,))


def test_enumerate_ground():
    assert enumerate_ground(UNIT) == [STAR]
    assert set(enumerate_ground(BOOL)) == {TT, FF}
    assert enumerate_ground(FunT(UNIT, CompT(BOOL))) is NotEnumerable


def test_free_interp_choose():
    assert free_interp(CHOOSE)("choose", STAR, Leaf) == CHOICE


def test_free_interp_yield():
    assert free_interp(YIELD)("yield", TT, Leaf) == node("yield", TT, {STAR: Leaf(STAR)})


def test_lift_free_identity_is_identity():
    assert lift(free_interp(CHOOSE), Leaf)(CHOICE) == CHOICE


def test_lift_pickleft_clauses(pickleft):
    h = pickleft.program.lets["pickLeft"].term
    H = denote_clauses(None, h, CHOOSE, CompT(BOOL), {}, CHOOSE)
    assert lift(H, Leaf)(CHOICE) == Leaf(TT)
    assert H("choose", STAR, lambda b: Leaf(b)) == Leaf(TT)


def test_denote_do_return():
    assert denote_comp(None, C("do x <- return true in return x"), CompT(BOOL), {}, Signature()) == Leaf(TT)


def test_denote_op(nondet):
    t = denote_comp(None, C("choose((); y. return y)", nondet), CompT(BOOL, CHOOSE), {}, CHOOSE)
    assert t == CHOICE
    assert show_tree(t) == "choose(⋆){ tt => return tt, ff => return ff }"


def test_denote_handled_choice(pickleft):
    c = pickleft.program.closed(pickleft.program.term("demo"))
    assert denote_comp(None, c, CompT(BOOL), {}, CHOOSE) == Leaf(TT)


def test_denote_open_term_with_environment():
    t = denote_comp({"x": BOOL}, C("if x then return false else return true"), CompT(BOOL), {"x": TT}, Signature())
    assert t == Leaf(FF)


def test_hsem_free_comm(nondet):
    f1, f2 = const(Leaf(TT)), const(Leaf(FF))
    lhs = nondet.program.equations["comm"].lhs
    t = hsem_template(lhs, free_interp(CHOOSE), {}, {"z1": f1, "z2": f2})
    assert t == node("choose", STAR, {TT: f1(STAR), FF: f2(STAR)})


def test_hsem_variable(nondet):
    f = const(CHOICE)
    assert hsem_template(nondet.program.equations["idem"].rhs, free_interp(CHOOSE), {}, {"z": f}) == CHOICE


def test_hsem_pickleft_idem(nondet, pickleft):
    h = pickleft.program.lets["pickLeft"].term
    H = denote_clauses(None, h, CHOOSE, CompT(BOOL), {}, CHOOSE)
    f = const(Leaf(FF))
    assert hsem_template(nondet.program.equations["idem"].lhs, H, {}, {"z": f}) == Leaf(FF)


def test_bind_grafts_leaves():
    out = bind(CHOICE, lambda b: Leaf(STAR) if b == TT else CHOICE)
    assert out == node("choose", STAR, {TT: Leaf(STAR), FF: CHOICE})


def test_tree_counts():
    assert [count_trees(CHOOSE, 2, d) for d in range(4)] == [2, 6, 38, 1446]
    for d in range(3):
        trees = enumerate_trees(CHOOSE, [FF, TT], d)
        assert len(trees) == count_trees(CHOOSE, 2, d) == len(set(trees))


def test_opaque_functions_have_no_equality():
    f, g = OpaqueFn(lambda a: Leaf(a)), OpaqueFn(lambda a: Leaf(a))
    assert f == f
    with pytest.raises(OpaqueEquality):
        f == g
    with pytest.raises(OpaqueEquality):
        semvalue_to_term(f)


def test_read_back_round_trip():
    assert tree_to_term(CHOICE, BOOL) == C("choose((); y. if y then return true else return false)", _ops())
    assert semvalue_of(BoolLit(True)) == TT


def _ops():
    from loceff.parser import Program

    return Program(ops={"choose": (UNIT, BOOL)})


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 100_000), st.integers(1, 12))
def test_read_back_denotes_same_tree(seed, size):
    g = TermGenerator(seed).term(size)
    t = denote_comp(None, g.term, g.type, {}, POOL)
    assert denote_comp(None, tree_to_term(t, g.type.value), g.type, {}, POOL) == t


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 100_000), st.integers(1, 12))
def test_adequacy_on_pure_terms(seed, size):
    g = TermGenerator(seed).term(size, sig=Signature(), value=BOOL)
    t = denote_comp(None, g.term, g.type, {}, POOL)
    res = run(g.term)
    assert isinstance(res.result, ValueResult)
    assert t == Leaf(semvalue_of(res.result.value))
