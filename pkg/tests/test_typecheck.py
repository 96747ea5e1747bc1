from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from loceff.generate import POOL, TemplateGenerator, TermGenerator
from loceff.logic.respects import LogicOracle
from loceff.syntax import (
    BOOL,
    UNIT,
    Auto,
    BoolLit,
    CompT,
    FunT,
    HandlerT,
    Signature,
    TApp,
    Var,
    instantiate_template,
)
from loceff.typecheck import (
    ArgTypeMismatch,
    Checker,
    EmptyOracle,
    ExtraClause,
    FreeOracle,
    MissingClause,
    RespectsRefuted,
    RespectsUnknown,
    TheoryMismatch,
    TypeMismatch,
    UnboundVariable,
    WfError,
    check_program,
)

from conftest import CHOOSE, YIELD, C, T, V, closed


def test_wf_ground_and_theory_free_types():
    ch = Checker(CHOOSE)
    ch.wf_type(BOOL)
    ch.wf_type(CompT(BOOL, CHOOSE))


def test_wf_rejects_theory_outside_signature(nondet):
    comm = nondet.program.theory("comm")
    with pytest.raises(WfError):
        Checker(CHOOSE).wf_type(CompT(BOOL, Signature(), comm))


def test_wf_shipped_theories(nondet, yieldall):
    Checker(CHOOSE).wf_theory(nondet.program.theory("comm"), CHOOSE)
    Checker(YIELD).wf_theory(yieldall.program.theory("yieldOrder"), YIELD)


def test_wf_template_argument_type():
    with pytest.raises(ArgTypeMismatch):
        Checker().wf_template({}, {"z": UNIT}, TApp("z", BoolLit(True)), Signature())


def test_check_identity_function():
    Checker().check_value({}, V("fun x -> return x"), FunT(BOOL, CompT(BOOL)))


def test_check_return_at_any_theory(nondet):
    ty = T("unit!{choose}/{comm}", nondet)
    Checker(CHOOSE).check_comp({}, C("return ()"), ty)


def test_check_op_call(nondet):
    Checker(CHOOSE).check_comp({}, C("choose((); y. return y)", nondet), CompT(BOOL, CHOOSE))


def test_generic_op_call(nondet):
    Checker(CHOOSE).check_comp({}, C("do x <- choose(()) in return x", nondet), CompT(BOOL, CHOOSE))


def test_unbound_variable():
    with pytest.raises(UnboundVariable):
        Checker().check_comp({}, C("return x"), CompT(BOOL))


def test_type_mismatch():
    with pytest.raises(TypeMismatch):
        Checker().check_comp({}, C("return ()"), CompT(BOOL))


def test_pickleft_checks_with_proof_evidence(pickleft):
    types = pickleft.check()
    assert str(types["pickLeft"]) == "(bool!{choose}/{assoc, idem}) => bool!{}" or isinstance(types["pickLeft"], HandlerT)
    assert types["demo"] == CompT(BOOL)


def test_pickleft_rejected_for_comm_in_auto_mode(pickleft):
    h = pickleft.program.lets["pickLeft"].term
    h = type(h)(h.ret_param, h.ret_body, h.clauses, Auto())
    ty = HandlerT(T("bool!{choose}/{comm}", pickleft), CompT(BOOL))
    with pytest.raises(RespectsRefuted) as e:
        pickleft.checker().check_value({}, h, ty)
    assert e.value.counterexample is not None


def test_free_and_empty_oracles(pickleft):
    h = pickleft.program.lets["pickLeft"].term
    idem = HandlerT(T("bool!{choose}/{idem}", pickleft), CompT(BOOL))
    free = HandlerT(T("bool!{choose}", pickleft), CompT(BOOL))
    Checker(CHOOSE, FreeOracle()).check_value({}, h, free)
    with pytest.raises(RespectsUnknown):
        Checker(CHOOSE, FreeOracle()).check_value({}, h, idem)
    with pytest.raises(RespectsUnknown):
        Checker(CHOOSE, EmptyOracle()).check_value({}, h, free)


def test_pickleft_clauses(pickleft):
    h = pickleft.program.lets["pickLeft"].term
    Checker(CHOOSE).check_clauses({}, h.clauses, CHOOSE, CompT(BOOL))


def test_no_clauses_against_empty_signature():
    Checker().check_clauses({}, (), Signature(), CompT(BOOL))


def test_missing_clause(pickleft):
    h = pickleft.program.lets["pickLeft"].term
    both = Signature.of({"choose": (UNIT, BOOL), "yield": (BOOL, UNIT)})
    with pytest.raises(MissingClause) as e:
        Checker(both).check_clauses({}, h.clauses, both, CompT(BOOL))
    assert "yield" in str(e.value)


def test_extra_clause(pickleft):
    h = pickleft.program.lets["pickLeft"].term
    with pytest.raises(ExtraClause):
        Checker(CHOOSE).check_clauses({}, h.clauses, Signature(), CompT(BOOL))


def _let_ctx(loaded):
    return {n: l.type for n, l in loaded.program.lets.items() if l.type is not None and not isinstance(l.type, CompT)}


def test_collect_composition_theory_mismatch(collect):
    c = C("with collectToList handle chooseFromList ()", collect)
    with pytest.raises(TheoryMismatch):
        collect.checker().check_comp(_let_ctx(collect), c, collect.program.types["L"])


def test_collect_with_matching_theory(collect):
    c = C("with collectToList handle chooseAssoc ()", collect)
    collect.checker().check_comp(_let_ctx(collect), c, collect.program.types["L"])


def test_inlined_literals_carry_no_theory(collect):
    # unannotated literals are typed at the empty theory, so inlining both
    # definitions loses the mismatch
    c = closed(collect, "with collectToList handle chooseFromList ()")
    collect.checker().check_comp({}, c, collect.program.types["L"])


def test_all_corpus_programs_check(nondet, pickleft, yieldall, collect):
    from loceff.loader import load

    for loaded in (nondet, pickleft, yieldall, collect, load("generators.lae")):
        loaded.check()


def test_logic_oracle_unknown_evidence(pickleft):
    h = pickleft.program.lets["pickLeft"].term
    ty = HandlerT(T("bool!{choose}/{idem}", pickleft), CompT(BOOL))
    with pytest.raises(RespectsUnknown):
        Checker(CHOOSE, LogicOracle({})).check_value({}, h, ty)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 100_000), st.integers(1, 12))
def test_generated_terms_check(seed, size):
    g = TermGenerator(seed).term(size)
    Checker(POOL).check_comp({}, g.term, g.type)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 100_000), st.integers(1, 12))
def test_weakening(seed, size):
    g = TermGenerator(seed).term(size)
    ch = Checker(POOL)
    ch.check_comp({"unused": BOOL, "other": FunT(UNIT, CompT(UNIT))}, g.term, g.type)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100_000), st.integers(1, 6))
def test_template_instances_check(seed, size):
    inst = TemplateGenerator(seed, CHOOSE).template(size)
    ch = Checker(CHOOSE)
    ch.wf_template(dict(inst.value_ctx), dict(inst.template_ctx), inst.template, CHOOSE)
    ty = CompT(BOOL, CHOOSE)
    fns = {z: Var(f"f_{z}") for z, _ in inst.template_ctx}
    gamma = {**dict(inst.value_ctx), **{f"f_{z}": FunT(a, ty) for z, a in inst.template_ctx}}
    ch.check_comp(gamma, instantiate_template(inst.template, fns), ty)


def test_checking_is_deterministic(pickleft):
    a = check_program(pickleft.program, checker=pickleft.checker())
    b = check_program(pickleft.program, checker=pickleft.checker())
    assert a == b
