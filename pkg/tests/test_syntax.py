from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from loceff.generate import TermGenerator
from loceff.printer import show
from loceff.syntax import (
    UNIT,
    BoolLit,
    Fun,
    Return,
    Signature,
    TApp,
    TIf,
    UnboundTemplateVariable,
    Unit,
    Var,
    alpha_eq,
    fresh,
    instantiate_template,
    subst,
)

from conftest import C, TM, V


def test_alpha_renaming_compares_equal():
    assert V("fun x -> return x") == V("fun y -> return y")
    assert alpha_eq(C("do x <- return true in return x"), C("do z <- return true in return z"))
    assert V("fun x -> return y") != V("fun z -> return w")


def test_alpha_equal_terms_hash_equal():
    assert hash(V("fun x -> return x")) == hash(V("fun q -> return q"))


def test_subst_replaces_free_variable():
    assert subst(C("return x"), {"x": BoolLit(True)}) == C("return true")


def test_subst_respects_shadowing():
    f = V("fun x -> return x")
    assert subst(f, {"x": BoolLit(True)}) == f


def test_subst_avoids_capture():
    out = subst(V("fun y -> return x"), {"x": Var("y")})
    assert show(out) == "fun y' -> return y"
    assert out.free_vars == {"y"}


def test_fresh_primes_until_unused():
    assert fresh("y", {"y", "y'"}) == "y''"
    assert fresh("x", set()) == "x"


def test_instantiate_applies_function():
    assert instantiate_template(TM("z ()"), {"z": Var("f")}) == C("f ()")


def test_instantiate_idem_lhs(nondet):
    lhs = nondet.program.equations["idem"].lhs
    out = instantiate_template(lhs, {"z": Var("f")})
    assert show(out) == "choose((); y. if y then f () else f ())"


def test_instantiate_conditional():
    t = TIf(BoolLit(True), TApp("z1", Unit()), TApp("z2", Unit()))
    out = instantiate_template(t, {"z1": Var("f1"), "z2": Var("f2")})
    assert out == C("if true then f1 () else f2 ()")


def test_instantiate_substitutes_values():
    out = instantiate_template(TM("z x"), {"z": Var("f")}, {"x": BoolLit(False)})
    assert out == C("f false")


def test_instantiate_unbound_variable():
    with pytest.raises(UnboundTemplateVariable):
        instantiate_template(TM("z ()"), {})


def test_instantiate_does_not_capture_function_variables(nondet):
    # a function mentioning y must not be captured by the template binder y
    lhs = nondet.program.equations["idem"].lhs
    f = Fun("_", Return(Var("y")))
    out = instantiate_template(lhs, {"z": f})
    assert "y" in out.free_vars


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 10))
def test_subst_of_unused_variable_is_identity(seed, size):
    c = TermGenerator(seed).term(size).term
    assert subst(c, {"unused": BoolLit(True)}) == c


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 10))
def test_subst_composition(seed, size):
    # c[v/x][w/y] = c[v[w/y]/x, w/y] for closed w
    c = C("if x then return y else return x")
    v, w = Var("y"), BoolLit(seed % 2 == 0)
    left = subst(subst(c, {"x": v}), {"y": w})
    right = subst(c, {"x": subst(v, {"y": w}), "y": w})
    assert left == right
    g = TermGenerator(seed).term(size).term
    assert subst(subst(g, {"x": v}), {"y": w}) == subst(g, {"x": subst(v, {"y": w}), "y": w})


def test_signature_restrict_and_iterate():
    sig = Signature.of({"tick": (UNIT, UNIT)})
    assert sig.names == ("tick",)
    assert [op for op, _, _ in sig] == ["tick"]
    assert not sig.restrict([])
