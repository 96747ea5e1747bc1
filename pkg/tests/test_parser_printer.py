from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from loceff.generate import TemplateGenerator, TermGenerator
from loceff.parser import ParseError, parse_comp, parse_program, parse_template
from loceff.printer import show
from loceff.typecheck import Checker, TypeCheckError
from loceff.syntax import UNIT, CompT, Handler, Op, Return, TIf, TOp, Unit

from conftest import CHOOSE, C, T, V


def test_return_unit():
    assert C("return ()") == Return(Unit())


def test_pickleft_handler_literal(nondet):
    h = V("handler { choose((); k) -> k true | return x -> return x }", nondet)
    assert isinstance(h, Handler)
    assert [c.op for c in h.clauses] == ["choose"]
    assert h.clause("choose").body == C("k true")


def test_comm_lhs_template(nondet):
    t = nondet.program.equations["comm"].lhs
    assert isinstance(t, TOp) and t.op == "choose" and isinstance(t.body, TIf)
    assert show(t) == "choose((); y. if y then z1 () else z2 ())"


def test_undeclared_op_parses_and_fails_to_check():
    c = parse_comp("do x <- op(()) in return x")
    assert c.var == "x"
    with pytest.raises(TypeCheckError):
        Checker().check_comp({}, c, CompT(UNIT))


def test_declared_op_parses_as_op_call(nondet):
    c = parse_comp("do x <- choose(()) in return x", nondet.program)
    assert isinstance(c.first, Op)


def test_parse_error_location():
    with pytest.raises(ParseError) as e:
        parse_program("signature { choose : unit -> bool }\nlet x = return (", "bad.lae")
    assert e.value.span.line == 2
    assert e.value.span.col > 1


def test_program_declarations(nondet, yieldall):
    assert set(nondet.program.equations) == {"comm", "idem", "assoc"}
    assert "yield" in yieldall.program.ops
    assert show(yieldall.program.types["D"]) == "unit!{yield}/{yieldOrder}"


def test_type_printing(nondet):
    assert show(T("bool!{choose}/{comm}", nondet)) == "bool!{choose}/{comm}"
    assert show(T("unit -> bool!{choose}", nondet)) == "unit -> bool!{choose}"


@pytest.mark.parametrize(
    "text",
    [
        "return ()",
        "if true then return false else return true",
        "do x <- return true in return x",
        "(fun x -> return x) true",
        "choose((); y. if y then return true else return false)",
        "with handler { choose((); k) -> k true | return x -> return x } handle choose((); y. return y)",
    ],
)
def test_round_trip_examples(text):
    c = C(text)
    assert parse_comp(show(c)) == c


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 100_000), st.integers(1, 14))
def test_round_trip_generated_terms(seed, size):
    c = TermGenerator(seed).term(size).term
    assert parse_comp(show(c)) == c


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 100_000), st.integers(1, 8))
def test_round_trip_generated_templates(seed, size):
    inst = TemplateGenerator(seed, CHOOSE).template(size)
    assert parse_template(show(inst.template)) == inst.template


def test_every_node_has_a_span():
    c = C("do x <- return true in\n  if x then return x else return false")
    assert c.span is not None
    assert c.rest.span.line == 2
