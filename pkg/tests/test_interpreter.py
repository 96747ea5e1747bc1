from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from loceff.generate import TermGenerator
from loceff.interpreter import FuelExhausted, OpStopped, OpenTerm, Stepped, Stuck, ValueResult, run, size, step
from loceff.syntax import BoolLit

from conftest import C, closed


def test_do_return():
    r = step(C("do x <- return true in return x"))
    assert isinstance(r, Stepped) and r.next == C("return true")


def test_do_op_hoisting(nondet):
    r = step(C("do x <- choose((); y. return y) in return x", nondet))
    assert isinstance(r, Stepped)
    assert r.next == C("choose((); y. do x <- return y in return x)", nondet)


def test_pickleft_demo_runs_to_true(pickleft):
    c = pickleft.program.closed(pickleft.program.term("demo"))
    assert isinstance(step(c), Stepped)
    res = run(c)
    assert res.result == ValueResult(BoolLit(True))
    assert res.final == C("return true")


def test_handle_return(pickleft):
    res = run(closed(pickleft, "with pickLeft handle return false"))
    assert res.result == ValueResult(BoolLit(False))


def test_yieldall_first_yield_is_true(yieldall):
    c = closed(yieldall, "with yieldAll handle choose((); y. if y then return true else return false)")
    res = run(c)
    assert isinstance(res.result, OpStopped)
    assert res.result.op == "yield" and res.result.arg == BoolLit(True)


def test_non_handler_is_stuck():
    r = step(C("with (fun x -> return x) handle return ()"))
    assert isinstance(r, Stuck)


def test_open_terms_rejected():
    with pytest.raises(OpenTerm):
        step(C("return x"))
    with pytest.raises(OpenTerm):
        run(C("return x"))


def test_if_steps():
    assert step(C("if true then return () else return false")).next == C("return ()")
    assert step(C("if false then return () else return false")).next == C("return false")


def test_fuel_exhausted():
    res = run(C("(fun x -> (fun y -> return y) x) true"), fuel=1)
    assert isinstance(res.result, FuelExhausted)


def test_trace_records_every_term():
    res = run(C("do x <- return true in return x"), trace=True)
    assert res.trace[0] == C("do x <- return true in return x")
    assert res.trace[-1] == C("return true")
    assert res.steps == 1


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 100_000), st.integers(1, 12))
def test_deterministic(seed, size_):
    c = TermGenerator(seed).term(size_).term
    assert step(c) == step(c)
    assert run(c).final == run(c).final


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 100_000), st.integers(1, 12))
def test_progress_within_fuel(seed, size_):
    c = TermGenerator(seed).term(size_).term
    res = run(c, fuel=10 * size(c) ** 2)
    assert isinstance(res.result, (ValueResult, OpStopped))
