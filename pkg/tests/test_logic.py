from __future__ import annotations

import textwrap

import pytest

from loceff.loader import Loaded, check_theorems
from loceff.logic.proof import (
    Beta,
    Calc,
    Induction,
    ProofChecker,
    ProofError,
    count_nodes,
)
from loceff.logic.respects import auto_respects, check_respects, obligation, thandle
from loceff.logic.script import read_proof_file
from loceff.parser import ParseError, parse_formula
from loceff.printer import show
from loceff.syntax import BOOL, Auto, CompT, Var
from loceff.typecheck import No, Unknown, Yes

from conftest import CHOOSE, C, TM


def prove(loaded, text, logic="pred"):
    """Check every theorem of an inline proof file against ``loaded``."""
    pf = read_proof_file(textwrap.dedent(text), loaded.program, "<test>")
    scratch = Loaded(loaded.program, dict(loaded.evidence), dict(pf.theorems))
    check_theorems(scratch, scratch.checker(logic), logic)
    return pf


def handler(loaded, name):
    let = loaded.program.lets[name]
    return let.term, let.type


# -- thandle ------------------------------------------------------------------


def test_thandle_pickleft_idem(nondet, pickleft):
    h, _ = handler(pickleft, "pickLeft")
    out = thandle(h, nondet.program.equations["idem"].lhs, {"z": Var("f")})
    assert out == C("(fun y -> if y then f () else f ()) true")


def test_thandle_template_variable(pickleft):
    h, _ = handler(pickleft, "pickLeft")
    assert thandle(h, TM("z ()"), {"z": Var("f")}) == C("f ()")


def test_thandle_yieldall_comm(yieldall):
    h, _ = handler(yieldall, "yieldAll")
    out = thandle(h, yieldall.program.equations["comm"].lhs, {"z1": Var("f1"), "z2": Var("f2")})
    k = "(fun y -> if y then f1 () else f2 ())"
    assert out == C(f"{k} true; {k} false")


def test_obligation_context(pickleft):
    h, ht = handler(pickleft, "pickLeft")
    ob = obligation(h, pickleft.program.equations["assoc"], ht.dst, {})
    assert set(ob.ctx) == {"f1", "f2", "f3"}
    assert ob.goal.type == ht.dst


# -- proof scripts --------------------------------------------------------------


def test_beta_chain(pickleft):
    pf = prove(
        pickleft,
        """
        theorem chain (f : unit -> bool!{}) : (fun y -> if y then f () else f ()) true == f () at bool!{}
          calc
            (fun y -> if y then f () else f ()) true
            = beta_apply
            if true then f () else f ()
            = beta_if_true
            f ()
        """,
    )
    p = pf.theorems["chain"].proof
    assert isinstance(p, Calc) and [s.tag for s in p.steps] == ["beta_apply", "beta_if_true"]


def test_trans_of_betas(pickleft):
    prove(
        pickleft,
        """
        theorem chain (f : unit -> bool!{}) : (fun y -> if y then f () else f ()) true == f () at bool!{}
          trans if true then f () else f ()
            beta_apply
            beta_if_true
        """,
    )


def test_wrong_beta_rejected(pickleft):
    with pytest.raises(ProofError):
        prove(
            pickleft,
            """
            theorem chain (f : unit -> bool!{}) : (fun y -> if y then f () else f ()) true == f () at bool!{}
              beta_if_false
            """,
        )


def test_inherit_yield_order(yieldall):
    prove(
        yieldall,
        """
        theorem swap (g : unit -> D) : yield(true; _. yield(false; _. g ())) == yield(false; _. yield(true; _. g ())) at D
          inherit yieldOrder [x := true, y := false, z := g]
        """,
    )


def test_inherit_outside_theory_rejected(yieldall):
    with pytest.raises(ProofError):
        prove(
            yieldall,
            """
            theorem swap (g : unit -> unit!{yield}) : yield(true; _. yield(false; _. g ())) == yield(false; _. yield(true; _. g ())) at unit!{yield}
              inherit yieldOrder [x := true, y := false, z := g]
            """,
        )


def test_forall_intro_and_refl(pickleft):
    prove(
        pickleft,
        """
        theorem r : forall x : bool. return x == return x at bool!{}
          forallI x
            refl
        """,
    )


def test_equational_logic_rejects_predicate_rules(pickleft):
    text = """
        theorem r : forall x : bool. return x == return x at bool!{}
          forallI x
            refl
        """
    with pytest.raises(ProofError):
        prove(pickleft, text, logic="eq")


def test_induction_without_operations(pickleft):
    pf = prove(
        pickleft,
        """
        theorem seq (g : unit -> bool!{}) : g (); return () == (do u <- g () in return ()) at unit!{}
          refl
        theorem unit_eta (g : unit -> unit!{}) : g () == (do u <- g () in return ()) at unit!{}
          induction ?c on g () at unit!{}
            schema ?c == (do u <- ?c in return ()) at unit!{}
            case return x
              calc
                return x
                = eta_unit
                return ()
                = rev beta_do_return
                do u <- return () in return ()
                = rev eta_unit
                do u <- return x in return ()
        """,
    )
    assert count_nodes(pf.theorems["unit_eta"].proof, Induction) == 1


def test_shipped_scripts_have_expected_shape(yieldall, pickleft):
    (ep,) = yieldall.evidence["yieldall_proof"].equations
    assert count_nodes(ep.proof, Induction) == 2
    for ep in pickleft.evidence["pickleft_proof"].equations:
        assert count_nodes(ep.proof, Beta) >= 2


def test_script_syntax_error_location(pickleft):
    with pytest.raises(ParseError) as e:
        prove(pickleft, "theorem t : return () == return () at unit!{}\n  bogus_rule\n")
    assert e.value.span.line == 2


def test_formula_parsing(nondet):
    phi = parse_formula("forall x : bool. return x == return x at bool!{} /\\ top", nondet.program)
    assert "forall x : bool" in show(phi)


# -- respects judgement ------------------------------------------------------------


def test_respects_pickleft_scripts(pickleft):
    h, ht = handler(pickleft, "pickLeft")
    v = check_respects(h, ht.src.theory, CHOOSE, ht.dst, pickleft.evidence["pickleft_proof"], checker=pickleft.checker())
    assert isinstance(v, Yes)


def test_respects_pickleft_comm_auto(pickleft):
    h, ht = handler(pickleft, "pickLeft")
    v = check_respects(h, pickleft.program.theory("comm"), CHOOSE, ht.dst, Auto())
    assert isinstance(v, No)
    assert "z1 = λ_. return true, z2 = λ_. return false" in v.counterexample.describe()


def test_respects_yieldall_scripts(yieldall):
    h, ht = handler(yieldall, "yieldAll")
    v = check_respects(h, ht.src.theory, CHOOSE, ht.dst, yieldall.evidence["yieldall_proof"], checker=yieldall.checker())
    assert isinstance(v, Yes)


def test_respects_yieldall_auto(yieldall):
    h, ht = handler(yieldall, "yieldAll")
    assert isinstance(auto_respects(h, ht.src.theory, CHOOSE, ht.dst, ops=yieldall.program.signature), Yes)


def test_respects_logics(pickleft):
    h, ht = handler(pickleft, "pickLeft")
    ev = pickleft.evidence["pickleft_proof"]
    assert isinstance(check_respects(h, ht.src.theory, CHOOSE, ht.dst, ev, logic="empty"), Unknown)
    assert isinstance(check_respects(h, ht.src.theory, CHOOSE, ht.dst, ev, logic="free"), Unknown)
    assert isinstance(check_respects(h, pickleft.program.theory(), CHOOSE, ht.dst, ev, logic="free"), Yes)
    assert isinstance(check_respects(h, ht.src.theory, CHOOSE, ht.dst, None), Unknown)
    with pytest.raises(ValueError):
        check_respects(h, ht.src.theory, CHOOSE, ht.dst, ev, logic="full")


def test_respects_yieldall_needs_predicate_logic(yieldall):
    h, ht = handler(yieldall, "yieldAll")
    with pytest.raises(ProofError):
        check_respects(h, ht.src.theory, CHOOSE, ht.dst, yieldall.evidence["yieldall_proof"], logic="eq", checker=yieldall.checker("eq"))


def test_evidence_for_wrong_handler_rejected(pickleft, yieldall):
    # pickLeft's proofs do not establish comm for yieldAll
    h, ht = handler(yieldall, "yieldAll")
    ev = pickleft.evidence["pickleft_proof"]
    with pytest.raises(ProofError):
        check_respects(h, yieldall.program.theory("idem"), CHOOSE, ht.dst, ev.__class__(ev.name, ev.equations[:1]), checker=yieldall.checker())


def test_mutated_clause_rejected(pickleft):
    h, ht = handler(pickleft, "pickLeft")
    bad = type(h)(h.ret_param, h.ret_body, (type(h.clauses[0])("choose", "_", "k", C("k false")),), h.evidence)
    with pytest.raises(ProofError):
        check_respects(bad, ht.src.theory, CHOOSE, ht.dst, pickleft.evidence["pickleft_proof"], checker=pickleft.checker())


def test_auto_unknown_for_opaque_results(pickleft):
    h, _ = handler(pickleft, "pickLeft")
    from loceff.syntax import FunT, UNIT

    dst = CompT(FunT(UNIT, CompT(BOOL)))
    assert isinstance(auto_respects(h, pickleft.program.theory("comm"), CHOOSE, dst), Unknown)


def test_proof_checker_rejects_unknown_logic(pickleft):
    with pytest.raises(ValueError):
        ProofChecker(pickleft.checker(), "full")


def test_standalone_theorems(nondet):
    from loceff.loader import corpus_dir

    prove(nondet, (corpus_dir() / "nondet_facts.laeproof").read_text())
