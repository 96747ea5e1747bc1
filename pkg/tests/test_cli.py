from __future__ import annotations

import io
import json
import subprocess
import sys

import pytest

from loceff.cli import EXIT_NO, EXIT_NOINPUT, EXIT_OK, EXIT_UNKNOWN, EXIT_USAGE, main


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.mark.parametrize("f", ["nondet.lae", "pickleft.lae", "yieldall.lae", "collect.lae", "generators.lae"])
def test_check_corpus(f):
    code, out, _ = cli("check", f)
    assert code == EXIT_OK and "ok:" in out


def test_check_example_path():
    code, _, _ = cli("check", "examples/pickleft.lae")
    assert code == EXIT_OK


def test_verify_counterexample():
    code, out, _ = cli("verify", "pickleft.lae", "--handler", "pickLeft", "--theory", "comm", "--auto")
    assert code == EXIT_NO
    assert "z1 = λ_. return true, z2 = λ_. return false" in out
    assert "left side denotes return tt, right side denotes return ff" in out


@pytest.mark.parametrize("f,h", [("pickleft.lae", "pickLeft"), ("yieldall.lae", "yieldAll"), ("collect.lae", "collectToList")])
def test_verify_shipped_handlers(f, h):
    code, out, _ = cli("verify", f, "--handler", h)
    assert code == EXIT_OK, out


def test_verify_predicate_proof_in_equational_logic():
    code, _, _ = cli("verify", "yieldall.lae", "--handler", "yieldAll", "--logic", "eq")
    assert code == EXIT_UNKNOWN


def test_verify_auto_options():
    code, _, _ = cli("verify", "pickleft.lae", "--handler", "pickLeft", "--auto", "depth=1,steps=100")
    assert code == EXIT_OK
    code, _, err = cli("verify", "pickleft.lae", "--handler", "pickLeft", "--auto", "width=3")
    assert code == EXIT_USAGE and "--auto" in err


def test_run_demo():
    code, out, _ = cli("run", "pickleft.lae", "--term", "demo")
    assert code == EXIT_OK and out.strip() == "return true"


def test_run_trace_and_fuel():
    code, out, _ = cli("run", "pickleft.lae", "--term", "demo", "--trace")
    assert code == EXIT_OK and out.strip().splitlines()[-1] == "return true"
    code, _, err = cli("run", "pickleft.lae", "--term", "demo", "--fuel", "1")
    assert code == EXIT_NO and "1 steps" in err


def test_run_stuck():
    code, _, err = cli("run", "nondet.lae", "--term", "with (fun x -> return x) handle return ()")
    assert code == EXIT_NO and "stuck" in err


def test_denote():
    code, out, _ = cli("denote", "yieldall.lae", "--term", "both")
    assert code == EXIT_OK
    assert out.strip() == "yield(tt){ ⋆ => yield(ff){ ⋆ => return ⋆ } }"


def test_equiv():
    t = "bool!{choose}/{comm}"
    a = "choose((); y. if y then return true else return false)"
    b = "choose((); y. if y then return false else return true)"
    code, out, _ = cli("equiv", "nondet.lae", "--type", t, a, b)
    assert code == EXIT_OK and "comm" in out
    code, _, _ = cli("equiv", "nondet.lae", "--type", t, "return true", "return false")
    assert code == EXIT_NO


def test_prove():
    code, _, _ = cli("prove", "nondet.lae", "nondet_facts.laeproof")
    assert code == EXIT_OK
    code, _, _ = cli("prove", "nondet.lae", "nondet_facts.laeproof", "--logic", "eq")
    assert code == EXIT_NO


def test_prove_goal_mismatch():
    code, _, _ = cli(
        "prove", "nondet.lae", "nondet_facts.laeproof", "--theorem", "idem_at",
        "--goal", "forall f : unit -> N. f () == f () at N",
    )
    assert code == EXIT_NO


def test_oracle():
    code, out, _ = cli("oracle", "nondet.lae", "--theory", "idem", "--depth", "1")
    assert code == EXIT_OK
    assert "choose(⋆){ tt => return tt, ff => return tt }" in out


def test_json_diagnostics_either_side():
    for argv in (["--json-diagnostics", "run", "pickleft.lae", "--term", "demo"], ["run", "pickleft.lae", "--term", "demo", "--json-diagnostics"]):
        code, out, _ = cli(*argv)
        rec = json.loads(out.strip().splitlines()[-1])
        assert code == EXIT_OK and rec["term"] == "return true"


def test_type_error_diagnostic(tmp_path):
    bad = tmp_path / "bad.lae"
    bad.write_text("let x : bool!{} = return ()\n")
    code, _, err = cli("check", str(bad))
    assert code == EXIT_NO
    assert err.startswith(f"{bad}:1:") and "error[TypeMismatch]" in err
    code, out, _ = cli("--json-diagnostics", "check", str(bad))
    rec = json.loads(out.strip().splitlines()[-1])
    assert rec["code"] == "TypeMismatch" and rec["line"] == 1


def test_parse_error_diagnostic(tmp_path):
    bad = tmp_path / "bad.lae"
    bad.write_text("let x = return (\n")
    code, _, err = cli("check", str(bad))
    assert code == EXIT_NO and "error[ParseError]" in err


def test_usage_errors(tmp_path):
    assert cli("check", "no_such_file.lae")[0] == EXIT_NOINPUT
    assert cli("run", "pickleft.lae")[0] == EXIT_USAGE
    assert cli("bogus")[0] == EXIT_USAGE
    assert cli("run", "pickleft.lae", "--term", "demo", "--fuel", "0")[0] == EXIT_USAGE
    cfg = tmp_path / "c.json"
    cfg.write_text('{"nope": 1}')
    assert cli("--config", str(cfg), "check", "pickleft.lae")[0] == EXIT_USAGE


def test_selftest_small():
    code, out, _ = cli("--seed", "3", "selftest", "--count", "10")
    assert code == EXIT_OK
    assert all(line.startswith("PASS") for line in out.splitlines() if line.startswith(("PASS", "FAIL")))


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "loceff.cli", "run", "pickleft.lae", "--term", "demo"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.strip() == "return true"
