"""Command-line front end: ``loceff <subcommand> ...``.

Exit codes: 0 success or ``yes``, 1 a negative verdict or a diagnostic,
2 ``unknown``, 64 usage errors, 66 unreadable files, 70 internal errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import traceback
from dataclasses import replace
from typing import Optional, Sequence, TextIO

from . import properties
from .config import Config, ConfigError, load_config
from .equivalence import Related, RefutedWithinBound, UniverseTooLarge, tree_equiv, tree_oracle
from .freemodel import FF, STAR, TT, denote_comp, ground_values, show_tree
from .interpreter import FuelExhausted, Stuck, run
from .loader import Loaded, LoadError, check_theorems, closed_formula, load, resolve
from .logic.proof import ProofError
from .logic.respects import LOGICS, check_respects
from .logic.script import read_proof_file
from .parser import ParseError, parse_comp, parse_formula, parse_type
from .printer import show
from .syntax import Auto, ByName, Comp, CompT, FunT, Handler, HandlerT, TIf, TOp, Template
from .typecheck import No, TypeCheckError, Unknown, Yes

EXIT_OK, EXIT_NO, EXIT_UNKNOWN = 0, 1, 2
EXIT_USAGE, EXIT_NOINPUT, EXIT_SOFTWARE = 64, 66, 70

DIAGNOSTICS = (ParseError, TypeCheckError, ProofError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


class Output:
    """Human-readable lines or one JSON record per diagnostic and verdict."""

    def __init__(self, json_mode: bool, out: TextIO, err: TextIO):
        self.json = json_mode
        self.out = out
        self.err = err

    def line(self, text: str) -> None:
        if not self.json:
            print(text, file=self.out)

    def record(self, kind: str, text: str, **fields) -> None:
        if self.json:
            print(json.dumps({"kind": kind, **fields, "message": text}, default=str), file=self.out)
        else:
            print(text, file=self.out)

    def diagnostic(self, e: Exception, source: Optional[str] = None) -> None:
        span = getattr(e, "span", None)
        source = getattr(e, "source", None) or source
        code = getattr(e, "code", type(e).__name__)
        message = getattr(e, "message", str(e))
        if self.json:
            rec = {
                "kind": "diagnostic",
                "code": code,
                "file": source,
                "line": span.line if span else None,
                "col": span.col if span else None,
                "message": message,
            }
            print(json.dumps(rec), file=self.out)
        else:
            where = f"{source}:{span}: " if span and source else f"{source}: " if source else ""
            print(f"{where}error[{code}]: {message}", file=self.err)


# --------------------------------------------------------------------------
# Helpers


def _loaded(args) -> Loaded:
    return load(args.file)


def _term_arg(loaded: Loaded, text: str) -> Comp:
    """A definition name, or an inline computation."""
    prog = loaded.program
    if text in prog.lets:
        t = prog.closed(prog.term(text))
    else:
        t = prog.closed(parse_comp(text, prog))
    if not isinstance(t, Comp):
        raise UsageError(f"{text} is a value, not a computation")
    return t


def _ctype(loaded: Loaded, text: str) -> CompT:
    ty = parse_type(text, loaded.program)
    return ty if isinstance(ty, CompT) else CompT(ty)


def _template_ops(t: Template) -> set[str]:
    match t:
        case TOp(op, _, _, body):
            return {op} | _template_ops(body)
        case TIf(_, a, b):
            return _template_ops(a) | _template_ops(b)
    return set()


def _auto_spec(text: str) -> Auto:
    if not text:
        return Auto()
    fields = {}
    for part in text.split(","):
        key, sep, value = part.partition("=")
        key = key.strip()
        if not sep or key not in ("depth", "steps"):
            raise UsageError(f"--auto expects depth=N,steps=N, got {text!r}")
        try:
            fields[key] = int(value)
        except ValueError:
            raise UsageError(f"--auto {key} must be an integer, got {value!r}") from None
        if fields[key] <= 0:
            raise UsageError(f"--auto {key} must be positive")
    return Auto(**fields)


def _verdict_exit(v) -> int:
    return {Yes: EXIT_OK, No: EXIT_NO, Unknown: EXIT_UNKNOWN}[type(v)]


# --------------------------------------------------------------------------
# Subcommands


def cmd_check(args, cfg: Config, o: Output) -> int:
    loaded = _loaded(args)
    types = loaded.check(args.logic)
    for name, ty in types.items():
        o.record("type", f"{name} : {show(ty)}", name=name, type=show(ty))
    o.record("verdict", f"ok: {len(types)} definitions checked", verdict="ok")
    return EXIT_OK


def cmd_run(args, cfg: Config, o: Output) -> int:
    loaded = _loaded(args)
    c = _term_arg(loaded, args.term)
    res = run(c, fuel=args.fuel, trace=args.trace)
    if args.trace:
        for t in res.trace:
            o.record("step", show(t), term=show(t))
    else:
        o.record("result", show(res.final), term=show(res.final), steps=res.steps)
    match res.result:
        case Stuck(reason, _):
            o.diagnostic(RuntimeError(f"stuck: {reason}"))
            return EXIT_NO
        case FuelExhausted(fuel, _):
            o.diagnostic(RuntimeError(f"no normal form within {fuel} steps"))
            return EXIT_NO
    return EXIT_OK


def cmd_denote(args, cfg: Config, o: Output) -> int:
    loaded = _loaded(args)
    types = loaded.check(args.logic)
    c = _term_arg(loaded, args.term)
    if args.type:
        ty = _ctype(loaded, args.type)
    elif args.term in types and isinstance(types[args.term], CompT):
        ty = types[args.term]
    else:
        raise UsageError(f"give --type for {args.term}")
    loaded.checker(args.logic).check_comp({}, c, ty)
    tree = denote_comp(None, c, ty, {}, loaded.program.signature)
    o.record("tree", show_tree(tree), tree=show_tree(tree))
    return EXIT_OK


def cmd_equiv(args, cfg: Config, o: Output) -> int:
    loaded = _loaded(args)
    ty = _ctype(loaded, args.type)
    checker = loaded.checker(args.logic)
    checker.wf_type(ty)
    trees = []
    for text in (args.term1, args.term2):
        c = _term_arg(loaded, text)
        checker.check_comp({}, c, ty)
        trees.append(denote_comp(None, c, ty, {}, loaded.program.signature))
    t1, t2 = trees
    steps = args.steps or cfg.step_bound
    size_bound = cfg.size_factor * max(t1.size, t2.size)
    v = tree_equiv(t1, t2, ty.theory, ty.sig, step_bound=steps, size_bound=size_bound, universe_cap=cfg.universe_cap)
    if isinstance(v, Related):
        o.record("verdict", f"related in {len(v.path)} steps", verdict="related", steps=len(v.path))
        o.line(f"  {show_tree(t1)}")
        for s in v.path:
            o.record("witness", f"  ~ {s}\n  {show_tree(s.after)}", step=str(s), tree=show_tree(s.after))
        return EXIT_OK
    if args.depth is not None:
        depth = max(args.depth, t1.depth, t2.depth)
        try:
            oracle = tree_oracle(ty.theory, ty.sig, depth, _leaves(ty), cfg.universe_cap)
        except UniverseTooLarge as e:
            o.record("verdict", f"unknown: {e}", verdict="unknown")
            return EXIT_UNKNOWN
        if not oracle.related(t1, t2):
            v = RefutedWithinBound({"steps": steps, "oracle_depth": depth}, "oracle keeps the trees apart")
    if isinstance(v, RefutedWithinBound):
        o.record("verdict", f"{v}: {v.detail}", verdict="not related", detail=v.detail)
        o.line(f"  {show_tree(t1)}\n  {show_tree(t2)}")
        return EXIT_NO
    o.record("verdict", f"{v}: {v.detail}", verdict="unknown", detail=v.detail)
    return EXIT_UNKNOWN


def _leaves(ty: CompT):
    return tuple(ground_values(ty.value))


def cmd_verify(args, cfg: Config, o: Output) -> int:
    loaded = _loaded(args)
    prog = loaded.program
    if args.handler not in prog.lets:
        raise UsageError(f"no definition named {args.handler}")
    h = prog.closed(prog.term(args.handler))
    if not isinstance(h, Handler):
        raise UsageError(f"{args.handler} is not a handler literal")
    if args.type:
        ht = parse_type(args.type, prog)
    else:
        ht = prog.lets[args.handler].type
    if not isinstance(ht, HandlerT):
        raise UsageError(f"give --type for {args.handler}; its definition has no handler type")
    src, dst = ht.src, ht.dst
    if args.theory:
        try:
            theory = prog.theory(*[n.strip() for n in args.theory.split(",") if n.strip()])
        except KeyError as e:
            raise UsageError(f"unknown theory or equation {e}") from None
        src = CompT(src.value, src.sig, theory)
    checker = loaded.checker(args.logic)
    checker.wf_type(HandlerT(src, dst))
    checker.check_comp({h.ret_param: src.value}, h.ret_body, dst)
    checker.check_clauses({}, h.clauses, src.sig, dst, h.span)
    if args.auto is not None:
        evidence = _auto_spec(args.auto)
    else:
        match h.evidence:
            case ByName(name):
                evidence = loaded.evidence.get(name)
                if evidence is None:
                    o.record("verdict", f"unknown: no evidence named {name}", verdict="unknown")
                    return EXIT_UNKNOWN
            case Auto() as a:
                evidence = a
            case _:
                evidence = None
    try:
        v = check_respects(h, src.theory, src.sig, dst, evidence, args.logic, checker, {}, loaded.closed_theorems())
    except ProofError as e:
        o.diagnostic(e)
        o.record("verdict", f"unknown: the proof was rejected ({e.code})", verdict="unknown")
        return EXIT_UNKNOWN
    subject = f"{args.handler} : {show(HandlerT(src, dst))}"
    match v:
        case Yes(detail):
            o.record("verdict", f"yes: {subject} ({detail})", verdict="yes")
        case No(cex, detail):
            zs = {}
            eq = src.theory.by_label(getattr(cex, "label", ""))
            if eq is not None:
                zs = {z: FunT(b, dst) for z, b in eq.template_ctx}
            text = cex.describe(zs) if hasattr(cex, "describe") else detail
            o.record("verdict", f"no: {subject}\ncounterexample: {text}", verdict="no", counterexample=text)
        case Unknown(detail):
            o.record("verdict", f"unknown: {subject} ({detail})", verdict="unknown")
    return _verdict_exit(v)


def cmd_prove(args, cfg: Config, o: Output) -> int:
    loaded = _loaded(args)
    path = resolve(args.proof)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise LoadError(f"cannot read {path}: {e.strerror}") from None
    pf = read_proof_file(text, loaded.program, str(path))
    for name, ev in pf.evidence.items():
        loaded.evidence.setdefault(name, ev)
    for name, th in pf.theorems.items():
        if name in loaded.theorems:
            raise ParseError(f"theorem {name} is already defined", th.span, str(path))
        loaded.theorems[name] = th
    checker = loaded.checker(args.logic)
    try:
        check_theorems(loaded, checker, args.logic)
    except ProofError as e:
        e.source = str(path)
        raise
    for name in pf.theorems:
        o.record("theorem", f"theorem {name}: proved", theorem=name)
    status = EXIT_OK
    if args.goal is not None:
        goal = parse_formula(args.goal, loaded.program)
        names = [args.theorem] if args.theorem else list(pf.theorems)
        if len(names) != 1 or names[0] not in pf.theorems:
            raise UsageError("--goal needs --theorem when the file does not state exactly one theorem")
        th = pf.theorems[names[0]]
        if goal not in (th.formula, closed_formula(th)):
            o.diagnostic(ProofError(f"theorem {th.name} proves {show(closed_formula(th))}, not the stated goal {show(goal)}", th.span), str(path))
            return EXIT_NO
        o.record("verdict", f"goal proved by theorem {th.name}", verdict="yes")
    prog = loaded.program
    for lname, let in prog.lets.items():
        h = prog.closed(let.term)
        if not (isinstance(h, Handler) and isinstance(h.evidence, ByName) and h.evidence.name in pf.evidence):
            continue
        if not isinstance(let.type, HandlerT):
            continue
        ev = pf.evidence[h.evidence.name]
        v = check_respects(h, let.type.src.theory, let.type.src.sig, let.type.dst, ev, args.logic, checker, {}, loaded.closed_theorems())
        o.record("verdict", f"evidence {ev.name} for {lname}: {type(v).__name__.lower()} ({v.detail})", verdict=type(v).__name__.lower())
        status = max(status, _verdict_exit(v))
    return status


def cmd_oracle(args, cfg: Config, o: Output) -> int:
    loaded = _loaded(args)
    prog = loaded.program
    try:
        theory = prog.theory(*[n.strip() for n in args.theory.split(",") if n.strip()])
    except KeyError as e:
        raise UsageError(f"unknown theory or equation {e}") from None
    ops = set()
    for eq in theory:
        ops |= _template_ops(eq.lhs) | _template_ops(eq.rhs)
    if args.ops:
        ops = {x.strip() for x in args.ops.split(",") if x.strip()}
    unknown = sorted(ops - set(prog.signature.names))
    if unknown:
        raise UsageError(f"undeclared operations {unknown}")
    sig = prog.signature.restrict(ops)
    leaves = {"bool": (FF, TT), "unit": (STAR,)}[args.leaves]
    depth = args.depth if args.depth is not None else cfg.oracle_depth
    try:
        oracle = tree_oracle(theory, sig, depth, leaves, cfg.universe_cap)
    except UniverseTooLarge as e:
        o.record("verdict", f"unknown: {e}", verdict="unknown")
        return EXIT_UNKNOWN
    classes = oracle.partition()
    shown = classes if args.all else [c for c in classes if len(c) > 1]
    o.record(
        "universe",
        f"theory {theory} over {sig} with leaves {args.leaves}, depth {depth}: "
        f"{oracle.size} trees, {len(classes)} classes, {oracle.instances} equation instances",
        trees=oracle.size,
        classes=len(classes),
        instances=oracle.instances,
    )
    for i, cls in enumerate(shown):
        trees = [show_tree(t) for t in cls]
        o.record("class", f"class {i}: " + " ~ ".join(trees), trees=trees)
    return EXIT_OK


def cmd_selftest(args, cfg: Config, o: Output) -> int:
    if args.count is not None:
        cfg = replace(cfg, corpus_count=args.count, adequacy_count=max(1, args.count // 2), square_count=max(1, args.count // 5))
    o.line(f"selftest with seed {cfg.seed}")
    reports = []

    def report(r: properties.Report) -> None:
        reports.append(r)
        o.record("suite", r.line(), **r.record())
        for f in r.failures[:5]:
            o.line(f"    {f}")

    properties.run_all(cfg, report)
    failed = [r for r in reports if not r.ok]
    o.record("verdict", f"{len(reports) - len(failed)} of {len(reports)} suites passed", verdict="ok" if not failed else "failed")
    return EXIT_OK if not failed else EXIT_NO


# --------------------------------------------------------------------------
# Entry point


def build_parser() -> argparse.ArgumentParser:
    def global_options(default):
        g = _Parser(add_help=False)
        g.add_argument("--json-diagnostics", action="store_true", default=default(False), help="emit one JSON record per diagnostic or verdict")
        g.add_argument("--config", metavar="FILE", default=default(None), help="JSON file with bounds, seed and output format")
        g.add_argument("--seed", type=int, default=default(None), help="random seed (overrides LOCEFF_SEED and the config file)")
        return g

    # options may come before or after the subcommand; the subcommand copy
    # must not reset a value given before it
    top = global_options(lambda v: v)
    common = global_options(lambda v: argparse.SUPPRESS)
    logic = _Parser(add_help=False)
    logic.add_argument("--logic", choices=LOGICS, default="pred", help="logic used for respects evidence (default pred)")

    p = _Parser(prog="loceff", description="Effect handlers with local equational theories.", parents=[top])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("check", parents=[common, logic], help="typecheck a program and its evidence")
    s.add_argument("file")
    s.set_defaults(fn=cmd_check)

    s = sub.add_parser("run", parents=[common], help="evaluate a named computation")
    s.add_argument("file")
    s.add_argument("--term", required=True)
    s.add_argument("--trace", action="store_true", help="print every intermediate term")
    s.add_argument("--fuel", type=int, default=None, help="maximum number of steps")
    s.set_defaults(fn=cmd_run)

    s = sub.add_parser("denote", parents=[common, logic], help="print the tree denoted by a computation")
    s.add_argument("file")
    s.add_argument("--term", required=True)
    s.add_argument("--type", help="computation type (defaults to the definition's type)")
    s.set_defaults(fn=cmd_denote)

    s = sub.add_parser("equiv", parents=[common, logic], help="search for an equivalence between two computations")
    s.add_argument("file")
    s.add_argument("--type", required=True)
    s.add_argument("term1")
    s.add_argument("term2")
    s.add_argument("--depth", type=int, help="oracle depth consulted when the search fails")
    s.add_argument("--steps", type=int, help="search bound on expanded trees")
    s.set_defaults(fn=cmd_equiv)

    s = sub.add_parser("verify", parents=[common, logic], help="decide whether a handler respects a theory")
    s.add_argument("file")
    s.add_argument("--handler", required=True)
    s.add_argument("--type", help="handler type (defaults to the definition's type)")
    s.add_argument("--theory", help="comma-separated theories or equation labels replacing the source theory")
    s.add_argument("--auto", nargs="?", const="", metavar="depth=N,steps=N", help="use the bounded semantic check")
    s.set_defaults(fn=cmd_verify)

    s = sub.add_parser("prove", parents=[common, logic], help="check a proof file against a program")
    s.add_argument("file")
    s.add_argument("proof")
    s.add_argument("--theorem", help="theorem whose statement is compared with --goal")
    s.add_argument("--goal", help="formula the theorem must state")
    s.set_defaults(fn=cmd_prove)

    s = sub.add_parser("oracle", parents=[common], help="print the equivalence classes of a theory up to a depth")
    s.add_argument("file")
    s.add_argument("--theory", required=True)
    s.add_argument("--depth", type=int)
    s.add_argument("--ops", help="comma-separated operations (default: those in the theory)")
    s.add_argument("--leaves", choices=("bool", "unit"), default="bool")
    s.add_argument("--all", action="store_true", help="also print singleton classes")
    s.set_defaults(fn=cmd_oracle)

    s = sub.add_parser("selftest", parents=[common], help="run the property suites on generated terms")
    s.add_argument("--count", type=int, help="size of the generated corpus")
    s.set_defaults(fn=cmd_selftest)
    return p


def main(argv: Optional[Sequence[str]] = None, out: TextIO = None, err: TextIO = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    o = Output(False, out, err)
    args = None
    try:
        args = build_parser().parse_args(argv)
        o.json = args.json_diagnostics
        cfg = load_config(args.config, seed=args.seed, output="json" if args.json_diagnostics else None)
        o.json = cfg.output == "json"
        for name in ("fuel", "steps", "depth", "count"):
            v = getattr(args, name, None)
            if v is not None and v <= 0:
                raise UsageError(f"--{name} must be positive")
        return args.fn(args, cfg, o)
    except UsageError as e:
        print(str(e), file=err)
        return EXIT_USAGE
    except ConfigError as e:
        print(f"loceff: configuration error: {e}", file=err)
        return EXIT_USAGE
    except (LoadError, FileNotFoundError) as e:
        print(f"loceff: {e}", file=err)
        return EXIT_NOINPUT
    except DIAGNOSTICS as e:
        o.diagnostic(e, getattr(e, "source", None) or getattr(args, "file", None))
        return EXIT_NO
    except SystemExit as e:  # argparse --help
        return int(e.code or 0)
    except Exception:  # noqa: BLE001 - internal invariant violation
        traceback.print_exc(file=err)
        return EXIT_SOFTWARE


if __name__ == "__main__":
    sys.exit(main())
