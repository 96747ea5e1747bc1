"""Loading programs together with their imports and proof files."""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

from .logic.proof import ProofChecker
from .logic.respects import LogicOracle, ProofEvidence
from .logic.script import ProofFile, Theorem, read_proof_file
from .parser import ParseError, Program, parse_program
from .syntax import Forall, Formula
from .typecheck import Checker, check_program


class LoadError(OSError):
    pass


@dataclass
class Loaded:
    program: Program
    evidence: dict[str, ProofEvidence] = field(default_factory=dict)
    theorems: dict[str, Theorem] = field(default_factory=dict)
    files: list[Path] = field(default_factory=list)

    def oracle(self, logic: str = "pred") -> LogicOracle:
        return LogicOracle(self.evidence, logic, self.closed_theorems())

    def checker(self, logic: str = "pred") -> Checker:
        return Checker(self.program.signature, self.oracle(logic))

    def closed_theorems(self) -> dict[str, Formula]:
        return {n: closed_formula(t) for n, t in self.theorems.items()}

    def check(self, logic: str = "pred"):
        """Check proof-file theorems, then every definition of the program."""
        checker = self.checker(logic)
        check_theorems(self, checker, logic)
        return check_program(self.program, checker=checker)


def closed_formula(th: Theorem) -> Formula:
    phi = th.formula
    for x, a in reversed(th.ctx):
        phi = Forall(x, a, phi)
    return phi


def check_theorems(loaded: Loaded, checker: Checker, logic: str = "pred") -> None:
    """Check theorems in file order; each may cite the ones before it."""
    done: dict[str, Formula] = {}
    for name, th in loaded.theorems.items():
        pc = ProofChecker(checker, logic, done, loaded.program.equations)
        pc.check(dict(th.ctx), {}, th.proof, th.formula)
        done[name] = closed_formula(th)


def corpus_dir() -> Path:
    return Path(str(resources.files("loceff") / "corpus"))


def resolve(path: str | Path) -> Path:
    """An existing path, or a file of the shipped corpus with the same name."""
    p = Path(path)
    if p.exists():
        return p
    shipped = corpus_dir() / p.name
    if shipped.exists():
        return shipped
    raise LoadError(f"no such file: {path}")


def load(path: str | Path, program: Optional[Program] = None) -> Loaded:
    path = resolve(path)
    loaded = Loaded(program if program is not None else Program(path=path))
    proofs: list[Path] = []
    _load_into(loaded, path, set(), proofs)
    for pf in proofs:
        _read_proofs(loaded, pf)
    return loaded


def load_text(text: str, source: str = "<input>", base: Optional[Path] = None) -> Loaded:
    loaded = Loaded(Program())
    proofs: list[Path] = []
    _parse(loaded, text, source, base or Path("."), set(), proofs)
    for pf in proofs:
        _read_proofs(loaded, pf)
    return loaded


def _read(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as e:
        raise LoadError(f"cannot read {path}: {e.strerror}") from None


def _load_into(loaded: Loaded, path: Path, seen: set[Path], proofs: list[Path]) -> None:
    key = path.resolve()
    if key in seen:
        return
    seen.add(key)
    loaded.files.append(path)
    _parse(loaded, _read(path), str(path), path.parent, seen, proofs)


def _parse(loaded: Loaded, text: str, source: str, base: Path, seen: set[Path], proofs: list[Path]) -> None:
    prog = loaded.program
    outer = prog.on_import

    def on_import(name: str) -> None:
        target = base / name
        if not target.exists():
            target = resolve(name)
        if target.suffix == ".laeproof":
            if target.resolve() not in {p.resolve() for p in proofs}:
                proofs.append(target)
        else:
            _load_into(loaded, target, seen, proofs)

    prog.on_import = on_import
    try:
        parse_program(text, source, prog)
    finally:
        prog.on_import = outer


def _read_proofs(loaded: Loaded, path: Path) -> None:
    pf: ProofFile = read_proof_file(_read(path), loaded.program, str(path))
    loaded.files.append(path)
    for name, ev in pf.evidence.items():
        if name in loaded.evidence:
            raise ParseError(f"evidence {name} defined in two proof files", ev.span, str(path))
        loaded.evidence[name] = ev
    for name, th in pf.theorems.items():
        if name in loaded.theorems:
            raise ParseError(f"theorem {name} defined in two proof files", th.span, str(path))
        loaded.theorems[name] = th
