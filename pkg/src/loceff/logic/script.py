"""Reader for ``.laeproof`` files: one proof node per line, indentation for sub-proofs.

Layout::

    type D = unit!{yield}/{yieldOrder}
    evidence NAME
      equation LABEL [(f1, f2)]
        <proof>
    theorem NAME [(x : A, ...)] : <formula>
      <proof>

Proof lines start with a rule name followed by its arguments, for example
``beta_apply``, ``inherit yieldOrder [x := a, y := b, z := k]``,
``forallE ()`` or ``induction ?c on f1 () at D``.  Inside ``calc`` the lines
alternate between terms and ``= <rule>`` justifications; ``rev <rule>``
applies a rule right to left.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..parser import ParseError, Parser, Program
from ..syntax import CompT, Formula, Span, ValueType
from .proof import (
    BETA_RULES,
    CONG_KINDS,
    ETA_RULES,
    AndE,
    AndI,
    Beta,
    Calc,
    Cong,
    Eta,
    ExistsE,
    ExistsI,
    FalsityE,
    ForallE,
    ForallI,
    Have,
    Hyp,
    ImplE,
    ImplI,
    Induction,
    Inherit,
    OpCase,
    OrE,
    OrI,
    Proof,
    Refl,
    SubstEq,
    Sym,
    Trans,
    TruthI,
    Use,
)
from .respects import EquationProof, ProofEvidence


@dataclass
class Line:
    number: int
    col: int
    text: str
    children: list[Line] = field(default_factory=list)

    @property
    def span(self) -> Span:
        return Span(self.number, self.col)


@dataclass(frozen=True)
class Theorem:
    name: str
    ctx: tuple[tuple[str, ValueType], ...]
    formula: Formula
    proof: Proof
    span: Optional[Span] = field(default=None, compare=False)


@dataclass
class ProofFile:
    evidence: dict[str, ProofEvidence] = field(default_factory=dict)
    theorems: dict[str, Theorem] = field(default_factory=dict)
    path: Optional[str] = None


def _lines(text: str, source: Optional[str]) -> list[Line]:
    roots: list[Line] = []
    stack: list[tuple[int, Line]] = []
    for i, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].rstrip()
        if not body.strip():
            continue
        if "\t" in body[: len(body) - len(body.lstrip())]:
            raise ParseError("tabs are not allowed in indentation", Span(i, 1), source)
        indent = len(body) - len(body.lstrip(" "))
        line = Line(i, indent + 1, body.strip())
        while stack and stack[-1][0] >= indent:
            stack.pop()
        (stack[-1][1].children if stack else roots).append(line)
        stack.append((indent, line))
    return roots


class ScriptReader:
    def __init__(self, program: Program, source: Optional[str] = None):
        self.prog = program
        self.source = source

    # -- plumbing ----------------------------------------------------------

    def parser(self, line: Line, offset: int = 0) -> Parser:
        text = line.text[offset:]
        pad = "\n" * (line.number - 1) + " " * (line.col - 1 + offset)
        return Parser(pad + text, self.prog, self.source)

    def error(self, msg: str, line: Line) -> ParseError:
        return ParseError(msg, line.span, self.source)

    def kids(self, line: Line, n: int) -> list[Line]:
        if len(line.children) != n:
            raise self.error(f"expected {n} indented sub-proof{'s' if n != 1 else ''}, found {len(line.children)}", line)
        return line.children

    # -- files ---------------------------------------------------------------

    def read(self, text: str) -> ProofFile:
        out = ProofFile(path=self.source)
        for line in _lines(text, self.source):
            head = line.text.split(None, 1)[0]
            if head == "type":
                p = self.parser(line)
                p.program()
            elif head == "evidence":
                ev = self.evidence(line)
                if ev.name in out.evidence:
                    raise self.error(f"evidence {ev.name} defined twice", line)
                out.evidence[ev.name] = ev
            elif head == "theorem":
                th = self.theorem(line)
                if th.name in out.theorems:
                    raise self.error(f"theorem {th.name} defined twice", line)
                out.theorems[th.name] = th
            else:
                raise self.error(f"expected 'evidence', 'theorem' or 'type', found {head!r}", line)
        return out

    def evidence(self, line: Line) -> ProofEvidence:
        p = self.parser(line)
        p.ident()
        name = p.ident("evidence name")
        p.done()
        eqs = []
        for child in line.children:
            q = self.parser(child)
            if q.tok.text != "equation":
                raise self.error("expected 'equation LABEL'", child)
            q.advance()
            label = q.ident("equation label")
            names = None
            if q.accept("("):
                names = []
                while not q.at(")"):
                    names.append(q.binder())
                    if not q.accept(","):
                        break
                q.expect(")")
                names = tuple(names)
            q.done()
            (body,) = self.kids(child, 1)
            eqs.append(EquationProof(label, self.proof(body), names, span=child.span))
        return ProofEvidence(name, tuple(eqs), span=line.span)

    def theorem(self, line: Line) -> Theorem:
        p = self.parser(line)
        p.ident()
        name = p.ident("theorem name")
        ctx = []
        if p.accept("("):
            while not p.at(")"):
                x = p.binder()
                p.expect(":")
                ctx.append((x, p.value_type()))
                if not p.accept(","):
                    break
            p.expect(")")
        p.expect(":")
        phi = p.formula()
        p.done()
        (body,) = self.kids(line, 1)
        return Theorem(name, tuple(ctx), phi, self.proof(body), span=line.span)

    # -- proofs ----------------------------------------------------------------

    def proof(self, line: Line) -> Proof:
        p = self.parser(line)
        return self.node(p, line, line.children)

    def node(self, p: Parser, line: Line, kids: list[Line]) -> Proof:
        tok = p.tok
        if tok.kind not in ("ident", "kw"):
            raise self.error(f"expected a rule name, found {tok}", line)
        head = p.advance().text
        span = tok.span

        def sub(n: int) -> list[Proof]:
            if len(kids) != n:
                raise self.error(f"{head} expects {n} indented sub-proof{'s' if n != 1 else ''}, found {len(kids)}", line)
            return [self.proof(k) for k in kids]

        def end() -> None:
            p.done()

        if head in ("sym", "rev"):
            if p.tok.kind != "eof":
                return Sym(self.node(p, line, kids), span=span)
            (q,) = sub(1)
            return Sym(q, span=span)
        if head == "refl":
            end()
            sub(0)
            return Refl(span=span)
        if head == "trans":
            mid = p.term()
            end()
            q1, q2 = sub(2)
            return Trans(mid, q1, q2, span=span)
        if head == "calc":
            end()
            return self.calc(line, kids, span)
        if head.startswith("beta_") and head[5:] in BETA_RULES:
            end()
            sub(0)
            return Beta(head[5:], span=span)
        if head.startswith("eta_") and head[4:] in ETA_RULES:
            end()
            sub(0)
            return Eta(head[4:], span=span)
        if head.startswith("cong_") and head[5:] in CONG_KINDS:
            end()
            return Cong(head[5:], tuple(self.proof(k) for k in kids), span=span)
        if head == "subst":
            x = p.binder()
            p.expect(":")
            a = p.value_type()
            self._word(p, "from")
            v1 = p.value()
            self._word(p, "to")
            v2 = p.value()
            p.expect("in")
            body = p.term()
            end()
            (q,) = sub(1)
            return SubstEq(x, a, body, v1, v2, q, span=span)
        if head == "inherit":
            label = p.ident("equation label")
            binds: list[tuple[str, object]] = []
            while p.accept("["):
                while not p.at("]"):
                    x = p.binder()
                    p.expect(":")
                    p.expect("=")
                    binds.append((x, p.value()))
                    if not p.accept(","):
                        break
                p.expect("]")
            end()
            sub(0)
            eq = self.prog.equations.get(label)
            zs = {z for z, _ in eq.template_ctx} if eq is not None else set()
            vals = tuple((x, v) for x, v in binds if x not in zs)
            fns = tuple((x, v) for x, v in binds if x in zs)
            return Inherit(label, vals, fns, span=span)
        if head == "hyp":
            if p.tok.kind == "int":
                ref: object = int(p.advance().text)
            else:
                ref = p.ident("hypothesis name")
            end()
            sub(0)
            return Hyp(ref, span=span)
        if head == "use":
            name = p.ident("theorem name")
            end()
            sub(0)
            return Use(name, span=span)
        if head == "andI":
            end()
            return AndI(*sub(2), span=span)
        if head in ("andE1", "andE2"):
            end()
            return AndE(int(head[-1]), *sub(1), span=span)
        if head in ("orI1", "orI2"):
            end()
            return OrI(int(head[-1]), *sub(1), span=span)
        if head == "orE":
            n1, n2 = p.ident(), p.ident()
            end()
            q, q1, q2 = sub(3)
            return OrE(q, n1, q1, n2, q2, span=span)
        if head == "implI":
            name = p.ident("hypothesis name")
            end()
            return ImplI(name, *sub(1), span=span)
        if head == "implE":
            end()
            return ImplE(*sub(2), span=span)
        if head == "forallI":
            x = p.binder()
            end()
            return ForallI(x, *sub(1), span=span)
        if head == "forallE":
            v = p.value()
            end()
            return ForallE(*sub(1), v, span=span)
        if head == "existsI":
            v = p.value()
            end()
            return ExistsI(v, *sub(1), span=span)
        if head == "existsE":
            x, name = p.binder(), p.ident("hypothesis name")
            end()
            q, body = sub(2)
            return ExistsE(q, x, name, body, span=span)
        if head == "truthI":
            end()
            sub(0)
            return TruthI(span=span)
        if head == "falsityE":
            end()
            return FalsityE(*sub(1), span=span)
        if head == "have":
            name = p.ident("hypothesis name")
            p.expect(":")
            phi = p.formula()
            end()
            q, body = sub(2)
            return Have(name, phi, q, body, span=span)
        if head == "induction":
            return self.induction(p, line, kids, span)
        raise self.error(f"unknown rule {head!r}", line)

    def _word(self, p: Parser, word: str) -> None:
        if p.tok.text != word:
            raise p.error(repr(word))
        p.advance()

    def calc(self, line: Line, kids: list[Line], span: Span) -> Calc:
        terms, steps = [], []
        for k in kids:
            if k.text.startswith("="):
                if len(terms) != len(steps) + 1:
                    raise self.error("a justification must follow a term", k)
                p = self.parser(k, 1)
                steps.append(self.node(p, k, k.children))
            else:
                if len(terms) != len(steps):
                    raise self.error("expected '= <rule>' between terms", k)
                text = " ".join([k.text] + [c.text for c in _flatten(k.children)])
                p = self.parser(Line(k.number, k.col, text))
                t = p.term()
                p.done()
                terms.append(t)
        if not terms or len(terms) != len(steps) + 1:
            raise self.error("calc must start and end with a term", line)
        return Calc(tuple(terms), tuple(steps), span=span)

    def induction(self, p: Parser, line: Line, kids: list[Line], span: Span) -> Induction:
        if p.tok.kind != "hole":
            raise p.error("hole name such as ?c")
        hole = p.advance().text[1:]
        self._word(p, "on")
        subject = p.comp()
        p.expect("at")
        ty = p.any_type()
        p.done()
        if not isinstance(ty, CompT):
            raise self.error(f"induction needs a computation type, found {ty}", line)
        schema = None
        base = None
        cases = []
        for k in kids:
            q = self.parser(k)
            word = q.tok.text
            if word == "schema":
                q.advance()
                schema = q.formula()
                q.done()
                if k.children:
                    raise self.error("schema takes no sub-proofs", k)
            elif word == "case":
                q.advance()
                if q.accept("return"):
                    x = q.binder()
                    q.done()
                    (body,) = self.kids(k, 1)
                    base = (x, self.proof(body))
                else:
                    op = q.ident("operation name")
                    x, kv, ih = q.binder(), q.binder(), q.ident("hypothesis name")
                    y = q.binder() if q.tok.kind == "ident" else "y"
                    q.done()
                    (body,) = self.kids(k, 1)
                    cases.append(OpCase(op, x, kv, ih, y, self.proof(body)))
            else:
                raise self.error("expected 'schema' or 'case' inside induction", k)
        if schema is None:
            raise self.error("induction needs a 'schema' line", line)
        if base is None:
            raise self.error("induction needs a 'case return x' block", line)
        return Induction(hole, schema, subject, ty, base[0], base[1], tuple(cases), span=span)


def _flatten(lines: list[Line]) -> list[Line]:
    out = []
    for l in lines:
        out.append(l)
        out.extend(_flatten(l.children))
    return out


def read_proof_file(text: str, program: Program, source: Optional[str] = None) -> ProofFile:
    return ScriptReader(program, source).read(text)
