"""Lexer and recursive-descent parser for ``.lae`` programs.

Grammar sketch (``c`` computations, ``v`` values, ``T`` templates)::

    program  ::= { signature {op : A -> B, ...}
                 | theory name { label: ctx |- T ~ T ... }
                 | type Name = type
                 | let name [: type] = term
                 | import "file" }
    c        ::= do x <- c in c | s [; c]
    s        ::= if v then c else c | with v handle c | return v
               | op(v; y. c) | op(v) | v v | (c) | ?hole
    v        ::= x | () | true | false | fun x -> c | handler { clauses } [by ev]
    type     ::= A | A -> C | C => C        C ::= A!{ops}[/{labels}]
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Union

from .syntax import (
    BOOL,
    UNIT,
    And,
    App,
    Auto,
    BoolLit,
    ByName,
    Clause,
    Comp,
    CompEq,
    CompT,
    Do,
    EMPTY_SIG,
    EMPTY_THEORY,
    Equation,
    Exists,
    Falsity,
    Forall,
    Formula,
    Fun,
    FunT,
    Handler,
    HandlerT,
    Hole,
    If,
    Implies,
    Op,
    Or,
    Return,
    Signature,
    Span,
    TApp,
    Template,
    Theory,
    TIf,
    TOp,
    Truth,
    Unit,
    Value,
    ValueEq,
    ValueType,
    Var,
    With,
    subst,
)


class ParseError(Exception):
    def __init__(self, message: str, span: Optional[Span] = None, source: Optional[str] = None):
        self.message = message
        self.span = span
        self.source = source
        where = f"{source or '<input>'}:{span}: " if span else ""
        super().__init__(where + message)


KEYWORDS = {
    "fun", "handler", "return", "do", "in", "if", "then", "else", "with", "handle", "by",
    "true", "false", "let", "type", "theory", "signature", "import", "unit", "bool",
    "forall", "exists", "at", "top", "bot",
}

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+|\#[^\n]*)
  | (?P<nl>\n)
  | (?P<string>"[^"\n]*")
  | (?P<int>\d+)
  | (?P<hole>\?[A-Za-z_][A-Za-z0-9_']*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<sym>==>|==|=>|->|<-|\|-|/\\|\\/|[(){};,.=|~!/:*\[\]])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    span: Span

    def __str__(self) -> str:
        return "end of input" if self.kind == "eof" else repr(self.text)


def tokenize(text: str, source: Optional[str] = None) -> list[Token]:
    toks: list[Token] = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", Span(line, col), source)
        kind = m.lastgroup
        s = m.group()
        if kind == "nl":
            line, col = line + 1, 1
        else:
            if kind != "ws":
                if kind == "ident" and s in KEYWORDS:
                    kind = "kw"
                toks.append(Token(kind, s, Span(line, col)))
            col += len(s)
        pos = m.end()
    toks.append(Token("eof", "", Span(line, col)))
    return toks


@dataclass(frozen=True)
class Let:
    name: str
    type: Optional[Union[ValueType, CompT]]
    term: Union[Value, Comp]
    span: Optional[Span] = None


@dataclass
class Program:
    """Declarations of a ``.lae`` file, in source order."""

    ops: dict[str, tuple[ValueType, ValueType]] = field(default_factory=dict)
    equations: dict[str, Equation] = field(default_factory=dict)
    theories: dict[str, Theory] = field(default_factory=dict)
    types: dict[str, Union[ValueType, CompT]] = field(default_factory=dict)
    lets: dict[str, Let] = field(default_factory=dict)
    imports: list[str] = field(default_factory=list)
    path: Optional[Path] = None
    # called with each imported file name as soon as the import is parsed
    on_import: Optional[Callable[[str], None]] = field(default=None, repr=False, compare=False)

    @property
    def signature(self) -> Signature:
        return Signature.of(self.ops)

    def theory(self, *names: str) -> Theory:
        """Resolve theory names and equation labels to a theory."""
        eqs: set[Equation] = set()
        for n in names:
            if n in self.theories:
                eqs |= self.theories[n].equations
            elif n in self.equations:
                eqs.add(self.equations[n])
            else:
                raise KeyError(n)
        return Theory(frozenset(eqs))

    def term(self, name: str):
        return self.lets[name].term

    def closed(self, term):
        """Substitute top-level value definitions for free variables of ``term``."""
        env: dict[str, Value] = {}
        for name, let in self.lets.items():
            if isinstance(let.term, Value):
                env[name] = subst(let.term, env)
        return subst(term, env)


class Parser:
    def __init__(self, text: str, program: Optional[Program] = None, source: Optional[str] = None):
        self.source = source
        self.toks = tokenize(text, source)
        self.i = 0
        self.prog = program if program is not None else Program()

    # -- token plumbing ----------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str, k: int = 0) -> bool:
        t = self.peek(k) if k else self.tok
        return t.kind in ("kw", "sym") and t.text == text

    def error(self, expected: str, tok: Optional[Token] = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(f"expected {expected}, found {tok}", tok.span, self.source)

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error(repr(text))
        return self.advance()

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def ident(self, what: str = "identifier") -> str:
        if self.tok.kind != "ident":
            raise self.error(what)
        return self.advance().text

    def binder(self) -> str:
        return self.ident("binder")

    def done(self) -> None:
        if self.tok.kind != "eof":
            raise self.error("end of input")

    # -- programs ------------------------------------------------------------

    def program(self) -> Program:
        while self.tok.kind != "eof":
            if self.at("signature"):
                self.signature_decl()
            elif self.at("theory"):
                self.theory_decl()
            elif self.at("type"):
                self.advance()
                name = self.ident("type name")
                self.expect("=")
                self.prog.types[name] = self.any_type()
            elif self.at("let"):
                self.let_decl()
            elif self.at("import"):
                self.advance()
                if self.tok.kind != "string":
                    raise self.error("file name string")
                name = self.advance().text[1:-1]
                self.prog.imports.append(name)
                if self.prog.on_import is not None:
                    self.prog.on_import(name)
            else:
                raise self.error("'signature', 'theory', 'type', 'let' or 'import'")
            self.accept(";")
        return self.prog

    def signature_decl(self) -> None:
        self.expect("signature")
        self.expect("{")
        while not self.at("}"):
            tok = self.tok
            op = self.ident("operation name")
            self.expect(":")
            a = self.value_type_atom()
            self.expect("->")
            b = self.value_type_atom()
            if op in self.prog.ops and self.prog.ops[op] != (a, b):
                raise ParseError(f"operation {op} redeclared with a different type", tok.span, self.source)
            self.prog.ops[op] = (a, b)
            if not self.accept(","):
                break
        self.expect("}")

    def theory_decl(self) -> None:
        self.expect("theory")
        tok = self.tok
        name = self.ident("theory name")
        if name in self.prog.theories:
            raise ParseError(f"theory {name} declared twice", tok.span, self.source)
        self.expect("{")
        eqs = []
        while not self.at("}"):
            eqs.append(self.equation())
            self.accept(";")
        self.expect("}")
        self.prog.theories[name] = Theory(frozenset(eqs))

    def equation(self) -> Equation:
        tok = self.tok
        label = self.ident("equation label")
        if label in self.prog.equations or label in self.prog.theories:
            raise ParseError(f"equation label {label} already declared", tok.span, self.source)
        self.expect(":")
        vctx, zctx = [], []
        names: set[str] = set()
        while not self.at("|-"):
            etok = self.tok
            x = self.ident("context variable")
            self.expect(":")
            a = self.value_type_atom()
            if self.at("->") and self.at("*", 1):
                self.advance()
                self.advance()
                target = zctx
            else:
                if self.at("->"):
                    self.advance()
                    a = FunT(a, self.comp_type())
                target = vctx
            if x in names:
                raise ParseError(f"duplicate context variable {x}", etok.span, self.source)
            names.add(x)
            target.append((x, a))
            if not (self.accept(",") or self.accept(";")):
                break
        self.expect("|-")
        lhs = self.template()
        self.expect("~")
        rhs = self.template()
        eq = Equation(tuple(vctx), tuple(zctx), lhs, rhs, label, span=tok.span)
        self.prog.equations[label] = eq
        return eq

    def let_decl(self) -> None:
        tok = self.expect("let")
        name = self.ident("name")
        ty = None
        if self.accept(":"):
            ty = self.any_type()
        self.expect("=")
        term = self.term()
        if name in self.prog.lets:
            raise ParseError(f"{name} defined twice", tok.span, self.source)
        self.prog.lets[name] = Let(name, ty, term, tok.span)

    # -- types -----------------------------------------------------------------

    def value_type_atom(self) -> Union[ValueType, CompT]:
        tok = self.tok
        if self.accept("unit"):
            return UNIT
        if self.accept("bool"):
            return BOOL
        if self.accept("("):
            t = self.any_type()
            self.expect(")")
            return t
        if tok.kind == "ident":
            self.advance()
            if tok.text in self.prog.types:
                return self.prog.types[tok.text]
            raise ParseError(f"unknown type {tok.text}", tok.span, self.source)
        raise self.error("type")

    def braced_names(self) -> list[tuple[str, Token]]:
        self.expect("{")
        out = []
        while not self.at("}"):
            tok = self.tok
            out.append((self.ident("name"), tok))
            if not self.accept(","):
                break
        self.expect("}")
        return out

    def comp_suffix(self, a) -> CompT:
        """Parse ``!{ops}[/{labels}]`` after the value part of a computation type."""
        if isinstance(a, CompT):
            raise self.error("value type before '!'")
        self.expect("!")
        ops = []
        for op, tok in self.braced_names():
            if op not in self.prog.ops:
                raise ParseError(f"undeclared operation {op} in signature", tok.span, self.source)
            ops.append((op, *self.prog.ops[op]))
        theory = EMPTY_THEORY
        if self.accept("/"):
            names = self.braced_names()
            for n, tok in names:
                if n not in self.prog.theories and n not in self.prog.equations:
                    raise ParseError(f"unknown theory or equation {n}", tok.span, self.source)
            theory = self.prog.theory(*(n for n, _ in names))
        try:
            sig = Signature(tuple(ops))
        except ValueError as e:
            raise ParseError(str(e), self.tok.span, self.source) from None
        return CompT(a, sig, theory)

    def comp_type(self) -> CompT:
        t = self.any_type()
        if isinstance(t, CompT):
            return t
        if isinstance(t, HandlerT):
            raise self.error("computation type")
        return CompT(t, EMPTY_SIG, EMPTY_THEORY)

    def any_type(self) -> Union[ValueType, CompT]:
        a = self.value_type_atom()
        if self.at("!"):
            a = self.comp_suffix(a)
        if isinstance(a, CompT):
            if self.accept("=>"):
                return HandlerT(a, self.comp_type())
            return a
        if self.at("->") and not self.at("*", 1):
            self.advance()
            return FunT(a, self.comp_type())
        return a

    def value_type(self) -> ValueType:
        tok = self.tok
        t = self.any_type()
        if isinstance(t, CompT):
            raise ParseError("expected value type, found computation type", tok.span, self.source)
        return t

    # -- values and computations ---------------------------------------------

    def term(self) -> Union[Value, Comp]:
        if self.at("fun") or self.at("handler"):
            return self.value()
        return self.comp(allow_value=True)

    def value(self) -> Value:
        tok = self.tok
        if self.accept("fun"):
            x = self.binder()
            self.expect("->")
            return Fun(x, self.comp(), span=tok.span)
        if self.at("handler"):
            return self.handler()
        return self.value_atom()

    def value_atom(self) -> Value:
        tok = self.tok
        if self.accept("true"):
            return BoolLit(True, span=tok.span)
        if self.accept("false"):
            return BoolLit(False, span=tok.span)
        if tok.kind == "ident" and tok.text != "_":
            self.advance()
            return Var(tok.text, span=tok.span)
        if self.at("handler"):
            return self.handler()
        if self.accept("("):
            if self.accept(")"):
                return Unit(span=tok.span)
            v = self.value()
            self.expect(")")
            return v
        raise self.error("value")

    def starts_value_atom(self) -> bool:
        t = self.tok
        return t.kind == "ident" or self.at("true") or self.at("false") or self.at("(") or self.at("handler")

    def handler(self) -> Handler:
        tok = self.expect("handler")
        self.expect("{")
        clauses: list[Clause] = []
        ret = None
        self.accept("|")
        while not self.at("}"):
            ctok = self.tok
            if self.accept("return"):
                if ret is not None:
                    raise ParseError("duplicate return clause", ctok.span, self.source)
                x = self.binder()
                self.expect("->")
                ret = (x, self.comp())
            else:
                op = self.ident("operation clause")
                self.expect("(")
                x = self.pattern()
                self.expect(";")
                k = self.binder()
                self.expect(")")
                self.expect("->")
                body = self.comp()
                if any(c.op == op for c in clauses):
                    raise ParseError(f"duplicate clause for {op}", ctok.span, self.source)
                clauses.append(Clause(op, x, k, body, span=ctok.span))
            if not self.accept("|"):
                break
        self.expect("}")
        if ret is None:
            ret = ("x", Return(Var("x")))
        evidence = None
        if self.accept("by"):
            evidence = self.evidence()
        return Handler(ret[0], ret[1], tuple(clauses), evidence, span=tok.span)

    def pattern(self) -> str:
        if self.at("(") and self.at(")", 1):
            self.advance()
            self.advance()
            return "_"
        return self.binder()

    def evidence(self):
        name = self.ident("evidence name or 'auto'")
        if name != "auto":
            return ByName(name)
        opts = {"depth": 2, "steps": 10_000}
        if self.accept("("):
            while not self.at(")"):
                tok = self.tok
                key = self.ident("option")
                self.expect("=")
                if self.tok.kind != "int":
                    raise self.error("integer")
                if key not in opts:
                    raise ParseError(f"unknown auto option {key}", tok.span, self.source)
                opts[key] = int(self.advance().text)
                if not self.accept(","):
                    break
            self.expect(")")
        return Auto(opts["depth"], opts["steps"])

    def comp(self, allow_value: bool = False) -> Union[Comp, Value]:
        tok = self.tok
        if self.accept("do"):
            x = self.binder()
            self.expect("<-")
            first = self.comp()
            self.expect("in")
            return Do(x, first, self.comp(), span=tok.span)
        first = self.simple(allow_value)
        if isinstance(first, Value):
            return first
        if self.accept(";"):
            return Do("_", first, self.comp(), span=tok.span)
        return first

    def simple(self, allow_value: bool = False) -> Union[Comp, Value]:
        tok = self.tok
        if self.accept("if"):
            v = self.value_atom()
            self.expect("then")
            c1 = self.comp()
            self.expect("else")
            return If(v, c1, self.comp(), span=tok.span)
        if self.accept("with"):
            h = self.value_atom()
            self.expect("handle")
            return With(h, self.comp(), span=tok.span)
        if self.accept("return"):
            return Return(self.value_atom(), span=tok.span)
        if tok.kind == "hole":
            self.advance()
            return Hole(tok.text[1:], span=tok.span)
        if tok.kind == "ident" and self.at("(", 1):
            return self.call()
        if self.at("(") and not self.at(")", 1):
            self.advance()
            if self.at("fun") or self.at("handler"):
                head = self.value()
            else:
                head = self.comp(allow_value=True)
            self.expect(")")
            if isinstance(head, Comp):
                return head
            return self.application(head, tok, allow_value)
        if self.at("fun") and allow_value:
            return self.value()
        if self.starts_value_atom():
            return self.application(self.value_atom(), tok, allow_value)
        raise self.error("computation")

    def application(self, head: Value, tok: Token, allow_value: bool):
        if self.starts_value_atom():
            return App(head, self.value_atom(), span=tok.span)
        if allow_value:
            return head
        raise self.error("argument of application")

    def call(self) -> Comp:
        """``name(v; y. c)`` is an operation call.

        ``name(v)`` is the generic call ``name(v; y. return y)`` when ``name``
        is a declared operation and an application otherwise.
        """
        tok = self.advance()
        self.expect("(")
        if self.accept(")"):
            return self.short_call(tok, Unit(span=tok.span))
        v = self.value()
        if self.accept(")"):
            return self.short_call(tok, v)
        self.expect(";")
        y = self.binder()
        self.expect(".")
        body = self.comp()
        self.expect(")")
        return Op(tok.text, v, y, body, span=tok.span)

    def short_call(self, tok: Token, v: Value) -> Comp:
        if tok.text in self.prog.ops:
            return Op(tok.text, v, "y", Return(Var("y", span=tok.span), span=tok.span), span=tok.span)
        return App(Var(tok.text, span=tok.span), v, span=tok.span)

    # -- templates ---------------------------------------------------------------

    def template(self) -> Template:
        tok = self.tok
        if self.accept("if"):
            v = self.value_atom()
            self.expect("then")
            t1 = self.template()
            self.expect("else")
            return TIf(v, t1, self.template(), span=tok.span)
        if self.accept("("):
            t = self.template()
            self.expect(")")
            return t
        z = self.ident("template")
        if self.at("("):
            save = self.i
            self.advance()
            if not self.at(")"):
                v = self.value()
                if self.accept(";"):
                    y = self.binder()
                    self.expect(".")
                    body = self.template()
                    self.expect(")")
                    return TOp(z, v, y, body, span=tok.span)
            self.i = save
        return TApp(z, self.value_atom(), span=tok.span)

    # -- formulae ------------------------------------------------------------------

    def formula(self) -> Formula:
        tok = self.tok
        if self.at("forall") or self.at("exists"):
            q = self.advance().text
            x = self.binder()
            self.expect(":")
            a = self.value_type()
            self.expect(".")
            body = self.formula()
            return (Forall if q == "forall" else Exists)(x, a, body, span=tok.span)
        left = self.disjunction()
        if self.accept("==>"):
            return Implies(left, self.formula(), span=tok.span)
        return left

    def disjunction(self) -> Formula:
        tok = self.tok
        left = self.conjunction()
        if self.accept("\\/"):
            return Or(left, self.disjunction(), span=tok.span)
        return left

    def conjunction(self) -> Formula:
        tok = self.tok
        left = self.formula_atom()
        if self.accept("/\\"):
            return And(left, self.conjunction(), span=tok.span)
        return left

    def formula_atom(self) -> Formula:
        tok = self.tok
        if self.accept("top"):
            return Truth(span=tok.span)
        if self.accept("bot"):
            return Falsity(span=tok.span)
        if self.at("forall") or self.at("exists"):
            return self.formula()
        if self.at("("):
            save = self.i
            self.advance()
            try:
                f = self.formula()
                self.expect(")")
                return f
            except ParseError:
                self.i = save
        lhs = self.term()
        self.expect("==")
        rhs = self.term()
        self.expect("at")
        ttok = self.tok
        ty = self.any_type()
        if isinstance(ty, CompT):
            if not (isinstance(lhs, Comp) and isinstance(rhs, Comp)):
                raise ParseError("computation equation between values", ttok.span, self.source)
            return CompEq(lhs, rhs, ty, span=tok.span)
        if not (isinstance(lhs, Value) and isinstance(rhs, Value)):
            raise ParseError("value equation between computations", ttok.span, self.source)
        return ValueEq(lhs, rhs, ty, span=tok.span)


def parse_program(text: str, source: Optional[str] = None, program: Optional[Program] = None) -> Program:
    p = Parser(text, program, source)
    return p.program()


def _parse_with(method: str, text: str, program: Optional[Program] = None):
    p = Parser(text, program)
    out = getattr(p, method)()
    p.done()
    return out


def parse_comp(text: str, program: Optional[Program] = None) -> Comp:
    return _parse_with("comp", text, program)


def parse_value(text: str, program: Optional[Program] = None) -> Value:
    return _parse_with("value", text, program)


def parse_term(text: str, program: Optional[Program] = None) -> Union[Value, Comp]:
    return _parse_with("term", text, program)


def parse_type(text: str, program: Optional[Program] = None) -> Union[ValueType, CompT]:
    return _parse_with("any_type", text, program)


def parse_template(text: str, program: Optional[Program] = None) -> Template:
    return _parse_with("template", text, program)


def parse_formula(text: str, program: Optional[Program] = None) -> Formula:
    return _parse_with("formula", text, program)


def parse_equation(text: str, program: Optional[Program] = None) -> Equation:
    return _parse_with("equation", text, program)
