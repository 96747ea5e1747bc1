"""Well-formedness and typing judgements, parameterized by a respects oracle.

Checking is bidirectional: ``_comp`` checks a computation against an expected
value type when one is known and synthesizes one otherwise.  Function and
handler literals are only checked, never synthesized, except in head position
of an application or ``with`` where their parameter type can be recovered.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Protocol, Union

from .syntax import (
    BOOL,
    EMPTY_THEORY,
    UNIT,
    App,
    BoolLit,
    BoolT,
    Comp,
    CompT,
    Do,
    Equation,
    Fun,
    FunT,
    Handler,
    HandlerT,
    Hole,
    If,
    Op,
    Return,
    Signature,
    Span,
    TApp,
    Template,
    Theory,
    TIf,
    TOp,
    Unit,
    UnitT,
    Value,
    ValueType,
    Var,
    With,
)

Ctx = Mapping[str, ValueType]


class TypeCheckError(Exception):
    """Base class of typing diagnostics; ``code`` names the failing rule."""

    def __init__(self, message: str, span: Optional[Span] = None):
        self.message = message
        self.span = span
        super().__init__(f"{span}: {message}" if span else message)

    @property
    def code(self) -> str:
        return type(self).__name__

    def record(self, source: Optional[str] = None) -> dict:
        return {
            "code": self.code,
            "file": source,
            "line": self.span.line if self.span else None,
            "col": self.span.col if self.span else None,
            "message": self.message,
        }


class TypeMismatch(TypeCheckError):
    pass


class UnboundVariable(TypeCheckError):
    pass


class NeedsAnnotation(TypeCheckError):
    pass


class SignatureMismatch(TypeCheckError):
    pass


class TheoryMismatch(TypeCheckError):
    pass


class MissingClause(TypeCheckError):
    def __init__(self, op: str, span: Optional[Span] = None):
        self.op = op
        super().__init__(f"handler has no clause for operation {op}", span)


class ExtraClause(TypeCheckError):
    def __init__(self, op: str, span: Optional[Span] = None):
        self.op = op
        super().__init__(f"handler has a clause for {op}, which is not in the handled signature", span)


class RespectsUnknown(TypeCheckError):
    pass


class RespectsRefuted(TypeCheckError):
    def __init__(self, message: str, counterexample=None, span: Optional[Span] = None):
        self.counterexample = counterexample
        super().__init__(message, span)


class WfError(TypeCheckError):
    pass


class UnknownOp(WfError):
    pass


class UnknownTemplateVariable(WfError):
    pass


class ArgTypeMismatch(WfError):
    pass


class DuplicateName(WfError):
    pass


# --------------------------------------------------------------------------
# Respects oracle protocol


@dataclass(frozen=True)
class Yes:
    detail: str = ""


@dataclass(frozen=True)
class No:
    counterexample: object = None
    detail: str = ""


@dataclass(frozen=True)
class Unknown:
    detail: str = ""


Verdict = Union[Yes, No, Unknown]


class RespectsOracle(Protocol):
    def respects(self, checker: Checker, gamma: Ctx, handler: Handler, src: CompT, dst: CompT) -> Verdict: ...


class FreeOracle:
    """The logic in which clauses respect exactly the empty theory."""

    def respects(self, checker, gamma, handler, src, dst) -> Verdict:
        if not src.theory:
            return Yes("empty theory")
        return Unknown("only the empty theory is respected without evidence")


class EmptyOracle:
    """The logic with no rules: every respects query is unknown."""

    def respects(self, checker, gamma, handler, src, dst) -> Verdict:
        return Unknown("no rules")


# --------------------------------------------------------------------------


def _describe_mismatch(found: CompT, want: CompT, span) -> TypeCheckError:
    if found.sig != want.sig:
        return SignatureMismatch(f"signature {found.sig} does not match {want.sig}", span)
    if found.theory != want.theory:
        return TheoryMismatch(
            f"computation at theory {found.theory} used where theory {want.theory} is required", span
        )
    return TypeMismatch(f"type {found} does not match {want}", span)


class Checker:
    def __init__(self, ops: Union[Signature, Mapping, None] = None, oracle: Optional[RespectsOracle] = None):
        if ops is None:
            ops = Signature()
        elif not isinstance(ops, Signature):
            ops = Signature.of(ops)
        self.ops = ops
        self.oracle = oracle if oracle is not None else FreeOracle()
        self._respects_cache: dict = {}

    # -- well-formedness ---------------------------------------------------

    def wf_type(self, t) -> None:
        match t:
            case UnitT() | BoolT():
                return
            case FunT(a, c):
                self.wf_type(a)
                self.wf_type(c)
            case HandlerT(c, d):
                self.wf_type(c)
                self.wf_type(d)
            case CompT(a, sig, theory):
                self.wf_type(a)
                self.wf_signature(sig)
                self.wf_theory(theory, sig)
            case Signature():
                self.wf_signature(t)
            case _:
                raise WfError(f"not a type: {t!r}")

    def wf_signature(self, sig: Signature) -> None:
        for _, a, b in sig:
            self.wf_type(a)
            self.wf_type(b)

    def wf_ctx(self, ctx) -> None:
        names = [x for x, _ in ctx]
        if len(names) != len(set(names)):
            raise DuplicateName(f"duplicate variable in context: {names}")
        for _, a in ctx:
            self.wf_type(a)

    def wf_template(self, gamma: Ctx, zctx: Ctx, t: Template, sig: Signature) -> None:
        match t:
            case TApp(z, v):
                if z not in zctx:
                    raise UnknownTemplateVariable(f"template variable {z} not in context", t.span)
                self._template_arg(gamma, v, zctx[z], f"argument of {z}", t.span)
            case TIf(v, t1, t2):
                self._template_arg(gamma, v, BOOL, "condition", t.span)
                self.wf_template(gamma, zctx, t1, sig)
                self.wf_template(gamma, zctx, t2, sig)
            case TOp(op, v, y, body):
                if op not in sig:
                    raise UnknownOp(f"template uses operation {op} outside signature {sig}", t.span)
                a, b = sig[op]
                self._template_arg(gamma, v, a, f"parameter of {op}", t.span)
                self.wf_template({**gamma, y: b}, zctx, body, sig)
            case _:
                raise WfError(f"not a template: {t!r}")

    def _template_arg(self, gamma, v, a, what, span) -> None:
        try:
            self.check_value(gamma, v, a)
        except TypeCheckError as e:
            raise ArgTypeMismatch(f"{what}: {e.message}", span) from None

    def wf_equation(self, eq: Equation, sig: Signature) -> None:
        self.wf_ctx(eq.value_ctx)
        self.wf_ctx(eq.template_ctx)
        gamma, zctx = dict(eq.value_ctx), dict(eq.template_ctx)
        try:
            self.wf_template(gamma, zctx, eq.lhs, sig)
            self.wf_template(gamma, zctx, eq.rhs, sig)
        except WfError as e:
            raise type(e)(f"equation {eq.name}: {e.message}", e.span or eq.span) from None

    def wf_theory(self, theory: Theory, sig: Signature) -> None:
        labels = [e.label for e in theory.equations if e.label]
        if len(labels) != len(set(labels)):
            raise DuplicateName(f"duplicate equation labels in theory: {labels}")
        for eq in theory:
            self.wf_equation(eq, sig)

    # -- values ----------------------------------------------------------------

    def infer_value(self, gamma: Ctx, v: Value) -> list[ValueType]:
        """Candidate types of ``v``; empty when ``v`` needs an ascription."""
        match v:
            case Var(x):
                return [gamma[x]] if x in gamma else []
            case Unit():
                return [UNIT]
            case BoolLit():
                return [BOOL]
        return []

    def synth_value(self, gamma: Ctx, v: Value) -> ValueType:
        if isinstance(v, Var) and v.name not in gamma:
            raise UnboundVariable(f"unbound variable {v.name}", v.span)
        cands = self.infer_value(gamma, v)
        if len(cands) != 1:
            raise NeedsAnnotation(f"cannot infer the type of {v}; add an ascription", v.span)
        return cands[0]

    def check_value(self, gamma: Ctx, v: Value, a: ValueType) -> None:
        match v:
            case Var(x):
                if x not in gamma:
                    raise UnboundVariable(f"unbound variable {x}", v.span)
                self._same_value_type(gamma[x], a, v.span)
            case Unit():
                self._same_value_type(UNIT, a, v.span)
            case BoolLit():
                self._same_value_type(BOOL, a, v.span)
            case Fun(x, body):
                if not isinstance(a, FunT):
                    raise TypeMismatch(f"function used at non-function type {a}", v.span)
                self.check_comp({**gamma, x: a.arg}, body, a.result)
            case Handler():
                if not isinstance(a, HandlerT):
                    raise TypeMismatch(f"handler used at non-handler type {a}", v.span)
                self._handler(gamma, v, a.src, a.dst)
            case _:
                raise TypeMismatch(f"not a value: {v!r}")

    def _same_value_type(self, found: ValueType, want: ValueType, span) -> None:
        if found == want:
            return
        if isinstance(found, FunT) and isinstance(want, FunT) and found.arg == want.arg:
            raise _describe_mismatch(found.result, want.result, span)
        if isinstance(found, HandlerT) and isinstance(want, HandlerT):
            if found.dst == want.dst:
                raise _describe_mismatch(found.src, want.src, span)
            if found.src == want.src:
                raise _describe_mismatch(found.dst, want.dst, span)
        raise TypeMismatch(f"expected {want}, found {found}", span)

    def _handler(self, gamma: Ctx, h: Handler, src: CompT, dst: CompT) -> None:
        self.check_comp({**gamma, h.ret_param: src.value}, h.ret_body, dst)
        self.check_clauses(gamma, h.clauses, src.sig, dst, h.span)
        self._respects(gamma, h, src, dst)

    def check_clauses(self, gamma: Ctx, clauses, sig: Signature, dst: CompT, span=None) -> None:
        by_op = {c.op: c for c in clauses}
        for op in by_op:
            if op not in sig:
                raise ExtraClause(op, by_op[op].span or span)
        for op, a, b in sig:
            if op not in by_op:
                raise MissingClause(op, span)
            c = by_op[op]
            k_type = FunT(b, dst)
            self.check_comp({**gamma, c.param: a, c.cont: k_type}, c.body, dst)

    def _respects(self, gamma: Ctx, h: Handler, src: CompT, dst: CompT) -> None:
        fv = tuple(sorted((x, gamma[x]) for x in h.free_vars if x in gamma))
        key = (h, h.evidence, src, dst, fv)
        verdict = self._respects_cache.get(key)
        if verdict is None:
            verdict = self.oracle.respects(self, dict(fv), h, src, dst)
            self._respects_cache[key] = verdict
        match verdict:
            case Yes():
                return
            case No(cex, detail):
                raise RespectsRefuted(
                    f"handler does not respect theory {src.theory}: {detail}", cex, h.span
                )
            case Unknown(detail):
                raise RespectsUnknown(
                    f"could not establish that the handler respects theory {src.theory}"
                    + (f" ({detail})" if detail else ""),
                    h.span,
                )

    # -- computations -------------------------------------------------------------

    def check_comp(self, gamma: Ctx, c: Comp, ty: CompT) -> None:
        self._comp(gamma, c, ty.sig, ty.theory, ty.value)

    def synth_comp(self, gamma: Ctx, c: Comp, sig: Signature, theory: Theory = EMPTY_THEORY) -> ValueType:
        return self._comp(gamma, c, sig, theory, None)

    def _comp(self, gamma: Ctx, c: Comp, sig: Signature, theory: Theory, want: Optional[ValueType]) -> ValueType:
        match c:
            case Return(v):
                if want is None:
                    return self.synth_value(gamma, v)
                self.check_value(gamma, v, want)
                return want
            case Op(op, v, y, body):
                if op not in sig:
                    raise SignatureMismatch(f"operation {op} is not in signature {sig}", c.span)
                a, b = sig[op]
                self.check_value(gamma, v, a)
                return self._comp({**gamma, y: b}, body, sig, theory, want)
            case Do(x, c1, c2):
                a = self._comp(gamma, c1, sig, theory, None)
                return self._comp({**gamma, x: a}, c2, sig, theory, want)
            case If(v, c1, c2):
                self.check_value(gamma, v, BOOL)
                a = self._comp(gamma, c1, sig, theory, want)
                return self._comp(gamma, c2, sig, theory, a)
            case App(Fun(x, body), arg):
                a = self.synth_value(gamma, arg)
                return self._comp({**gamma, x: a}, body, sig, theory, want)
            case App(f, arg):
                ft = self.synth_value(gamma, f)
                if not isinstance(ft, FunT):
                    raise TypeMismatch(f"{f} has type {ft}, not a function type", c.span)
                self.check_value(gamma, arg, ft.arg)
                return self._result(ft.result, sig, theory, want, c.span)
            case With(Handler() as h, body):
                src_sig = self._clause_signature(h)
                a = self._comp(gamma, body, src_sig, EMPTY_THEORY, None)
                src = CompT(a, src_sig, EMPTY_THEORY)
                if want is None:
                    want = self._comp({**gamma, h.ret_param: a}, h.ret_body, sig, theory, None)
                self._handler(gamma, h, src, CompT(want, sig, theory))
                return want
            case With(h, body):
                ht = self.synth_value(gamma, h)
                if not isinstance(ht, HandlerT):
                    raise TypeMismatch(f"{h} has type {ht}, not a handler type", c.span)
                self.check_comp(gamma, body, ht.src)
                return self._result(ht.dst, sig, theory, want, c.span)
            case Hole(name):
                raise TypeMismatch(f"unfilled hole ?{name}", c.span)
        raise TypeMismatch(f"not a computation: {c!r}")

    def _result(self, found: CompT, sig, theory, want, span) -> ValueType:
        target = CompT(want if want is not None else found.value, sig, theory)
        if found != target:
            raise _describe_mismatch(found, target, span)
        return found.value

    def _clause_signature(self, h: Handler) -> Signature:
        entries = []
        for c in h.clauses:
            if c.op not in self.ops:
                raise UnknownOp(f"handler clause for undeclared operation {c.op}", c.span or h.span)
            entries.append((c.op, *self.ops[c.op]))
        return Signature(tuple(entries))


# --------------------------------------------------------------------------
# Programs


@dataclass(frozen=True)
class CheckedLet:
    name: str
    type: Union[ValueType, CompT]


def check_program(program, oracle: Optional[RespectsOracle] = None, checker: Optional[Checker] = None) -> dict[str, Union[ValueType, CompT]]:
    """Typecheck every ``let`` of a program; returns the type of each definition.

    Value definitions are added to the context of later definitions.
    """
    checker = checker or Checker(program.signature, oracle)
    for eq in program.equations.values():
        checker.wf_equation(eq, program.signature)
    gamma: dict[str, ValueType] = {}
    types: dict[str, Union[ValueType, CompT]] = {}
    for let in program.lets.values():
        types[let.name] = ty = check_let(checker, gamma, let)
        if isinstance(let.term, Value):
            gamma[let.name] = ty
    return types


def check_let(checker: Checker, gamma: Ctx, let) -> Union[ValueType, CompT]:
    term, ty = let.term, let.type
    try:
        if isinstance(term, Value):
            if ty is None:
                return checker.synth_value(gamma, term)
            if isinstance(ty, CompT):
                raise TypeMismatch(f"value {let.name} ascribed computation type {ty}", let.span)
            checker.wf_type(ty)
            checker.check_value(gamma, term, ty)
            return ty
        if ty is None:
            a = checker.synth_comp(gamma, term, Signature())
            return CompT(a)
        if not isinstance(ty, CompT):
            ty = CompT(ty)
        checker.wf_type(ty)
        checker.check_comp(gamma, term, ty)
        return ty
    except TypeCheckError as e:
        if e.span is None:
            e.span = let.span
        e.args = (f"in {let.name}: {e.message}",)
        e.message = f"in {let.name}: {e.message}"
        raise
