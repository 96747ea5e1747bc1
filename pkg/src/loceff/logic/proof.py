"""Derivation terms for the equational and predicate logics, and their checker.

Every node carries enough data to recompute its conclusion.  The checker works
in check mode against a goal formula; elimination forms (hypotheses,
instantiation, induction) also have an inference mode that computes the
formula they prove.

``calc`` chains are the workhorse: each step names a justification and the
checker locates the subterm at which the two neighbouring terms differ, so
congruence steps never need to be spelled out.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Union

from ..syntax import (
    BOOL,
    UNIT,
    And,
    App,
    BoolLit,
    Comp,
    CompEq,
    CompT,
    Do,
    Exists,
    Falsity,
    Forall,
    Formula,
    Fun,
    FunT,
    Handler,
    HandlerT,
    If,
    Implies,
    Op,
    Or,
    Return,
    Span,
    Truth,
    Unit,
    Value,
    ValueEq,
    ValueType,
    Var,
    With,
    fresh,
    holes,
    instantiate_template,
    plug,
    rename,
    subst,
)
from ..typecheck import EMPTY_THEORY, Checker, TypeCheckError

Term = Union[Value, Comp]


# --------------------------------------------------------------------------
# Errors


class ProofError(Exception):
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


class RuleMisapplied(ProofError):
    def __init__(self, node: Proof, reason: str):
        self.node = node
        super().__init__(f"{node.tag}: {reason}", node.span)


class TypeErrorInProof(ProofError):
    pass


class UnknownEquationLabel(ProofError):
    pass


class SchemaArityError(ProofError):
    pass


# --------------------------------------------------------------------------
# Proof nodes


@dataclass(frozen=True)
class Proof:
    span: Optional[Span] = field(default=None, kw_only=True, compare=False)

    @property
    def tag(self) -> str:
        return type(self).__name__.lower()

    @property
    def predicate(self) -> bool:
        """Whether the node belongs to the predicate logic only."""
        return False


@dataclass(frozen=True)
class Refl(Proof):
    pass


@dataclass(frozen=True)
class Sym(Proof):
    proof: Proof


@dataclass(frozen=True)
class Trans(Proof):
    middle: Term
    left: Proof
    right: Proof


@dataclass(frozen=True)
class Calc(Proof):
    terms: tuple[Term, ...]
    steps: tuple[Proof, ...]

    def __post_init__(self):
        if len(self.terms) != len(self.steps) + 1:
            raise ValueError("calc needs one more term than steps")


BETA_RULES = ("if_true", "if_false", "apply", "do_return", "do_op", "handle_return", "handle_op")
ETA_RULES = ("fun", "do", "unit")


@dataclass(frozen=True)
class Beta(Proof):
    rule: str

    @property
    def tag(self) -> str:
        return f"beta_{self.rule}"


@dataclass(frozen=True)
class Eta(Proof):
    rule: str

    @property
    def tag(self) -> str:
        return f"eta_{self.rule}"


CONG_KINDS = ("if", "app", "return", "op", "do", "handle", "fun", "handler")


@dataclass(frozen=True)
class Cong(Proof):
    kind: str
    proofs: tuple[Proof, ...]

    @property
    def tag(self) -> str:
        return f"cong_{self.kind}"


@dataclass(frozen=True)
class SubstEq(Proof):
    """``c[v1/x] == c[v2/x]`` from ``v1 == v2``."""

    var: str
    type: ValueType
    body: Term
    lhs: Value
    rhs: Value
    proof: Proof

    @property
    def tag(self) -> str:
        return "subst"


@dataclass(frozen=True)
class Inherit(Proof):
    label: str
    vals: tuple[tuple[str, Value], ...] = ()
    fns: tuple[tuple[str, Value], ...] = ()


@dataclass(frozen=True)
class Hyp(Proof):
    ref: Union[str, int]


@dataclass(frozen=True)
class Use(Proof):
    """Cite a previously checked closed theorem."""

    name: str


class _Pred(Proof):
    @property
    def predicate(self) -> bool:
        return True


@dataclass(frozen=True)
class AndI(_Pred):
    left: Proof
    right: Proof


@dataclass(frozen=True)
class AndE(_Pred):
    which: int
    proof: Proof


@dataclass(frozen=True)
class OrI(_Pred):
    which: int
    proof: Proof


@dataclass(frozen=True)
class OrE(_Pred):
    proof: Proof
    left_name: str
    left: Proof
    right_name: str
    right: Proof


@dataclass(frozen=True)
class ImplI(_Pred):
    name: str
    proof: Proof


@dataclass(frozen=True)
class ImplE(_Pred):
    proof: Proof
    arg: Proof


@dataclass(frozen=True)
class ForallI(_Pred):
    var: str
    proof: Proof


@dataclass(frozen=True)
class ForallE(_Pred):
    proof: Proof
    value: Value


@dataclass(frozen=True)
class ExistsI(_Pred):
    value: Value
    proof: Proof


@dataclass(frozen=True)
class ExistsE(_Pred):
    proof: Proof
    var: str
    name: str
    body: Proof


@dataclass(frozen=True)
class TruthI(_Pred):
    pass


@dataclass(frozen=True)
class FalsityE(_Pred):
    proof: Proof


@dataclass(frozen=True)
class Have(_Pred):
    name: str
    formula: Formula
    proof: Proof
    body: Proof


@dataclass(frozen=True)
class OpCase:
    op: str
    param: str
    cont: str
    ih: str
    var: str
    proof: Proof


@dataclass(frozen=True)
class Induction(_Pred):
    """Computational induction on ``subject : type`` for ``schema`` with hole ``hole``."""

    hole: str
    schema: Formula
    subject: Comp
    type: CompT
    base_var: str
    base: Proof
    cases: tuple[OpCase, ...]


PRED_NODES = (AndI, AndE, OrI, OrE, ImplI, ImplE, ForallI, ForallE, ExistsI, ExistsE, TruthI, FalsityE, Have, Induction)


def children(p: Proof) -> list[Proof]:
    out = []
    for f in p.__dataclass_fields__:
        v = getattr(p, f)
        if isinstance(v, Proof):
            out.append(v)
        elif isinstance(v, tuple):
            for x in v:
                if isinstance(x, Proof):
                    out.append(x)
                elif isinstance(x, OpCase):
                    out.append(x.proof)
    return out


def walk(p: Proof):
    yield p
    for c in children(p):
        yield from walk(c)


def count_nodes(p: Proof, kind: type) -> int:
    return sum(1 for n in walk(p) if isinstance(n, kind))


# --------------------------------------------------------------------------
# Redexes


def contract(rule: str, t: Term) -> Optional[Term]:
    """The reduct of ``t`` under a beta or eta rule, or None if ``t`` is not a redex."""
    match rule, t:
        case "beta_if_true", If(BoolLit(True), c1, _):
            return c1
        case "beta_if_false", If(BoolLit(False), _, c2):
            return c2
        case "beta_apply", App(Fun(x, body), v):
            return subst(body, {x: v})
        case "beta_do_return", Do(x, Return(v), rest):
            return subst(rest, {x: v})
        case "beta_do_op", Do(x, Op(op, v, y, body), rest):
            if y != x and y in rest.free_vars:
                y2 = fresh(y, rest.free_vars | body.free_vars | {x})
                body, y = rename(body, y, y2), y2
            return Op(op, v, y, Do(x, body, rest))
        case "beta_handle_return", With(Handler() as h, Return(v)):
            return subst(h.ret_body, {h.ret_param: v})
        case "beta_handle_op", With(Handler() as h, Op(op, v, y, body)):
            clause = h.clause(op)
            if clause is None:
                return None
            return subst(clause.body, {clause.param: v, clause.cont: Fun(y, With(h, body))})
        case "eta_fun", Fun(x, App(f, Var(y))) if x == y and x not in f.free_vars:
            return f
        case "eta_do", Do(x, c, Return(Var(y))) if x == y:
            return c
    return None


# --------------------------------------------------------------------------
# Typed subterm decomposition


@dataclass(frozen=True)
class Part:
    term: Term
    binders: tuple[str, ...]
    binder_types: tuple[ValueType, ...]
    type: Union[ValueType, CompT]


def shape(t: Term):
    match t:
        case Op(op, _, _, _):
            return ("op", op)
        case Handler():
            return ("handler", tuple(sorted(t.ops)))
        case Var() | Unit() | BoolLit():
            return t
    return type(t).__name__


_CONG_OF = {"If": "if", "App": "app", "Return": "return", "Do": "do", "With": "handle", "Fun": "fun"}


def cong_kind(t: Term) -> Optional[str]:
    s = shape(t)
    if isinstance(s, tuple):
        return s[0]
    return _CONG_OF.get(s) if isinstance(s, str) else None


# --------------------------------------------------------------------------
# The checker


Hyps = Mapping[str, Formula]


class ProofChecker:
    """Checks derivations in the equational (``"eq"``) or predicate (``"pred"``) logic."""

    def __init__(
        self,
        checker: Checker,
        logic: str = "pred",
        theorems: Optional[Mapping[str, Formula]] = None,
        known_labels=(),
    ):
        if logic not in ("eq", "pred"):
            raise ValueError(f"unknown logic {logic!r}")
        self.tc = checker
        self.logic = logic
        self.theorems = dict(theorems or {})
        self.known_labels = set(known_labels)

    # -- entry points --------------------------------------------------------

    def check(self, ctx: Mapping[str, ValueType], hyps, p: Proof, goal: Formula) -> None:
        hyps = _as_hyps(hyps)
        if self.logic == "eq":
            if hyps:
                raise RuleMisapplied(p, "the equational logic has no hypotheses")
            if not isinstance(goal, (ValueEq, CompEq)):
                raise ProofError(f"goal {goal} is not an equation")
            for n in walk(p):
                if n.predicate or isinstance(n, (Hyp, Use)):
                    raise RuleMisapplied(n, "rule belongs to the predicate logic")
        self.wf_formula(ctx, goal)
        for name, h in hyps.items():
            self.wf_formula(ctx, h)
        self._check(dict(ctx), dict(hyps), p, goal)

    def wf_formula(self, ctx, phi: Formula) -> None:
        try:
            self._wf(dict(ctx), phi)
        except TypeCheckError as e:
            raise TypeErrorInProof(f"formula {phi} is ill-typed: {e.message}", e.span) from None

    def _wf(self, ctx, phi) -> None:
        match phi:
            case ValueEq(a, b, ty):
                self.tc.wf_type(ty)
                self.tc.check_value(ctx, a, ty)
                self.tc.check_value(ctx, b, ty)
            case CompEq(a, b, ty):
                self.tc.wf_type(ty)
                self.tc.check_comp(ctx, a, ty)
                self.tc.check_comp(ctx, b, ty)
            case Truth() | Falsity():
                return
            case And(a, b) | Or(a, b) | Implies(a, b):
                self._wf(ctx, a)
                self._wf(ctx, b)
            case Forall(x, ty, body) | Exists(x, ty, body):
                self.tc.wf_type(ty)
                self._wf({**ctx, x: ty}, body)
            case _:
                raise TypeErrorInProof(f"not a formula: {phi!r}")

    # -- typing helpers --------------------------------------------------------

    def _check_term(self, ctx, t: Term, ty, node: Proof) -> None:
        try:
            if isinstance(ty, CompT):
                self.tc.check_comp(ctx, t, ty)
            else:
                self.tc.check_value(ctx, t, ty)
        except TypeCheckError as e:
            raise TypeErrorInProof(f"{node.tag}: {t} does not have type {ty}: {e.message}", node.span) from None

    def parts(self, ctx, t: Term, ty) -> list[Part]:
        """Immediate subterms of ``t : ty`` with their binders and types."""
        tc = self.tc
        match t:
            case If(v, c1, c2):
                return [Part(v, (), (), BOOL), Part(c1, (), (), ty), Part(c2, (), (), ty)]
            case App(Fun(x, body) as f, a):
                at = tc.synth_value(ctx, a)
                return [Part(f, (), (), FunT(at, ty)), Part(a, (), (), at)]
            case App(f, a):
                ft = tc.synth_value(ctx, f)
                return [Part(f, (), (), ft), Part(a, (), (), ft.arg)]
            case Return(v):
                return [Part(v, (), (), ty.value)]
            case Op(op, v, y, body):
                a, b = ty.sig[op]
                return [Part(v, (), (), a), Part(body, (y,), (b,), ty)]
            case Do(x, c1, c2):
                a = tc.synth_comp(ctx, c1, ty.sig, ty.theory)
                return [Part(c1, (), (), CompT(a, ty.sig, ty.theory)), Part(c2, (x,), (a,), ty)]
            case With(Handler() as h, body):
                sig = tc._clause_signature(h)
                a = tc.synth_comp(ctx, body, sig, EMPTY_THEORY)
                src = CompT(a, sig, EMPTY_THEORY)
                return [Part(h, (), (), HandlerT(src, ty)), Part(body, (), (), src)]
            case With(h, body):
                ht = tc.synth_value(ctx, h)
                return [Part(h, (), (), ht), Part(body, (), (), ht.src)]
            case Fun(x, body):
                return [Part(body, (x,), (ty.arg,), ty.result)]
            case Handler():
                src, dst = ty.src, ty.dst
                out = [Part(t.ret_body, (t.ret_param,), (src.value,), dst)]
                for c in sorted(t.clauses, key=lambda c: c.op):
                    a, b = src.sig[c.op]
                    out.append(Part(c.body, (c.param, c.cont), (a, FunT(b, dst)), dst))
                return out
        return []

    def align(self, ctx, pa: Part, pb: Term, pb_binders: tuple[str, ...]):
        """Rename binders of two corresponding subterms to common names.

        Returns the renamed subterms and the extended context.
        """
        ta, tb = pa.term, pb
        new_ctx = dict(ctx)
        for ba, bb, bt in zip(pa.binders, pb_binders, pa.binder_types):
            name = ba if ba != "_" else bb
            fa = ta.free_vars - {ba}
            fb = tb.free_vars - {bb}
            if name != "_" and (name in new_ctx or name in fa or name in fb):
                name = fresh(name, set(new_ctx) | ta.free_vars | tb.free_vars)
            if name != ba:
                ta = rename(ta, ba, name) if ba != "_" else ta
            if name != bb:
                tb = rename(tb, bb, name) if bb != "_" else tb
            if name != "_":
                new_ctx[name] = bt
        return ta, tb, new_ctx

    def focus(self, ctx, a: Term, b: Term, ty) -> list[tuple[Term, Term, dict, object]]:
        """Positions from the root towards the single place where ``a`` and ``b`` differ."""
        out = [(a, b, dict(ctx), ty)]
        while a != b and shape(a) == shape(b):
            try:
                pas = self.parts(ctx, a, ty)
                pbs = _raw_parts(b)
            except (TypeCheckError, KeyError, AttributeError):
                break
            if len(pas) != len(pbs):
                break
            aligned = [self.align(ctx, pa, tb, bb) for pa, (tb, bb) in zip(pas, pbs)]
            diff = [i for i, (ta, tb, _) in enumerate(aligned) if ta != tb]
            if len(diff) != 1:
                break
            i = diff[0]
            a, b, ctx = aligned[i]
            ty = pas[i].type
            out.append((a, b, dict(ctx), ty))
        return out

    # -- check mode ----------------------------------------------------------------

    def _check(self, ctx, hyps, p: Proof, goal: Formula) -> None:
        match p:
            case Refl():
                lhs, rhs, _ = self._eq(p, goal)
                if lhs != rhs:
                    raise RuleMisapplied(p, f"sides differ: {lhs} and {rhs}")
            case Sym(q):
                lhs, rhs, ty = self._eq(p, goal)
                self._check(ctx, hyps, q, _mk_eq(rhs, lhs, ty))
            case Trans(mid, q1, q2):
                lhs, rhs, ty = self._eq(p, goal)
                self._check_term(ctx, mid, ty, p)
                self._check(ctx, hyps, q1, _mk_eq(lhs, mid, ty))
                self._check(ctx, hyps, q2, _mk_eq(mid, rhs, ty))
            case Calc(terms, steps):
                lhs, rhs, ty = self._eq(p, goal)
                if terms[0] != lhs:
                    raise RuleMisapplied(p, f"chain starts at {terms[0]}, goal starts at {lhs}")
                if terms[-1] != rhs:
                    raise RuleMisapplied(p, f"chain ends at {terms[-1]}, goal ends at {rhs}")
                for t in terms[1:-1]:
                    self._check_term(ctx, t, ty, p)
                for i, q in enumerate(steps):
                    self._step(ctx, hyps, terms[i], terms[i + 1], ty, q)
            case Beta(rule) | Eta(rule) if rule != "unit":
                lhs, rhs, _ = self._eq(p, goal)
                r = contract(p.tag, lhs)
                if r is None:
                    raise RuleMisapplied(p, f"{lhs} is not a redex")
                if r != rhs:
                    raise RuleMisapplied(p, f"{lhs} reduces to {r}, not {rhs}")
            case Eta("unit"):
                lhs, rhs, ty = self._eq(p, goal)
                if ty != UNIT or rhs != Unit():
                    raise RuleMisapplied(p, f"expected an equation v == () at unit, got {goal}")
            case Cong(kind, proofs):
                self._cong(ctx, hyps, p, kind, proofs, goal)
            case SubstEq(x, a, body, v1, v2, q):
                lhs, rhs, ty = self._eq(p, goal)
                self._check_term(ctx, v1, a, p)
                self._check_term(ctx, v2, a, p)
                if subst(body, {x: v1}) != lhs:
                    raise RuleMisapplied(p, f"{body} with {x} := {v1} is not {lhs}")
                if subst(body, {x: v2}) != rhs:
                    raise RuleMisapplied(p, f"{body} with {x} := {v2} is not {rhs}")
                self._check(ctx, hyps, q, ValueEq(v1, v2, a))
            case Inherit():
                self._inherit(ctx, p, goal)
            case AndI(q1, q2):
                g = self._expect(p, goal, And)
                self._check(ctx, hyps, q1, g.left)
                self._check(ctx, hyps, q2, g.right)
            case OrI(which, q):
                g = self._expect(p, goal, Or)
                self._check(ctx, hyps, q, g.left if which == 1 else g.right)
            case OrE(q, n1, q1, n2, q2):
                d = self._expect(p, self._infer(ctx, hyps, q), Or, "disjunction")
                self._check(ctx, {**hyps, n1: d.left}, q1, goal)
                self._check(ctx, {**hyps, n2: d.right}, q2, goal)
            case ImplI(name, q):
                g = self._expect(p, goal, Implies)
                self._check(ctx, {**hyps, name: g.left}, q, g.right)
            case ForallI(x, q):
                g = self._expect(p, goal, Forall)
                self._fresh(ctx, p, x)
                self._check({**ctx, x: g.type}, hyps, q, subst(g.body, {g.var: Var(x)}))
            case ExistsI(v, q):
                g = self._expect(p, goal, Exists)
                self._check_term(ctx, v, g.type, p)
                self._check(ctx, hyps, q, subst(g.body, {g.var: v}))
            case ExistsE(q, x, name, body):
                e = self._expect(p, self._infer(ctx, hyps, q), Exists, "existential")
                self._fresh(ctx, p, x)
                self._check({**ctx, x: e.type}, {**hyps, name: subst(e.body, {e.var: Var(x)})}, body, goal)
            case TruthI():
                self._expect(p, goal, Truth)
            case FalsityE(q):
                self._check(ctx, hyps, q, Falsity())
            case Have(name, phi, q, body):
                self.wf_formula(ctx, phi)
                self._check(ctx, hyps, q, phi)
                self._check(ctx, {**hyps, name: phi}, body, goal)
            case Hyp() | Use() | ForallE() | AndE() | ImplE() | Induction():
                got = self._infer(ctx, hyps, p)
                if got != goal:
                    raise RuleMisapplied(p, f"proves {got}, but the goal is {goal}")
            case _:
                raise RuleMisapplied(p, "unknown rule")

    def _step(self, ctx, hyps, a: Term, b: Term, ty, q: Proof) -> None:
        """One calc step: ``q`` must justify ``a == b`` at some common position."""
        if self.logic == "eq" and (q.predicate or isinstance(q, (Hyp, Use))):
            raise RuleMisapplied(q, "rule belongs to the predicate logic")
        spots = self.focus(ctx, a, b, ty)
        first: Optional[ProofError] = None
        for ta, tb, c, t in reversed(spots):
            try:
                self._check(c, hyps, q, _mk_eq(ta, tb, t))
                return
            except (ProofError, TypeCheckError) as e:
                if first is None:
                    first = e if isinstance(e, ProofError) else TypeErrorInProof(e.message, e.span)
        assert first is not None
        if first.span is None:
            first.span = q.span
        raise first

    def _eq(self, p: Proof, goal: Formula):
        match goal:
            case ValueEq(a, b, ty) | CompEq(a, b, ty):
                return a, b, ty
        raise RuleMisapplied(p, f"goal {goal} is not an equation")

    def _expect(self, p: Proof, phi: Formula, kind: type, what: Optional[str] = None):
        if not isinstance(phi, kind):
            raise RuleMisapplied(p, f"expected {what or kind.__name__.lower()}, got {phi}")
        return phi

    def _fresh(self, ctx, p: Proof, x: str) -> None:
        if x in ctx:
            raise RuleMisapplied(p, f"variable {x} is already bound; choose a fresh name")

    def _cong(self, ctx, hyps, p: Cong, kind: str, proofs, goal) -> None:
        lhs, rhs, ty = self._eq(p, goal)
        if cong_kind(lhs) != kind or shape(lhs) != shape(rhs):
            raise RuleMisapplied(p, f"sides {lhs} and {rhs} are not both {kind} terms")
        try:
            pas = self.parts(ctx, lhs, ty)
        except TypeCheckError as e:
            raise TypeErrorInProof(e.message, e.span) from None
        pbs = _raw_parts(rhs)
        if len(proofs) != len(pas):
            raise RuleMisapplied(p, f"expected {len(pas)} sub-proofs, got {len(proofs)}")
        for pa, (tb, bb), q in zip(pas, pbs, proofs):
            ta, tb, c = self.align(ctx, pa, tb, bb)
            self._check(c, hyps, q, _mk_eq(ta, tb, pa.type))

    def _inherit(self, ctx, p: Inherit, goal) -> None:
        lhs, rhs, ty = self._eq(p, goal)
        if not isinstance(ty, CompT):
            raise RuleMisapplied(p, "inherited equations relate computations")
        eq = ty.theory.by_label(p.label)
        if eq is None:
            if p.label in self.known_labels:
                raise RuleMisapplied(p, f"equation {p.label} is not part of the theory of {ty}")
            raise UnknownEquationLabel(f"unknown equation label {p.label}", p.span)
        vals, fns = dict(p.vals), dict(p.fns)
        want_v = [x for x, _ in eq.value_ctx]
        want_f = [z for z, _ in eq.template_ctx]
        if sorted(vals) != sorted(want_v) or len(vals) != len(p.vals):
            raise RuleMisapplied(p, f"value arguments must cover exactly {want_v}")
        if sorted(fns) != sorted(want_f) or len(fns) != len(p.fns):
            raise RuleMisapplied(p, f"function arguments must cover exactly {want_f}")
        for x, a in eq.value_ctx:
            self._check_term(ctx, vals[x], a, p)
        for z, b in eq.template_ctx:
            self._check_term(ctx, fns[z], FunT(b, ty), p)
        l2 = instantiate_template(eq.lhs, fns, vals)
        r2 = instantiate_template(eq.rhs, fns, vals)
        if l2 != lhs or r2 != rhs:
            raise RuleMisapplied(p, f"instance is {l2} == {r2}, not {lhs} == {rhs}")

    # -- inference mode --------------------------------------------------------------

    def _infer(self, ctx, hyps, p: Proof) -> Formula:
        match p:
            case Hyp(ref):
                if isinstance(ref, int):
                    names = list(hyps)
                    if not 0 <= ref < len(names):
                        raise RuleMisapplied(p, f"no hypothesis number {ref}")
                    return hyps[names[ref]]
                if ref not in hyps:
                    raise RuleMisapplied(p, f"no hypothesis named {ref}")
                return hyps[ref]
            case Use(name):
                if name not in self.theorems:
                    raise RuleMisapplied(p, f"no checked theorem named {name}")
                return self.theorems[name]
            case ForallE(q, v):
                f = self._expect(p, self._infer(ctx, hyps, q), Forall, "universal")
                self._check_term(ctx, v, f.type, p)
                return subst(f.body, {f.var: v})
            case AndE(which, q):
                f = self._expect(p, self._infer(ctx, hyps, q), And, "conjunction")
                return f.left if which == 1 else f.right
            case ImplE(q, r):
                f = self._expect(p, self._infer(ctx, hyps, q), Implies, "implication")
                self._check(ctx, hyps, r, f.left)
                return f.right
            case Induction():
                return self._induction(ctx, hyps, p)
        raise RuleMisapplied(p, "cannot infer what this rule proves; use it where the goal is known")

    def _induction(self, ctx, hyps, p: Induction) -> Formula:
        hs = holes(p.schema)
        if hs != {p.hole}:
            raise SchemaArityError(
                f"induction schema must contain exactly the hole ?{p.hole}, found {sorted('?' + h for h in hs)}",
                p.span,
            )
        ty = p.type
        try:
            self.tc.wf_type(ty)
        except TypeCheckError as e:
            raise TypeErrorInProof(e.message, p.span) from None
        self._check_term(ctx, p.subject, ty, p)
        conclusion = plug(p.schema, {p.hole: p.subject})
        self.wf_formula(ctx, conclusion)

        def phi(c: Comp) -> Formula:
            return plug(p.schema, {p.hole: c})

        x = p.base_var
        self._fresh(ctx, p, x)
        self._check({**ctx, x: ty.value}, hyps, p.base, phi(Return(Var(x))))
        seen = set()
        for case in p.cases:
            if case.op not in ty.sig:
                raise RuleMisapplied(p, f"case for {case.op}, which is not in {ty.sig}")
            if case.op in seen:
                raise RuleMisapplied(p, f"two cases for {case.op}")
            seen.add(case.op)
            a, b = ty.sig[case.op]
            names = [case.param, case.cont, case.var]
            if len(set(names)) != 3:
                raise RuleMisapplied(p, f"case {case.op}: binder names {names} must be distinct")
            for n in names:
                self._fresh(ctx, p, n)
            k, y = Var(case.cont), Var(case.var)
            ih = Forall(case.var, b, phi(App(k, y)))
            goal = phi(Op(case.op, Var(case.param), case.var, App(k, y)))
            c2 = {**ctx, case.param: a, case.cont: FunT(b, ty)}
            self._check(c2, {**hyps, case.ih: ih}, case.proof, goal)
        missing = [op for op in ty.sig.names if op not in seen]
        if missing:
            raise RuleMisapplied(p, f"missing induction cases for {missing}")
        return conclusion


def _raw_parts(t: Term) -> list[tuple[Term, tuple[str, ...]]]:
    match t:
        case If(v, c1, c2):
            return [(v, ()), (c1, ()), (c2, ())]
        case App(f, a):
            return [(f, ()), (a, ())]
        case Return(v):
            return [(v, ())]
        case Op(_, v, y, body):
            return [(v, ()), (body, (y,))]
        case Do(x, c1, c2):
            return [(c1, ()), (c2, (x,))]
        case With(h, body):
            return [(h, ()), (body, ())]
        case Fun(x, body):
            return [(body, (x,))]
        case Handler():
            out = [(t.ret_body, (t.ret_param,))]
            for c in sorted(t.clauses, key=lambda c: c.op):
                out.append((c.body, (c.param, c.cont)))
            return out
    return []


def _mk_eq(a: Term, b: Term, ty) -> Formula:
    if isinstance(ty, CompT):
        return CompEq(a, b, ty)
    return ValueEq(a, b, ty)


def _as_hyps(hyps) -> dict[str, Formula]:
    if hyps is None:
        return {}
    if isinstance(hyps, Mapping):
        return dict(hyps)
    return {f"h{i}": h for i, h in enumerate(hyps)}


def check_eq_proof(checker: Checker, ctx, hyps, p: Proof, goal: Formula) -> None:
    ProofChecker(checker, "eq").check(ctx, hyps, p, goal)


def check_pred_proof(checker: Checker, ctx, hyps, p: Proof, goal: Formula, theorems=None) -> None:
    ProofChecker(checker, "pred", theorems).check(ctx, hyps, p, goal)
