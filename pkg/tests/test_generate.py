from __future__ import annotations

from collections import Counter

from loceff.generate import CONSTRUCTORS, POOL, TemplateGenerator, constructor_names, generate_corpus, generate_handler
from loceff.interpreter import size
from loceff.syntax import BOOL, Handler, Op, Return, Signature
from loceff.typecheck import Checker

from conftest import CHOOSE


def test_corpus_is_deterministic():
    a = generate_corpus(7, 50, 10)
    b = generate_corpus(7, 50, 10)
    assert a == b
    assert a != generate_corpus(8, 50, 10)


def test_corpus_is_well_typed():
    ch = Checker(POOL)
    for g in generate_corpus(42, 300, 12):
        ch.check_comp({}, g.term, g.type)


def test_every_constructor_is_generated():
    counts = Counter()
    corpus = generate_corpus(42, 300, 12)
    for g in corpus:
        counts.update(constructor_names(g.term))
    for c in CONSTRUCTORS:
        assert counts[c] > len(corpus) // 10, c


def test_smallest_budget():
    for g in generate_corpus(1, 100, 1):
        assert isinstance(g.term, (Return, Op))


def test_sizes_track_budget():
    small = sum(size(g.term) for g in generate_corpus(3, 100, 3))
    large = sum(size(g.term) for g in generate_corpus(3, 100, 12))
    assert small < large


def test_fixed_signature_and_value():
    for g in generate_corpus(5, 50, 8, sig=Signature(), value=BOOL):
        assert g.type.value == BOOL and not g.type.sig


def test_templates_are_well_formed():
    gen = TemplateGenerator(3, CHOOSE)
    ch = Checker(CHOOSE)
    for _ in range(50):
        inst = gen.template(5)
        ch.wf_template(dict(inst.value_ctx), dict(inst.template_ctx), inst.template, CHOOSE)


def test_generated_handlers_cover_signature():
    from loceff.syntax import CompT

    dst = CompT(BOOL, Signature.of({"tick": POOL["tick"]}))
    for seed in range(20):
        h = generate_handler(seed, CHOOSE, BOOL, dst, 6)
        assert isinstance(h, Handler) and [c.op for c in h.clauses] == ["choose"]
        Checker(POOL).check_clauses({}, h.clauses, CHOOSE, dst)
