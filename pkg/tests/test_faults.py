from t2r.genloop.faults import build_fault_corpus, fixer_transport
from t2r.rdsl.errors import HALLUCINATION, MISUSE, SYNTAX_SHAPE, WRONG_PACKAGE


def test_corpus_size_and_proportions():
    corpus = build_fault_corpus()
    assert len(corpus) == 100
    counts: dict = {}
    for p in corpus:
        counts[p.category] = counts.get(p.category, 0) + 1
    assert counts[None] == 87
    assert counts[MISUSE] == 6
    assert counts[HALLUCINATION] == 3
    assert counts[SYNTAX_SHAPE] == 3
    assert counts[WRONG_PACKAGE] == 1


def test_corpus_deterministic():
    a = build_fault_corpus()
    b = build_fault_corpus()
    assert [(p.index, p.env_id, p.source, p.category) for p in a] == [
        (p.index, p.env_id, p.source, p.category) for p in b
    ]


def test_faulty_programs_differ_from_fixed():
    for p in build_fault_corpus():
        if p.category is None:
            assert p.source == p.fixed_source
        else:
            assert p.source != p.fixed_source
            assert "probe" in p.source


def test_fixer_transport_round_counts():
    corpus = build_fault_corpus()
    faulty = next(p for p in corpus if p.category is not None)
    clean = next(p for p in corpus if p.category is None)
    assert len(fixer_transport(faulty)._responses) == 2
    assert len(fixer_transport(clean)._responses) == 1
