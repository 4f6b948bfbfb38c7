import math
import random

import pytest

from textbench import (
    ContingencyTable,
    RawDocument,
    SavedSetRegistry,
    contingency,
    cooccurrence,
    frequency,
    phi_square,
    pmi,
)
from textbench.analytics import AnalyticsError, resolve_x
from helpers import (
    build_index,
    doc_tokens,
    exhaustive_phi2,
    exhaustive_pmi,
    exhaustive_table,
    make_docs,
)


@pytest.fixture(scope="module")
def freq_index(tmp_path_factory):
    docs = [
        RawDocument("f0", [], {"body": "cat dog"}),
        RawDocument("f1", [], {"body": "cat cat"}),
        RawDocument("f2", [], {"body": "cat"}),
    ]
    return build_index(docs, tmp_path_factory.mktemp("freq"))


class TestFrequency:
    def test_sorted_by_df(self, freq_index):
        rows = frequency(freq_index, "body", sort="df", top_k=10)
        assert [(r.term, r.df, r.ctf) for r in rows] == [("cat", 3, 4), ("dog", 1, 1)]

    def test_sorted_by_ctf(self, freq_index):
        rows = frequency(freq_index, "body", sort="ctf", top_k=10)
        assert rows[0].term == "cat" and rows[0].ctf == 4

    def test_single_doc_scope_is_forward_entry(self, freq_index):
        rows = frequency(freq_index, "body", scope={1}, top_k=10)
        assert [(r.term, r.df, r.ctf) for r in rows] == [("cat", 1, 2)]

    def test_top_k(self, freq_index):
        assert len(frequency(freq_index, "body", top_k=1)) == 1

    def test_unknown_field(self, freq_index):
        with pytest.raises(AnalyticsError):
            frequency(freq_index, "nosuch")

    def test_corpus_scope_equals_full_set_scope(self, tmp_path):
        docs = make_docs(random.Random(21), 50)
        idx = build_index(docs, tmp_path)
        corpus = frequency(idx, "body", top_k=30)
        as_set = frequency(idx, "body", scope=set(range(50)), top_k=30)
        assert [(r.term, r.df, r.ctf) for r in corpus] == \
            [(r.term, r.df, r.ctf) for r in as_set]


@pytest.fixture(scope="module")
def cont_index(tmp_path_factory):
    # 16 docs: y occurs in exactly 2, both inside the 4-doc x set
    docs = []
    for i in range(16):
        words = ["filler", f"unique{i}"]
        if i in (0, 1):
            words.append("target")
        docs.append(RawDocument(f"d{i}", [], {"body": " ".join(words)}))
    return build_index(docs, tmp_path_factory.mktemp("cont"))


class TestContingency:
    def test_constructed_fixture(self, cont_index):
        t = contingency(cont_index, {0, 1, 2, 3}, "body", "target")
        assert (t.a, t.b, t.c, t.d) == (2, 2, 0, 12)

    def test_absent_term(self, cont_index):
        t = contingency(cont_index, {0, 1, 2, 3}, "body", "zzz")
        assert (t.a, t.b, t.c, t.d) == (0, 4, 0, 12)

    def test_x_equals_scope(self, cont_index):
        scope = {0, 1, 2, 3}
        t = contingency(cont_index, scope, "body", "target", scope=scope)
        assert t.c == 0 and t.d == 0 and t.a == 2 and t.b == 2

    def test_matches_exhaustive_scan(self, tmp_path):
        rng = random.Random(31)
        docs = make_docs(rng, 60)
        idx = build_index(docs, tmp_path)
        x = set(rng.sample(range(60), 20))
        for term in ("cat", "dog", "tree"):
            t = contingency(idx, x, "body", term)
            assert (t.a, t.b, t.c, t.d) == exhaustive_table(docs, x, "body", term)


class TestPmi:
    def test_hand_value(self):
        assert pmi(ContingencyTable(2, 2, 0, 12)) == pytest.approx(2.0, abs=1e-12)

    def test_independence_is_zero(self):
        assert pmi(ContingencyTable(1, 3, 3, 9)) == pytest.approx(0.0, abs=1e-12)

    def test_a_zero_undefined(self):
        with pytest.raises(ValueError):
            pmi(ContingencyTable(0, 4, 2, 10))

    def test_nested_term_constancy(self):
        # every y fully inside x (c=0) has PMI = log2(N/|x|) regardless of a
        n, x_size = 160, 10
        values = [
            pmi(ContingencyTable(a, x_size - a, 0, n - x_size))
            for a in (1, 2, 5, 10)
        ]
        expected = math.log2(n / x_size)
        assert all(v == pytest.approx(expected, abs=1e-12) for v in values)

    def test_transpose_invariant(self):
        t = ContingencyTable(3, 5, 2, 10)
        assert pmi(t) == pytest.approx(pmi(t.transpose()), abs=1e-12)


class TestPhiSquare:
    def test_hand_value(self):
        assert phi_square(ContingencyTable(2, 2, 2, 10)) == pytest.approx(
            256 / 2304, abs=1e-12)

    def test_perfect_association(self):
        assert phi_square(ContingencyTable(4, 0, 0, 12)) == pytest.approx(1.0)

    def test_independence_zero(self):
        assert phi_square(ContingencyTable(1, 3, 3, 9)) == pytest.approx(0.0)

    def test_zero_marginal(self):
        assert phi_square(ContingencyTable(0, 0, 3, 9)) == 0.0

    def test_range_and_transpose(self):
        rng = random.Random(5)
        for _ in range(200):
            t = ContingencyTable(rng.randint(0, 9), rng.randint(0, 9),
                                 rng.randint(0, 9), rng.randint(0, 9))
            v = phi_square(t)
            assert 0.0 <= v <= 1.0
            assert v == pytest.approx(phi_square(t.transpose()), abs=1e-12)


class TestCooccurrence:
    def test_exclusive_term_tops_independent_term(self, tmp_path):
        # y1 occurs only in x docs; y2 is spread evenly
        docs = []
        for i in range(20):
            words = ["base"]
            if i < 5:
                words += ["xmark", "exclusive"]
            if i % 2 == 0:
                words.append("everywhere")
            docs.append(RawDocument(f"d{i}", [], {"body": " ".join(words)}))
        idx = build_index(docs, tmp_path)
        x = set(range(5))
        rows = cooccurrence(idx, x, "body", sort_metric="pmi", top_k=10)
        by_term = {r.term: r for r in rows}
        assert by_term["exclusive"].pmi == pytest.approx(math.log2(20 / 5))
        assert rows[0].term in ("exclusive", "xmark")
        assert by_term["exclusive"].pmi > by_term["everywhere"].pmi

    def test_min_pair_removes_only(self, tmp_path):
        docs = make_docs(random.Random(41), 80)
        idx = build_index(docs, tmp_path)
        x = set(range(30))
        all_rows = cooccurrence(idx, x, "body", min_pair=1, top_k=1000)
        filtered = cooccurrence(idx, x, "body", min_pair=5, top_k=1000)
        kept = {r.term: r for r in all_rows}
        assert all(r.pair_count >= 5 for r in filtered)
        for r in filtered:
            orig = kept[r.term]
            assert (r.pmi, r.phi2, r.pair_count) == (orig.pmi, orig.phi2,
                                                     orig.pair_count)
        assert {r.term for r in filtered} <= {r.term for r in all_rows}

    def test_oracle_equivalence(self, tmp_path):
        rng = random.Random(42)
        docs = make_docs(rng, 100)
        idx = build_index(docs, tmp_path)
        x = set(rng.sample(range(100), 25))
        rows = cooccurrence(idx, x, "body", top_k=1000)
        assert rows, "fixture should produce co-occurring terms"
        for r in rows:
            a, b, c, d = exhaustive_table(docs, x, "body", r.term)
            assert r.pair_count == a
            assert r.df == a + c
            assert r.pmi == pytest.approx(exhaustive_pmi(a, b, c, d), abs=1e-9)
            assert r.phi2 == pytest.approx(exhaustive_phi2(a, b, c, d), abs=1e-9)

    def test_marginal_consistency(self, tmp_path):
        docs = make_docs(random.Random(43), 60)
        idx = build_index(docs, tmp_path)
        x = set(range(20))
        df_by_term = {r.term: r.df
                      for r in frequency(idx, "body", top_k=10_000)}
        for r in cooccurrence(idx, x, "body", top_k=1000):
            t = contingency(idx, x, "body", r.term)
            assert t.a + t.b == len(x)
            assert t.a + t.c == df_by_term[r.term]

    def test_sort_and_tiebreak(self, tmp_path):
        docs = make_docs(random.Random(44), 60)
        idx = build_index(docs, tmp_path)
        rows = cooccurrence(idx, set(range(25)), "body",
                            sort_metric="phi2", top_k=1000)
        keys = [(-r.phi2, -r.pair_count, r.term) for r in rows]
        assert keys == sorted(keys)

    def test_resolve_x_set_and_query(self, cat_index):
        reg = SavedSetRegistry(cat_index)
        reg.from_label("earn", "earn")
        docs, truncated = resolve_x(cat_index, reg, "set:earn")
        assert docs == {0, 1} and truncated is False
        docs, truncated = resolve_x(cat_index, reg, "body:cat", max_docs=2)
        assert len(docs) == 2 and truncated is True
