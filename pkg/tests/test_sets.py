import random

import pytest

from textbench import ALL, SavedSetError, SavedSetRegistry
from helpers import build_index, make_docs


@pytest.fixture
def registry(cat_index):
    return SavedSetRegistry(cat_index)


class TestSaveFromSearch:
    def test_all_matches(self, registry):
        s = registry.save_from_search("cats", "body:cat", ALL)
        assert s.doc_ids == frozenset({0, 1, 2})
        assert "body:cat" in s.provenance

    def test_top_k(self, registry):
        s = registry.save_from_search("top", "body:cat", k=1)
        assert s.size == 1

    def test_name_collision(self, registry):
        registry.save_from_search("x", "cat", ALL)
        with pytest.raises(SavedSetError, match="already exists"):
            registry.save_from_search("x", "cat", ALL)

    def test_bad_query(self, registry):
        from textbench import QuerySyntaxError
        with pytest.raises(QuerySyntaxError):
            registry.save_from_search("y", "NOT cat", ALL)

    def test_listing_shows_name_and_size(self, registry):
        registry.save_from_search("trump", "cat", ALL)
        registry.save_from_search("clinton", "mat", ALL)
        listing = {(s.name, s.size) for s in registry.list()}
        assert ("trump", 3) in listing and ("clinton", 1) in listing


class TestCombine:
    def test_union(self, registry):
        registry.from_label("earn", "earn")       # {0, 1}
        registry.from_label("acq", "acq")         # {1}
        s = registry.combine("u", "union", "earn", "acq")
        assert s.doc_ids == frozenset({0, 1})
        assert s.provenance == "earn union acq"

    def test_difference_self_is_empty(self, registry):
        registry.from_label("earn", "earn")
        s = registry.combine("d", "difference", "earn", "earn")
        assert s.size == 0

    def test_intersect(self, registry):
        registry.from_label("earn", "earn")
        registry.from_label("acq", "acq")
        s = registry.combine("i", "intersect", "earn", "acq")
        assert s.doc_ids == frozenset({1})

    def test_unknown_operand(self, registry):
        with pytest.raises(SavedSetError):
            registry.combine("x", "union", "nope", "nada")

    def test_algebra_laws(self, tmp_path):
        docs = make_docs(random.Random(2), 40)
        idx = build_index(docs, tmp_path)
        reg = SavedSetRegistry(idx)
        a = reg.save_from_search("a", "cat dog", ALL)
        b = reg.save_from_search("b", "tree", ALL)
        u = reg.combine("u", "union", "a", "b")
        u2 = reg.combine("u2", "union", "b", "a")
        i = reg.combine("i", "intersect", "a", "b")
        assert u.doc_ids == u2.doc_ids
        assert u.size == a.size + b.size - i.size


class TestFromLabel:
    def test_label(self, registry):
        s = registry.from_label("earners", "earn")
        assert s.doc_ids == frozenset({0, 1})
        assert s.provenance == "label:earn"

    def test_unknown_label_empty(self, registry):
        assert registry.from_label("none", "zzz").size == 0


class TestComplementAndSample:
    def test_complement(self, registry):
        registry.from_label("earn", "earn")
        s = registry.complement_or_sample("rest", "earn")
        assert s.doc_ids == frozenset({2})

    def test_sample_deterministic(self, tmp_path):
        docs = make_docs(random.Random(1), 20)
        idx = build_index(docs, tmp_path)
        reg = SavedSetRegistry(idx)
        reg.from_label("earn", "earn")
        s1 = reg.complement_or_sample("s1", "earn", n=5, seed=7)
        s2 = reg.complement_or_sample("s2", "earn", n=5, seed=7)
        assert s1.doc_ids == s2.doc_ids
        assert s1.size == 5

    def test_sample_too_large(self, registry):
        registry.from_label("earn", "earn")  # complement size 1
        with pytest.raises(SavedSetError):
            registry.complement_or_sample("s", "earn", n=5, seed=1)


class TestRegistry:
    def test_delete_then_get(self, registry):
        registry.from_label("earn", "earn")
        registry.delete("earn")
        with pytest.raises(SavedSetError):
            registry.get("earn")

    def test_persist_load_roundtrip(self, registry, cat_index, tmp_path):
        registry.from_label("earn", "earn")
        registry.save_from_search("cats", "cat", ALL)
        snap = tmp_path / "sets.json"
        registry.persist(snap)
        fresh = SavedSetRegistry(cat_index)
        fresh.load(snap)
        assert {s.name for s in fresh.list()} == {"earn", "cats"}
        assert fresh.get("earn").doc_ids == registry.get("earn").doc_ids

    def test_load_rejects_other_index(self, registry, tmp_path):
        registry.from_label("earn", "earn")
        snap = tmp_path / "sets.json"
        registry.persist(snap)
        other = build_index(make_docs(random.Random(1), 5), tmp_path / "other")
        with pytest.raises(SavedSetError, match="different index"):
            SavedSetRegistry(other).load(snap)

    def test_load_accepts_identical_rebuild(self, cat_docs, registry, tmp_path):
        registry.from_label("earn", "earn")
        snap = tmp_path / "sets.json"
        registry.persist(snap)
        rebuilt = build_index(cat_docs, tmp_path / "rebuilt")
        fresh = SavedSetRegistry(rebuilt)
        fresh.load(snap)
        assert fresh.get("earn").size == 2
