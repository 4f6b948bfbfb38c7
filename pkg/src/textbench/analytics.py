"""Frequency and co-occurrence analysis over any field and document scope."""

import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Set, Tuple

from . import query as query_mod
from .index import IndexHandle


class AnalyticsError(Exception):
    pass


@dataclass(frozen=True)
class ContingencyTable:
    """2x2 document-count table: a=|x∧y|, b=|x∧¬y|, c=|¬x∧y|, d=|¬x∧¬y|."""

    a: int
    b: int
    c: int
    d: int

    @property
    def n(self) -> int:
        return self.a + self.b + self.c + self.d

    def transpose(self) -> "ContingencyTable":
        return ContingencyTable(self.a, self.c, self.b, self.d)


@dataclass
class FrequencyRow:
    term: str
    df: int
    ctf: int


@dataclass
class CooccurRow:
    term: str
    pair_count: int
    df: int
    pmi: float
    phi2: float


def _check_field(index: IndexHandle, field: str):
    if field not in index.fields():
        raise AnalyticsError(f"unknown field {field!r}")


def frequency(index: IndexHandle, field: str, sort: str = "df",
              top_k: int = 20, scope: Optional[Set[int]] = None) -> List[FrequencyRow]:
    """Top terms of a field by df or ctf, within the corpus or a saved set."""
    _check_field(index, field)
    if sort not in ("df", "ctf"):
        raise AnalyticsError(f"sort must be 'df' or 'ctf', not {sort!r}")
    if scope is None:
        rows = [FrequencyRow(t, df, ctf) for t, df, ctf in index.terms(field)]
    else:
        counts: Dict[str, list] = {}
        for doc_id in scope:
            for term, tf in index.forward(doc_id, field):
                c = counts.setdefault(term, [0, 0])
                c[0] += 1
                c[1] += tf
        rows = [FrequencyRow(t, c[0], c[1]) for t, c in counts.items()]
    key = (lambda r: (-r.df, r.term)) if sort == "df" else (lambda r: (-r.ctf, r.term))
    rows.sort(key=key)
    return rows[:top_k]


def _scope_df(index: IndexHandle, field: str, term: str,
              scope: Optional[Set[int]]) -> int:
    if scope is None:
        return index.stats(field, term)[0]
    return sum(
        1 for doc_id, _tf, _pos in index.postings(field, term) if doc_id in scope
    )


def contingency(index: IndexHandle, x_docs: Set[int], field: str, term: str,
                scope: Optional[Set[int]] = None) -> ContingencyTable:
    """Fill the 2x2 table for document set x against term y within scope."""
    _check_field(index, field)
    n_scope = index.n_docs if scope is None else len(scope)
    x = set(x_docs) if scope is None else set(x_docs) & scope
    a = sum(
        1 for doc_id in x
        if any(t == term for t, _ in index.forward(doc_id, field))
    )
    b = len(x) - a
    c = _scope_df(index, field, term, scope) - a
    d = n_scope - a - b - c
    return ContingencyTable(a, b, c, d)


def pmi(t: ContingencyTable) -> float:
    """log2(a*N / ((a+b)(a+c))); undefined (ValueError) when a = 0."""
    if t.a == 0:
        raise ValueError("PMI is undefined for a = 0")
    return math.log2(t.a * t.n / ((t.a + t.b) * (t.a + t.c)))


def phi_square(t: ContingencyTable) -> float:
    """(ad - bc)^2 / ((a+b)(c+d)(a+c)(b+d)); 0 when any marginal is 0."""
    denom = (t.a + t.b) * (t.c + t.d) * (t.a + t.c) * (t.b + t.d)
    if denom == 0:
        return 0.0
    num = t.a * t.d - t.b * t.c
    return (num * num) / denom


def cooccurrence(index: IndexHandle, x_docs: Set[int], y_field: str,
                 scope: Optional[Set[int]] = None, sort_metric: str = "pmi",
                 min_pair: int = 1, top_k: int = 20) -> List[CooccurRow]:
    """Terms of y_field that co-occur with the x document set.

    Pair counts come from the forward entries of x docs; the rest of each
    contingency table is filled from scope-level statistics. Rows with
    pair_count < min_pair (or 0) are dropped.
    """
    _check_field(index, y_field)
    if sort_metric not in ("pmi", "phi2"):
        raise AnalyticsError(f"metric must be 'pmi' or 'phi2', not {sort_metric!r}")
    if min_pair < 1:
        raise AnalyticsError("min_pair must be >= 1")
    x = set(x_docs) if scope is None else set(x_docs) & scope
    n_scope = index.n_docs if scope is None else len(scope)

    pair_counts: Dict[str, int] = {}
    for doc_id in x:
        for term, _tf in index.forward(doc_id, y_field):
            pair_counts[term] = pair_counts.get(term, 0) + 1

    # df within a saved-set scope needs one scan over the scope's forward entries
    scope_df: Dict[str, int] = {}
    if scope is not None:
        for doc_id in scope:
            for term, _tf in index.forward(doc_id, y_field):
                scope_df[term] = scope_df.get(term, 0) + 1

    rows = []
    for term, a in pair_counts.items():
        if a < min_pair:
            continue
        df = (
            index.stats(y_field, term)[0] if scope is None else scope_df[term]
        )
        t = ContingencyTable(a, len(x) - a, df - a, n_scope - len(x) - df + a)
        rows.append(CooccurRow(term, a, df, pmi(t), phi_square(t)))

    metric = (lambda r: r.pmi) if sort_metric == "pmi" else (lambda r: r.phi2)
    rows.sort(key=lambda r: (-metric(r), -r.pair_count, r.term))
    return rows[:top_k]


def resolve_x(index: IndexHandle, registry, x: str,
              default_field: str = "body",
              max_docs: Optional[int] = None) -> Tuple[Set[int], bool]:
    """Resolve a co-occurrence x argument: 'set:NAME' or a query string.

    Returns (doc set, truncated flag); max_docs keeps only the top-ranked
    matches, which undercounts pair frequencies (a top-n approximation).
    """
    if x.startswith("set:"):
        return set(registry.get(x[4:]).doc_ids), False
    node = query_mod.parse(x, default_field)
    matched = query_mod.match(node, index)
    if max_docs is None or len(matched) <= max_docs:
        return matched, False
    hits = query_mod.search(node, index, max_docs)
    return {h.doc_id for h in hits}, True
