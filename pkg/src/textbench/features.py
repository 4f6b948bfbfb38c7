"""Kappa-based feature ranking, selection, weighting, and sparse ARFF export."""

import math
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set, Tuple

from .analytics import ContingencyTable
from .index import IndexHandle

OTHER_CATEGORY = "other"


class FeatureError(Exception):
    pass


@dataclass(frozen=True)
class FeatureId:
    field: str
    term: str


@dataclass
class CategorySpec:
    name: str
    docs: Set[int]


@dataclass
class KappaRow:
    feature: FeatureId
    kappa: float
    table: ContingencyTable


@dataclass
class ExportConfig:
    categories: List[CategorySpec]
    feature_fields: List[str]
    include_other: bool = False
    max_features: Optional[int] = None
    min_kappa: Optional[float] = None
    weighting: str = "binary"  # binary | tf | tfidf
    relation_name: str = "textbench_export"

    def __post_init__(self):
        if not self.categories:
            raise FeatureError("at least one category is required")
        if self.max_features is None and self.min_kappa is None:
            raise FeatureError("set max_features and/or min_kappa")
        if self.weighting not in ("binary", "tf", "tfidf"):
            raise FeatureError(f"unknown weighting {self.weighting!r}")
        names = [c.name for c in self.categories]
        if len(set(names)) != len(names):
            raise FeatureError("category names must be unique")


def kappa(t: ContingencyTable) -> float:
    """Cohen's kappa of the category-membership vs feature-presence table."""
    n = t.n
    if n == 0:
        return 0.0
    po = (t.a + t.d) / n
    pe = ((t.a + t.b) * (t.a + t.c) + (t.c + t.d) * (t.b + t.d)) / (n * n)
    if pe == 1.0:
        return 0.0
    return (po - pe) / (1.0 - pe)


def rank_features(index: IndexHandle, categories: List[CategorySpec],
                  feature_fields: List[str], include_other: bool = False,
                  scope: Optional[Set[int]] = None) -> Dict[str, List[KappaRow]]:
    """Kappa-ranked features per category (descending, ties by term)."""
    for f in feature_fields:
        if f not in index.fields():
            raise FeatureError(f"unknown field {f!r}")
    scope_docs = set(range(index.n_docs)) if scope is None else set(scope)
    cats = [CategorySpec(c.name, set(c.docs) & scope_docs) for c in categories]
    if include_other:
        covered = set()
        for c in cats:
            covered |= c.docs
        cats.append(CategorySpec(OTHER_CATEGORY, scope_docs - covered))

    n = len(scope_docs)
    # one pass over the scope's forward entries collects every per-category
    # presence count and the scope-level df of each candidate feature
    df: Dict[FeatureId, int] = {}
    per_cat: Dict[str, Dict[FeatureId, int]] = {c.name: {} for c in cats}
    membership = {c.name: c.docs for c in cats}
    for doc_id in scope_docs:
        doc_cats = [name for name, docs in membership.items() if doc_id in docs]
        for fname in feature_fields:
            for term, _tf in index.forward(doc_id, fname):
                fid = FeatureId(fname, term)
                df[fid] = df.get(fid, 0) + 1
                for name in doc_cats:
                    counts = per_cat[name]
                    counts[fid] = counts.get(fid, 0) + 1

    ranked = {}
    for cat in cats:
        size = len(cat.docs)
        counts = per_cat[cat.name]
        rows = []
        for fid, fdf in df.items():
            a = counts.get(fid, 0)
            t = ContingencyTable(a, size - a, fdf - a, n - size - fdf + a)
            rows.append(KappaRow(fid, kappa(t), t))
        rows.sort(key=lambda r: (-r.kappa, r.feature.field, r.feature.term))
        ranked[cat.name] = rows
    return ranked


def select(ranked: Dict[str, List[KappaRow]],
           category_order: List[str],
           max_features: Optional[int] = None,
           min_kappa: Optional[float] = None) -> List[FeatureId]:
    """Per-category cutoffs, then a first-seen-ordered deduplicated union."""
    if max_features is None and min_kappa is None:
        raise FeatureError("set max_features and/or min_kappa")
    selected = []
    seen = set()
    for name in category_order:
        rows = ranked.get(name, [])
        if min_kappa is not None:
            rows = [r for r in rows if r.kappa >= min_kappa]
        if max_features is not None:
            rows = rows[:max_features]
        for r in rows:
            if r.feature not in seen:
                seen.add(r.feature)
                selected.append(r.feature)
    return selected


def weight(index: IndexHandle, doc_id: int, feature: FeatureId,
           scheme: str) -> float:
    tf = dict(index.forward(doc_id, feature.field)).get(feature.term, 0)
    if tf == 0:
        return 0.0
    if scheme == "binary":
        return 1.0
    if scheme == "tf":
        return float(tf)
    if scheme == "tfidf":
        df = index.stats(feature.field, feature.term)[0]
        return tf * math.log(index.n_docs / df)
    raise FeatureError(f"unknown weighting {scheme!r}")


_SANITIZE_RE = re.compile(r"[^0-9A-Za-z]")


def _attribute_names(features: List[FeatureId]) -> List[str]:
    names = []
    used = set()
    for fid in features:
        base = f"{fid.field}__{_SANITIZE_RE.sub('_', fid.term)}"
        name = base
        suffix = 2
        while name in used:
            name = f"{base}_{suffix}"
            suffix += 1
        used.add(name)
        names.append(name)
    return names


def _format_value(v: float) -> str:
    if v == int(v):
        return str(int(v))
    return repr(v)


def export_arff(index: IndexHandle, config: ExportConfig, out,
                scope: Optional[Set[int]] = None,
                negatives: Optional[Set[int]] = None) -> int:
    """Write sparse ARFF feature vectors; returns the instance count.

    Instances are the union of the category doc sets (plus the complement or
    the provided negatives as class 'other' when configured), in doc_id order.
    A doc in several categories takes the first matching category in config
    order.
    """
    ranked = rank_features(
        index, config.categories, config.feature_fields,
        include_other=config.include_other, scope=scope,
    )
    order = [c.name for c in config.categories]
    if config.include_other:
        order.append(OTHER_CATEGORY)
    features = select(ranked, order, config.max_features, config.min_kappa)
    if not features:
        raise FeatureError("feature selection produced no features")

    scope_docs = set(range(index.n_docs)) if scope is None else set(scope)
    class_values = [c.name for c in config.categories]
    membership: List[Tuple[str, Set[int]]] = [
        (c.name, set(c.docs) & scope_docs) for c in config.categories
    ]
    covered = set()
    for _name, docs in membership:
        covered |= docs
    other_docs: Set[int] = set()
    if negatives is not None:
        other_docs = set(negatives) & scope_docs - covered
    elif config.include_other:
        other_docs = scope_docs - covered
    if other_docs:
        class_values.append(OTHER_CATEGORY)
        membership.append((OTHER_CATEGORY, other_docs))
    elif config.include_other:
        class_values.append(OTHER_CATEGORY)

    attr_names = _attribute_names(features)
    class_idx = len(features)

    out.write(f"@RELATION {config.relation_name}\n\n")
    for name in attr_names:
        out.write(f"@ATTRIBUTE {name} NUMERIC\n")
    out.write(f"@ATTRIBUTE class {{{','.join(class_values)}}}\n\n@DATA\n")

    idf = {}
    if config.weighting == "tfidf":
        idf = {
            fid: math.log(index.n_docs / index.stats(fid.field, fid.term)[0])
            for fid in features
        }

    count = 0
    all_docs = sorted(covered | other_docs)
    for doc_id in all_docs:
        cls = next(name for name, docs in membership if doc_id in docs)
        fwd = {
            fname: dict(index.forward(doc_id, fname))
            for fname in config.feature_fields
        }
        parts = []
        for i, fid in enumerate(features):
            tf = fwd[fid.field].get(fid.term, 0)
            if tf == 0:
                continue
            if config.weighting == "binary":
                v = 1.0
            elif config.weighting == "tf":
                v = float(tf)
            else:
                v = tf * idf[fid]
            parts.append(f"{i} {_format_value(v)}")
        parts.append(f"{class_idx} {cls}")
        out.write("{" + ", ".join(parts) + "}\n")
        count += 1
    return count
