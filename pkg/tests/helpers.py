"""Shared test utilities: random corpora, brute-force oracles, ARFF reader.

The oracles here evaluate everything by exhaustive per-document scanning and
never touch the index data structures they are used to check.
"""

import math
import random
import re

from textbench import (
    AnnotatorConfig,
    BoolQuery,
    PhraseQuery,
    RawDocument,
    TermQuery,
    build,
)

VOCAB = [
    "cat", "dog", "bird", "fish", "tree", "river", "stone", "cloud",
    "market", "profit", "election", "senate", "vote", "tax", "trade",
    "music", "film", "game", "storm", "light",
]


def make_docs(rng: random.Random, n_docs: int, vocab=None, max_len=30,
              labels=("earn", "acq", "money-fx")):
    vocab = vocab or VOCAB
    docs = []
    for i in range(n_docs):
        length = rng.randint(1, max_len)
        body = " ".join(rng.choice(vocab) for _ in range(length))
        doc_labels = [l for l in labels if rng.random() < 0.25]
        docs.append(RawDocument(external_id=f"d{i}", labels=doc_labels,
                                fields={"body": body}))
    return docs


def build_index(docs, path, config=None):
    return build(iter(docs), config or AnnotatorConfig(), path)


def doc_tokens(doc: RawDocument, field="body"):
    return re.findall(r"[^\W_]+(?:['’][^\W_]+)*", doc.fields.get(field, "").lower())


# -- brute-force boolean/phrase evaluation -------------------------------------


def doc_matches(node, tokens_by_field) -> bool:
    if isinstance(node, TermQuery):
        return node.term in tokens_by_field.get(node.field, [])
    if isinstance(node, PhraseQuery):
        toks = tokens_by_field.get(node.field, [])
        k = len(node.terms)
        return any(
            tuple(toks[i : i + k]) == node.terms
            for i in range(len(toks) - k + 1)
        )
    if isinstance(node, BoolQuery):
        if any(not doc_matches(c, tokens_by_field) for c in node.must):
            return False
        if node.should and not any(
            doc_matches(c, tokens_by_field) for c in node.should
        ):
            return False
        if any(doc_matches(c, tokens_by_field) for c in node.must_not):
            return False
        return True
    raise TypeError(node)


def brute_force_match(node, docs):
    out = set()
    for doc_id, doc in enumerate(docs):
        tokens_by_field = {f: doc_tokens(doc, f) for f in doc.fields}
        if doc_matches(node, tokens_by_field):
            out.add(doc_id)
    return out


def random_query_node(rng: random.Random, vocab, field="body", depth=0):
    choice = rng.random()
    if depth >= 2 or choice < 0.5:
        if rng.random() < 0.3:
            k = rng.randint(2, 3)
            return PhraseQuery(field, tuple(rng.choice(vocab) for _ in range(k)))
        return TermQuery(field, rng.choice(vocab))
    bq = BoolQuery()
    for _ in range(rng.randint(1, 3)):
        bq.should.append(random_query_node(rng, vocab, field, depth + 1))
    for _ in range(rng.randint(0, 2)):
        bq.must.append(random_query_node(rng, vocab, field, depth + 1))
    if rng.random() < 0.5:
        bq.must_not.append(random_query_node(rng, vocab, field, depth + 1))
    return bq


# -- brute-force co-occurrence / kappa oracles ----------------------------------


def exhaustive_table(docs, x_docs, field, term, scope=None):
    """Count the 2x2 table by scanning every document's tokens directly."""
    scope = set(range(len(docs))) if scope is None else set(scope)
    a = b = c = d = 0
    for doc_id in scope:
        has_term = term in doc_tokens(docs[doc_id], field)
        in_x = doc_id in x_docs
        if in_x and has_term:
            a += 1
        elif in_x:
            b += 1
        elif has_term:
            c += 1
        else:
            d += 1
    return a, b, c, d


def exhaustive_pmi(a, b, c, d):
    n = a + b + c + d
    return math.log2(a * n / ((a + b) * (a + c)))


def exhaustive_phi2(a, b, c, d):
    denom = (a + b) * (c + d) * (a + c) * (b + d)
    if denom == 0:
        return 0.0
    return (a * d - b * c) ** 2 / denom


def exhaustive_kappa(a, b, c, d):
    n = a + b + c + d
    if n == 0:
        return 0.0
    po = (a + d) / n
    pe = ((a + b) * (a + c) + (c + d) * (b + d)) / (n * n)
    if pe == 1.0:
        return 0.0
    return (po - pe) / (1.0 - pe)


# -- independent sparse-ARFF reader ---------------------------------------------


def read_sparse_arff(text: str):
    """Minimal ARFF parser for the sparse data format; test-side oracle."""
    relation = None
    attributes = []  # (name, type-or-values)
    data = []
    in_data = False
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("%"):
            continue
        if in_data:
            if not (line.startswith("{") and line.endswith("}")):
                raise ValueError(f"expected sparse instance, got {line!r}")
            inst = {}
            body = line[1:-1].strip()
            if body:
                for part in body.split(","):
                    idx, val = part.strip().split(" ", 1)
                    inst[int(idx)] = val.strip()
            data.append(inst)
            continue
        upper = line.upper()
        if upper.startswith("@RELATION"):
            relation = line.split(None, 1)[1]
        elif upper.startswith("@ATTRIBUTE"):
            _, name, rest = line.split(None, 2)
            if rest.startswith("{"):
                values = [v.strip() for v in rest[1:-1].split(",")]
                attributes.append((name, values))
            else:
                attributes.append((name, rest))
        elif upper.startswith("@DATA"):
            in_data = True
    return relation, attributes, data
