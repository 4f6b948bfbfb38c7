"""Structured query language: parser, boolean matching, BM25-ranked search.

Grammar:
    or_expr  := and_expr ('OR' and_expr)*
    and_expr := unary ('AND'? unary)*
    unary    := 'NOT' unary | clause
    clause   := [field ':'] (term | '"' phrase '"' | '(' query ')')

Bare juxtaposition is "should" (disjunctive, ranked); explicit AND is "must";
NOT is "must_not". AND/OR/NOT keywords are uppercase; lowercase forms are terms.
"""

import math
import re
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Set, Tuple

from .index import IndexHandle

BM25_K1 = 1.2
BM25_B = 0.75


class QuerySyntaxError(Exception):
    def __init__(self, message: str, offset: int):
        super().__init__(f"syntax error at {offset}: {message}")
        self.offset = offset


@dataclass(frozen=True)
class TermQuery:
    field: Optional[str]
    term: str


@dataclass(frozen=True)
class PhraseQuery:
    field: Optional[str]
    terms: tuple
    slop: int = 0


@dataclass
class BoolQuery:
    must: list = field(default_factory=list)
    should: list = field(default_factory=list)
    must_not: list = field(default_factory=list)


# Query terms keep underscores and apostrophes so derived-field concepts
# (karen_handel) survive normalization; other punctuation splits tokens.
_QTERM_RE = re.compile(r"[\w'’]+", re.UNICODE)

_LEX_RE = re.compile(
    r"""\s*(?:
        (?P<lparen>\() |
        (?P<rparen>\)) |
        (?P<quote>"(?P<phrase>[^"]*)") |
        (?P<word>[^\s()"]+)
    )""",
    re.X,
)


def _normalize_term(raw: str) -> List[str]:
    return [m.group(0).lower() for m in _QTERM_RE.finditer(raw)]


def _lex(query: str):
    tokens = []  # (kind, value, offset)
    pos = 0
    while pos < len(query):
        m = _LEX_RE.match(query, pos)
        if m is None or m.end() == m.start():
            stripped = query[pos:].lstrip()
            if not stripped:
                break
            offset = len(query) - len(stripped)
            raise QuerySyntaxError(f"unexpected character {stripped[0]!r}", offset)
        offset = m.start() + (len(m.group(0)) - len(m.group(0).lstrip()))
        if m.group("lparen"):
            tokens.append(("(", "(", offset))
        elif m.group("rparen"):
            tokens.append((")", ")", offset))
        elif m.group("quote") is not None:
            tokens.append(("phrase", m.group("phrase"), offset))
        else:
            word = m.group("word")
            if word in ("AND", "OR", "NOT"):
                tokens.append((word, word, offset))
            elif word.endswith(":") and len(word) > 1:
                tokens.append(("fieldprefix", word[:-1], offset))
            elif ":" in word:
                fieldname, term = word.split(":", 1)
                tokens.append(("fieldprefix", fieldname, offset))
                tokens.append(("term", term, offset + len(fieldname) + 1))
            else:
                tokens.append(("term", word, offset))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens, default_field: Optional[str]):
        self.tokens = tokens
        self.i = 0
        self.default_field = default_field

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect_end_offset(self):
        tok = self.peek()
        return tok[2] if tok else 0

    def parse(self):
        node = self.or_expr()
        tok = self.peek()
        if tok is not None:
            raise QuerySyntaxError(f"unexpected {tok[1]!r}", tok[2])
        return node

    def or_expr(self):
        branches = [self.and_expr()]
        while self.peek() and self.peek()[0] == "OR":
            self.next()
            branches.append(self.and_expr())
        if len(branches) == 1:
            return branches[0]
        return BoolQuery(should=branches)

    def and_expr(self):
        nodes = [self._unary()]  # (node, negated)
        and_links = []  # and_links[j]: explicit AND between nodes[j] and nodes[j+1]
        while True:
            tok = self.peek()
            if tok is None or tok[0] in (")", "OR"):
                break
            joined = tok[0] == "AND"
            if joined:
                self.next()
                tok = self.peek()
                if tok is None or tok[0] in (")", "OR"):
                    raise QuerySyntaxError(
                        "AND needs a right operand", self.expect_end_offset()
                    )
            nodes.append(self._unary())
            and_links.append(joined)
        if len(nodes) == 1 and not nodes[0][1]:
            return nodes[0][0]
        bq = BoolQuery()
        for i, (node, negated) in enumerate(nodes):
            if negated:
                bq.must_not.append(node)
                continue
            # a clause on either side of an explicit AND is a must clause
            is_must = (i > 0 and and_links[i - 1]) or (
                i < len(and_links) and and_links[i]
            )
            (bq.must if is_must else bq.should).append(node)
        if not bq.must and not bq.should:
            tok_off = self.tokens[0][2] if self.tokens else 0
            raise QuerySyntaxError(
                "query needs at least one positive clause", tok_off
            )
        return bq

    def _unary(self) -> Tuple[object, bool]:
        tok = self.peek()
        if tok and tok[0] == "NOT":
            self.next()
            node, negated = self._unary()
            return node, not negated
        return self._clause(), False

    def _clause(self):
        tok = self.next()
        if tok is None:
            raise QuerySyntaxError("unexpected end of query", self.expect_end_offset())
        kind, value, offset = tok
        fieldname = self.default_field
        if kind == "fieldprefix":
            fieldname = value
            tok = self.next()
            if tok is None:
                raise QuerySyntaxError("field prefix without a clause", offset)
            kind, value, offset = tok
            if kind == "fieldprefix":
                raise QuerySyntaxError("nested field prefix", offset)
        if kind == "(":
            saved = self.default_field
            self.default_field = fieldname
            node = self.or_expr()
            self.default_field = saved
            tok = self.next()
            if tok is None or tok[0] != ")":
                raise QuerySyntaxError("missing ')'", self.expect_end_offset())
            return node
        if kind == "phrase":
            terms = _normalize_term(value)
            if not terms:
                raise QuerySyntaxError("empty phrase", offset)
            if len(terms) == 1:
                return TermQuery(fieldname, terms[0])
            return PhraseQuery(fieldname, tuple(terms))
        if kind == "term":
            terms = _normalize_term(value)
            if not terms:
                raise QuerySyntaxError(f"term {value!r} normalizes to nothing", offset)
            if len(terms) == 1:
                return TermQuery(fieldname, terms[0])
            return PhraseQuery(fieldname, tuple(terms))
        raise QuerySyntaxError(f"unexpected {value!r}", offset)


def parse(query: str, default_field: str = "body"):
    tokens = _lex(query)
    if not tokens:
        raise QuerySyntaxError("empty query", 0)
    return _Parser(tokens, default_field).parse()


# -- evaluation ---------------------------------------------------------------


@dataclass
class Hit:
    doc_id: int
    score: float


def _term_docs(index: IndexHandle, fieldname: str, term: str) -> Dict[int, int]:
    return {doc_id: tf for doc_id, tf, _ in index.postings(fieldname, term)}


def _phrase_docs(index: IndexHandle, node: PhraseQuery) -> Dict[int, int]:
    """doc_id -> number of slop-0 phrase occurrences."""
    plists = [dict((d, p) for d, _, p in index.postings(node.field, t))
              for t in node.terms]
    if not plists or any(not p for p in plists):
        return {}
    common = set(plists[0])
    for p in plists[1:]:
        common &= set(p)
    out = {}
    for doc_id in common:
        first = plists[0][doc_id]
        rest = [set(p[doc_id]) for p in plists[1:]]
        count = sum(
            1 for pos in first
            if all(pos + k + 1 in rest[k] for k in range(len(rest)))
        )
        if count:
            out[doc_id] = count
    return out


def _leaf_field(node, index: IndexHandle) -> str:
    if node.field is None or node.field not in index.fields():
        raise KeyError(f"unknown field {node.field!r}")
    return node.field


def match(node, index: IndexHandle, scope: Optional[Set[int]] = None) -> Set[int]:
    """Exact boolean evaluation; result is a subset of scope (corpus if None)."""
    result = _match(node, index)
    if scope is not None:
        result &= set(scope)
    return result


def _match(node, index: IndexHandle) -> Set[int]:
    if isinstance(node, TermQuery):
        _leaf_field(node, index)
        return set(_term_docs(index, node.field, node.term))
    if isinstance(node, PhraseQuery):
        _leaf_field(node, index)
        return set(_phrase_docs(index, node))
    if isinstance(node, BoolQuery):
        result = None
        for clause in node.must:
            docs = _match(clause, index)
            result = docs if result is None else result & docs
        if node.should:
            union = set()
            for clause in node.should:
                union |= _match(clause, index)
            result = union if result is None else result & union
        if result is None:
            result = set()
        for clause in node.must_not:
            result -= _match(clause, index)
        return result
    raise TypeError(f"not a query node: {node!r}")


def _positive_leaves(node, positive: bool = True):
    """Term/phrase leaves that can contribute score (not under must_not)."""
    if isinstance(node, (TermQuery, PhraseQuery)):
        return [node] if positive else []
    leaves = []
    for clause in node.must + node.should:
        leaves.extend(_positive_leaves(clause, positive))
    for clause in node.must_not:
        leaves.extend(_positive_leaves(clause, not positive))
    return leaves


def _bm25(tf: int, df: int, n_docs: int, length: int, avg_len: float) -> float:
    idf = math.log((n_docs - df + 0.5) / (df + 0.5) + 1.0)
    if avg_len <= 0:
        norm = 1.0
    else:
        norm = 1.0 - BM25_B + BM25_B * (length / avg_len)
    return idf * tf * (BM25_K1 + 1.0) / (tf + BM25_K1 * norm)


def search(node, index: IndexHandle, k: int,
           scope: Optional[Set[int]] = None) -> List[Hit]:
    """Top-k BM25 over matching documents; scores use whole-index statistics."""
    if k < 1:
        raise ValueError("k must be >= 1")
    matched = _match(node, index)
    if scope is not None:
        matched &= set(scope)
    if not matched:
        return []

    leaves = []
    seen = set()
    for leaf in _positive_leaves(node):
        if leaf in seen:
            continue
        seen.add(leaf)
        if isinstance(leaf, TermQuery):
            tfs = _term_docs(index, leaf.field, leaf.term)
            df = index.stats(leaf.field, leaf.term)[0]
        else:
            tfs = _phrase_docs(index, leaf)
            df = len(tfs)
        leaves.append((leaf.field, tfs, df))

    n_docs = index.n_docs
    scores = {}
    for fieldname, tfs, df in leaves:
        if df == 0:
            continue
        avg_len = index.field_stats(fieldname).average_field_length
        lengths = index.field_lengths(fieldname)
        for doc_id, tf in tfs.items():
            if doc_id in matched:
                scores[doc_id] = scores.get(doc_id, 0.0) + _bm25(
                    tf, df, n_docs, lengths[doc_id], avg_len
                )
    hits = [Hit(doc_id, scores.get(doc_id, 0.0)) for doc_id in matched]
    hits.sort(key=lambda h: (-h.score, h.doc_id))
    return hits[:k]
