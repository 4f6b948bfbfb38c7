"""Annotators: base tokenization plus position-aligned derived token streams."""

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

from .ingest import RawDocument, is_reserved_field

# Maximal runs of Unicode letters/digits; apostrophes kept word-internal.
_TOKEN_RE = re.compile(r"[^\W_]+(?:['’][^\W_]+)*", re.UNICODE)

ENTITY_TYPES = ("person", "location", "organization")


class AnnotationError(Exception):
    pass


@dataclass(frozen=True)
class PositionedTerm:
    term: str
    position: int
    span_length: int = 1


@dataclass
class TokenStream:
    field_name: str
    base_length: int
    terms: List[PositionedTerm] = field(default_factory=list)


def tokenize(text: str, field_name: str = "body") -> TokenStream:
    tokens = [m.group(0).lower() for m in _TOKEN_RE.finditer(text)]
    return TokenStream(
        field_name=field_name,
        base_length=len(tokens),
        terms=[PositionedTerm(t, i) for i, t in enumerate(tokens)],
    )


def ngram_annotate(stream: TokenStream, n: int) -> TokenStream:
    if n not in (2, 3):
        raise ValueError("only bigrams and trigrams are supported")
    suffix = "bigram" if n == 2 else "trigram"
    toks = [t.term for t in stream.terms]
    terms = [
        PositionedTerm("_".join(toks[i : i + n]), i, n)
        for i in range(len(toks) - n + 1)
    ]
    return TokenStream(f"{stream.field_name}_{suffix}", stream.base_length, terms)


@dataclass
class Gazetteer:
    entries: Dict[str, set] = field(default_factory=dict)  # type -> set of name tuples

    def __post_init__(self):
        for etype, names in self.entries.items():
            if etype not in ENTITY_TYPES:
                raise AnnotationError(f"unknown entity type {etype!r}")
            if any(len(n) == 0 for n in names):
                raise AnnotationError("gazetteer contains an empty name sequence")


def load_gazetteer(path) -> Gazetteer:
    """Read 'type<TAB>name words' lines."""
    entries = {t: set() for t in ENTITY_TYPES}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        try:
            etype, name = line.split("\t", 1)
        except ValueError:
            raise AnnotationError(f"gazetteer line {lineno}: expected 'type<TAB>name'")
        entries.setdefault(etype, set()).add(tuple(name.lower().split()))
    return Gazetteer(entries)


def entity_annotate(stream: TokenStream, gazetteer: Gazetteer) -> Dict[str, TokenStream]:
    """Greedy left-to-right longest match per entity type; one term per match."""
    toks = [t.term for t in stream.terms]
    out = {}
    for etype, names in gazetteer.entries.items():
        by_first = {}
        for name in names:
            by_first.setdefault(name[0], []).append(name)
        for seqs in by_first.values():
            seqs.sort(key=len, reverse=True)
        terms = []
        i = 0
        while i < len(toks):
            match = None
            for name in by_first.get(toks[i], ()):
                if tuple(toks[i : i + len(name)]) == name:
                    match = name
                    break
            if match:
                terms.append(PositionedTerm("_".join(match), i, len(match)))
                i += len(match)
            else:
                i += 1
        out[etype] = TokenStream(etype, stream.base_length, terms)
    return out


def load_pos_lexicon(path) -> Dict[str, str]:
    """Read 'term<TAB>TAG' lines; tags are DET/ADJ/NOUN/OTHER."""
    lex = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        try:
            term, tag = line.split("\t")
        except ValueError:
            raise AnnotationError(f"pos lexicon line {lineno}: expected 'term<TAB>TAG'")
        if tag not in ("DET", "ADJ", "NOUN", "OTHER"):
            raise AnnotationError(f"pos lexicon line {lineno}: unknown tag {tag!r}")
        lex[term.lower()] = tag
    return lex


def nounphrase_annotate(stream: TokenStream, pos_lexicon: Dict[str, str]) -> TokenStream:
    """Chunk maximal DET? ADJ* NOUN+ spans; unknown words count as NOUN.

    The emitted term drops the determiner but the span covers it. This is a
    deliberately simple stand-in for a statistical tagger.
    """
    toks = [t.term for t in stream.terms]
    tags = [pos_lexicon.get(t, "NOUN") for t in toks]
    terms = []
    i = 0
    n = len(toks)
    while i < n:
        start = i
        j = i
        if j < n and tags[j] == "DET":
            j += 1
        adj_start = j
        while j < n and tags[j] == "ADJ":
            j += 1
        noun_start = j
        while j < n and tags[j] == "NOUN":
            j += 1
        if j > noun_start:  # at least one NOUN
            terms.append(
                PositionedTerm("_".join(toks[adj_start:j]), start, j - start)
            )
            i = j
        else:
            i = start + 1
    return TokenStream("noun_phrase", stream.base_length, terms)


@dataclass
class SidecarAnnotation:
    external_id: str
    target_field: str
    spans: list  # of (start, end_exclusive, derived_field_name, normalized_term)

    def __post_init__(self):
        for start, end, name, _term in self.spans:
            if not (0 <= start < end):
                raise AnnotationError(
                    f"doc {self.external_id!r}: bad span [{start},{end})"
                )
            if not is_reserved_field(name):
                raise AnnotationError(
                    f"doc {self.external_id!r}: {name!r} is not a derived field name"
                )


def load_sidecar(path) -> Dict[str, List[SidecarAnnotation]]:
    """Read JSONL sidecar annotations, grouped by external_id."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            ann = SidecarAnnotation(
                external_id=obj["external_id"],
                target_field=obj.get("target_field", "body"),
                spans=[tuple(s) for s in obj["spans"]],
            )
            out.setdefault(ann.external_id, []).append(ann)
    return out


def apply_sidecar(
    external_id: str,
    base_streams: Dict[str, TokenStream],
    annotations: List[SidecarAnnotation],
) -> Dict[str, TokenStream]:
    """Convert sidecar spans into derived streams; replaces built-in output."""
    out = {}
    for ann in annotations:
        base = base_streams.get(ann.target_field)
        if base is None:
            raise AnnotationError(
                f"doc {external_id!r}: sidecar targets unknown field {ann.target_field!r}"
            )
        for start, end, name, term in ann.spans:
            if end > base.base_length:
                raise AnnotationError(
                    f"doc {external_id!r}: span [{start},{end}) exceeds "
                    f"{ann.target_field!r} length {base.base_length}"
                )
            stream = out.setdefault(name, TokenStream(name, base.base_length, []))
            stream.terms.append(PositionedTerm(term, start, end - start))
    for stream in out.values():
        stream.terms.sort(key=lambda t: t.position)
    return out


@dataclass
class AnnotatorConfig:
    """Which annotators run at index time and over which base field."""

    ngrams: tuple = ()  # subset of (2, 3)
    ngram_fields: tuple = ("body",)
    entity_field: str = "body"
    gazetteer: Optional[Gazetteer] = None
    nounphrase_field: str = "body"
    pos_lexicon: Optional[Dict[str, str]] = None
    sidecar: Optional[Dict[str, List[SidecarAnnotation]]] = None

    def fingerprint_fields(self) -> dict:
        gaz = None
        if self.gazetteer:
            gaz = sorted(
                (t, " ".join(name))
                for t, names in self.gazetteer.entries.items()
                for name in names
            )
        return {
            "ngrams": sorted(self.ngrams),
            "ngram_fields": sorted(self.ngram_fields),
            "entity_field": self.entity_field if self.gazetteer else None,
            "gazetteer": gaz,
            "nounphrase_field": self.nounphrase_field if self.pos_lexicon else None,
            "pos_lexicon": sorted(self.pos_lexicon.items()) if self.pos_lexicon else None,
            "sidecar": bool(self.sidecar),
        }


def annotate_document(doc: RawDocument, config: AnnotatorConfig) -> Dict[str, TokenStream]:
    """Run the configured annotator chain; returns field name -> stream."""
    streams = {name: tokenize(text, name) for name, text in doc.fields.items()}
    base = dict(streams)

    for n in config.ngrams:
        for fname in config.ngram_fields:
            if fname in base:
                gram = ngram_annotate(base[fname], n)
                streams[gram.field_name] = gram
    if config.gazetteer and config.entity_field in base:
        streams.update(entity_annotate(base[config.entity_field], config.gazetteer))
    if config.pos_lexicon is not None and config.nounphrase_field in base:
        streams["noun_phrase"] = nounphrase_annotate(
            base[config.nounphrase_field], config.pos_lexicon
        )
    if config.sidecar and doc.external_id in config.sidecar:
        streams.update(
            apply_sidecar(doc.external_id, base, config.sidecar[doc.external_id])
        )
    # drop empty derived streams so the index only carries fields that occur
    return {
        name: s for name, s in streams.items()
        if s.terms or name in base
    }
