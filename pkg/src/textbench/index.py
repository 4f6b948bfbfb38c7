"""On-disk index: term dictionary, positional postings, forward index, doc store.

Layout: a directory holding manifest.json (the normative contract: format
version, N, field list, annotator fingerprint) and index.sqlite (the record
encoding, implementation-defined). Single-segment and write-once: build then
read, no updates.
"""

import hashlib
import json
import sqlite3
import threading
from array import array
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Set, Tuple

from .annotate import AnnotatorConfig, annotate_document
from .ingest import RawDocument

FORMAT_VERSION = 1

MANIFEST_NAME = "manifest.json"
DB_NAME = "index.sqlite"

_SCHEMA = """
CREATE TABLE dict (
    field TEXT NOT NULL, term TEXT NOT NULL, df INTEGER NOT NULL,
    ctf INTEGER NOT NULL, postings BLOB NOT NULL,
    PRIMARY KEY (field, term)
);
CREATE TABLE forward (
    doc_id INTEGER NOT NULL, field TEXT NOT NULL, entries TEXT NOT NULL,
    PRIMARY KEY (doc_id, field)
);
CREATE TABLE docs (
    doc_id INTEGER PRIMARY KEY, external_id TEXT UNIQUE NOT NULL,
    labels TEXT NOT NULL, fields TEXT NOT NULL, lengths TEXT NOT NULL
);
CREATE TABLE labels (label TEXT NOT NULL, doc_id INTEGER NOT NULL);
CREATE INDEX labels_by_label ON labels (label);
CREATE TABLE field_stats (
    field TEXT PRIMARY KEY, docs_with_field INTEGER NOT NULL,
    total_occurrences INTEGER NOT NULL, total_length INTEGER NOT NULL
);
"""


class IndexStoreError(Exception):
    pass


@dataclass
class DocRecord:
    doc_id: int
    external_id: str
    labels: List[str]
    fields: Dict[str, str]


@dataclass
class FieldStats:
    docs_with_field: int
    total_term_occurrences: int
    average_field_length: float


def _pack_postings(entries: List[Tuple[int, int, List[int]]]) -> bytes:
    flat = array("I")
    for doc_id, tf, positions in entries:
        flat.append(doc_id)
        flat.append(tf)
        flat.extend(positions)
    return flat.tobytes()


def _unpack_postings(blob: bytes) -> Iterator[Tuple[int, int, List[int]]]:
    flat = array("I")
    flat.frombytes(blob)
    i = 0
    n = len(flat)
    while i < n:
        doc_id, tf = flat[i], flat[i + 1]
        i += 2
        yield doc_id, tf, list(flat[i : i + tf])
        i += tf


def build(docs, config: AnnotatorConfig, out) -> "IndexHandle":
    """Index an iterator of RawDocuments into directory ``out``."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    db_path = out / DB_NAME
    if db_path.exists():
        db_path.unlink()

    postings: Dict[Tuple[str, str], list] = {}
    field_stats: Dict[str, list] = {}  # field -> [docs_with_field, occurrences, length]
    doc_rows = []
    forward_rows = []
    label_rows = []
    seen_ids = set()
    id_hash = hashlib.sha256()
    base_fields = set()

    doc_id = -1
    for doc_id, doc in enumerate(docs):
        if doc.external_id in seen_ids:
            raise IndexStoreError(f"duplicate external_id {doc.external_id!r}")
        seen_ids.add(doc.external_id)
        id_hash.update(doc.external_id.encode("utf-8"))
        id_hash.update(b"\x00")
        base_fields.update(doc.fields)

        streams = annotate_document(doc, config)
        lengths = {}
        for fname, stream in streams.items():
            tf_map: Dict[str, list] = {}
            for term in stream.terms:
                tf_map.setdefault(term.term, []).append(term.position)
            for term, positions in tf_map.items():
                postings.setdefault((fname, term), []).append(
                    (doc_id, len(positions), sorted(positions))
                )
            if tf_map:
                fwd = sorted((t, len(p)) for t, p in tf_map.items())
                forward_rows.append((doc_id, fname, json.dumps(fwd)))
            # base fields measure length in base tokens, derived in terms
            length = (
                stream.base_length if fname in doc.fields else len(stream.terms)
            )
            lengths[fname] = length
            st = field_stats.setdefault(fname, [0, 0, 0])
            st[0] += 1
            st[1] += len(stream.terms)
            st[2] += length
        doc_rows.append(
            (
                doc_id,
                doc.external_id,
                json.dumps(doc.labels),
                json.dumps(doc.fields, sort_keys=True),
                json.dumps(lengths, sort_keys=True),
            )
        )
        for label in doc.labels:
            label_rows.append((label, doc_id))

    n_docs = doc_id + 1

    conn = sqlite3.connect(db_path)
    try:
        conn.executescript(_SCHEMA)
        conn.executemany(
            "INSERT INTO dict VALUES (?,?,?,?,?)",
            (
                (
                    fname,
                    term,
                    len(entries),
                    sum(tf for _, tf, _ in entries),
                    _pack_postings(entries),
                )
                for (fname, term), entries in postings.items()
            ),
        )
        conn.executemany("INSERT INTO forward VALUES (?,?,?)", forward_rows)
        conn.executemany("INSERT INTO docs VALUES (?,?,?,?,?)", doc_rows)
        conn.executemany("INSERT INTO labels VALUES (?,?)", label_rows)
        conn.executemany(
            "INSERT INTO field_stats VALUES (?,?,?,?)",
            ((f, st[0], st[1], st[2]) for f, st in field_stats.items()),
        )
        conn.commit()
    finally:
        conn.close()

    fields = sorted(field_stats)
    manifest = {
        "format_version": FORMAT_VERSION,
        "n_docs": n_docs,
        "fields": fields,
        "base_fields": sorted(base_fields),
        "annotators": config.fingerprint_fields(),
        "doc_id_hash": id_hash.hexdigest(),
    }
    manifest["fingerprint"] = _fingerprint(manifest)
    (out / MANIFEST_NAME).write_text(
        json.dumps(manifest, indent=2, sort_keys=True), encoding="utf-8"
    )
    return IndexHandle(out)


def _fingerprint(manifest: dict) -> str:
    ident = {
        k: manifest[k]
        for k in ("format_version", "n_docs", "fields", "annotators", "doc_id_hash")
    }
    return hashlib.sha256(
        json.dumps(ident, sort_keys=True).encode("utf-8")
    ).hexdigest()[:16]


class IndexHandle:
    """Read-only view over a built index directory."""

    def __init__(self, path):
        self.path = Path(path)
        manifest_path = self.path / MANIFEST_NAME
        if not manifest_path.exists():
            raise IndexStoreError(f"no manifest in {self.path}")
        try:
            self.manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        except ValueError as e:
            raise IndexStoreError(f"corrupt manifest: {e}")
        version = self.manifest.get("format_version")
        if version != FORMAT_VERSION:
            raise IndexStoreError(
                f"unsupported index format version {version} (expected {FORMAT_VERSION})"
            )
        self._db_uri = f"file:{self.path / DB_NAME}?mode=ro"
        self._local = threading.local()
        self._length_cache: Dict[str, List[int]] = {}
        self._conn.execute("SELECT 1")  # fail fast on a missing/corrupt db

    @property
    def _conn(self) -> sqlite3.Connection:
        # the index is immutable, so one read-only connection per thread is safe
        conn = getattr(self._local, "conn", None)
        if conn is None:
            conn = sqlite3.connect(self._db_uri, uri=True)
            self._local.conn = conn
        return conn

    # -- identity -----------------------------------------------------------

    @property
    def n_docs(self) -> int:
        return self.manifest["n_docs"]

    @property
    def fingerprint(self) -> str:
        return self.manifest["fingerprint"]

    def fields(self) -> List[str]:
        return list(self.manifest["fields"])

    def base_fields(self) -> List[str]:
        return list(self.manifest["base_fields"])

    # -- dictionary / postings ----------------------------------------------

    def stats(self, field: str, term: str) -> Tuple[int, int]:
        row = self._conn.execute(
            "SELECT df, ctf FROM dict WHERE field=? AND term=?", (field, term)
        ).fetchone()
        return (row[0], row[1]) if row else (0, 0)

    def postings(self, field: str, term: str) -> Iterator[Tuple[int, int, List[int]]]:
        row = self._conn.execute(
            "SELECT postings FROM dict WHERE field=? AND term=?", (field, term)
        ).fetchone()
        if row is None:
            return iter(())
        return _unpack_postings(row[0])

    def terms(self, field: str) -> Iterator[Tuple[str, int, int]]:
        """All (term, df, ctf) of a field, term-ascending."""
        cur = self._conn.execute(
            "SELECT term, df, ctf FROM dict WHERE field=? ORDER BY term", (field,)
        )
        yield from cur

    # -- forward index --------------------------------------------------------

    def forward(self, doc_id: int, field: str) -> List[Tuple[str, int]]:
        self._check_doc_id(doc_id)
        row = self._conn.execute(
            "SELECT entries FROM forward WHERE doc_id=? AND field=?", (doc_id, field)
        ).fetchone()
        if row is None:
            return []
        return [(t, tf) for t, tf in json.loads(row[0])]

    # -- doc store -------------------------------------------------------------

    def doc(self, doc_id: int) -> DocRecord:
        self._check_doc_id(doc_id)
        row = self._conn.execute(
            "SELECT external_id, labels, fields FROM docs WHERE doc_id=?", (doc_id,)
        ).fetchone()
        return DocRecord(doc_id, row[0], json.loads(row[1]), json.loads(row[2]))

    def labels(self, doc_id: int) -> List[str]:
        return self.doc(doc_id).labels

    def label_docs(self, label: str) -> Set[int]:
        cur = self._conn.execute("SELECT doc_id FROM labels WHERE label=?", (label,))
        return {r[0] for r in cur}

    def all_labels(self) -> List[str]:
        cur = self._conn.execute("SELECT DISTINCT label FROM labels ORDER BY label")
        return [r[0] for r in cur]

    # -- statistics -------------------------------------------------------------

    def field_stats(self, field: str) -> FieldStats:
        row = self._conn.execute(
            "SELECT docs_with_field, total_occurrences, total_length "
            "FROM field_stats WHERE field=?",
            (field,),
        ).fetchone()
        if row is None:
            return FieldStats(0, 0, 0.0)
        docs_with, occ, total_len = row
        avg = total_len / docs_with if docs_with else 0.0
        return FieldStats(docs_with, occ, avg)

    def doc_length(self, doc_id: int, field: str) -> int:
        return self.field_lengths(field)[doc_id]

    def field_lengths(self, field: str) -> List[int]:
        """Per-doc field length (0 where absent); cached after first use."""
        cached = self._length_cache.get(field)
        if cached is None:
            cached = [0] * self.n_docs
            cur = self._conn.execute("SELECT doc_id, lengths FROM docs")
            for doc_id, lengths in cur:
                cached[doc_id] = json.loads(lengths).get(field, 0)
            self._length_cache[field] = cached
        return cached

    def _check_doc_id(self, doc_id: int):
        if not (0 <= doc_id < self.n_docs):
            raise IndexStoreError(f"doc_id {doc_id} out of range [0, {self.n_docs})")

    def close(self):
        conn = getattr(self._local, "conn", None)
        if conn is not None:
            conn.close()
            self._local.conn = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def open_index(path) -> IndexHandle:
    return IndexHandle(path)
