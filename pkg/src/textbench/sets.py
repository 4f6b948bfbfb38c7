"""Named document sets: built from searches or labels, combined by set algebra."""

import json
import random
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional

from . import query as query_mod
from .index import IndexHandle

SNAPSHOT_VERSION = 1

ALL = "ALL"  # sentinel for save_from_search(k=ALL)


class SavedSetError(Exception):
    pass


@dataclass
class SavedSet:
    name: str
    doc_ids: frozenset
    provenance: str
    created_at: float

    @property
    def size(self) -> int:
        return len(self.doc_ids)


class SavedSetRegistry:
    """In-memory registry of saved sets bound to one index."""

    def __init__(self, index: IndexHandle):
        self.index = index
        self._sets: Dict[str, SavedSet] = {}

    def _add(self, name: str, doc_ids, provenance: str) -> SavedSet:
        if not name:
            raise SavedSetError("set name must be nonempty")
        if name in self._sets:
            raise SavedSetError(f"set {name!r} already exists")
        s = SavedSet(name, frozenset(doc_ids), provenance, time.time())
        self._sets[name] = s
        return s

    def save_from_search(self, name: str, query: str, k=ALL,
                         default_field: str = "body") -> SavedSet:
        node = query_mod.parse(query, default_field)
        if k == ALL or k is None:
            doc_ids = query_mod.match(node, self.index)
            prov = f"search:{query} (all matches)"
        else:
            hits = query_mod.search(node, self.index, int(k))
            doc_ids = {h.doc_id for h in hits}
            prov = f"search:{query} (top {k})"
        return self._add(name, doc_ids, prov)

    def from_label(self, name: str, label: str) -> SavedSet:
        return self._add(name, self.index.label_docs(label), f"label:{label}")

    def combine(self, name: str, op: str, a: str, b: str) -> SavedSet:
        sa, sb = self.get(a).doc_ids, self.get(b).doc_ids
        if op == "union":
            docs = sa | sb
        elif op == "intersect":
            docs = sa & sb
        elif op == "difference":
            docs = sa - sb
        else:
            raise SavedSetError(f"unknown set operation {op!r}")
        return self._add(name, docs, f"{a} {op} {b}")

    def complement_or_sample(self, name: str, source: str,
                             n: Optional[int] = None,
                             seed: Optional[int] = None) -> SavedSet:
        src = self.get(source).doc_ids
        complement = sorted(set(range(self.index.n_docs)) - src)
        if n is None:
            return self._add(name, complement, f"complement:{source}")
        if n > len(complement):
            raise SavedSetError(
                f"sample size {n} exceeds complement size {len(complement)}"
            )
        rng = random.Random(seed)
        docs = rng.sample(complement, n)
        return self._add(name, docs, f"sample:{source} n={n} seed={seed}")

    def list(self) -> List[SavedSet]:
        return sorted(self._sets.values(), key=lambda s: s.name)

    def get(self, name: str) -> SavedSet:
        try:
            return self._sets[name]
        except KeyError:
            raise SavedSetError(f"no saved set named {name!r}")

    def delete(self, name: str):
        self.get(name)
        del self._sets[name]

    def persist(self, path):
        snapshot = {
            "version": SNAPSHOT_VERSION,
            "index_fingerprint": self.index.fingerprint,
            "sets": [
                {
                    "name": s.name,
                    "provenance": s.provenance,
                    "created_at": s.created_at,
                    "doc_ids": sorted(s.doc_ids),
                }
                for s in self.list()
            ],
        }
        Path(path).write_text(json.dumps(snapshot, indent=2), encoding="utf-8")

    def load(self, path):
        snapshot = json.loads(Path(path).read_text(encoding="utf-8"))
        if snapshot.get("version") != SNAPSHOT_VERSION:
            raise SavedSetError("unsupported snapshot version")
        if snapshot.get("index_fingerprint") != self.index.fingerprint:
            raise SavedSetError("snapshot belongs to a different index")
        for rec in snapshot["sets"]:
            s = SavedSet(
                rec["name"],
                frozenset(rec["doc_ids"]),
                rec["provenance"],
                rec.get("created_at", time.time()),
            )
            self._sets[s.name] = s
