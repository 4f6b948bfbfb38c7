"""HTTP JSON facade over index, search, saved sets, analytics, and feature lab.

Every endpoint is a thin wrapper: it resolves names to library objects, calls
the corresponding library operation, and serializes the result.
"""

import io
import threading

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse

from . import analytics, features, query as query_mod
from .analytics import AnalyticsError
from .features import CategorySpec, ExportConfig, FeatureError
from .index import IndexHandle, IndexStoreError, open_index
from .query import QuerySyntaxError
from .sets import ALL, SavedSetError, SavedSetRegistry

_CLIENT_ERRORS = (
    QuerySyntaxError, SavedSetError, AnalyticsError, FeatureError, KeyError,
    ValueError,
)


def create_app(index: IndexHandle,
               registry: SavedSetRegistry = None) -> FastAPI:
    app = FastAPI(title="textbench")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
        allow_headers=["*"],
    )
    registry = registry if registry is not None else SavedSetRegistry(index)
    mutate_lock = threading.Lock()

    def error(status, message):
        return JSONResponse({"error": str(message)}, status_code=status)

    @app.exception_handler(Exception)
    async def on_exception(request: Request, exc: Exception):
        if isinstance(exc, _CLIENT_ERRORS):
            msg = exc.args[0] if exc.args else str(exc)
            return error(400, msg)
        if isinstance(exc, IndexStoreError):
            return error(404, exc)
        return error(500, exc)

    def scope_of(body: dict):
        name = body.get("set")
        if name:
            return set(registry.get(name).doc_ids)
        return None

    @app.get("/stats")
    def stats():
        return {"n_docs": index.n_docs, "fields": index.fields(),
                "labels": index.all_labels(),
                "fingerprint": index.fingerprint}

    @app.post("/search")
    async def search(request: Request):
        body = await request.json()
        node = query_mod.parse(body["q"], body.get("field", "body"))
        hits = query_mod.search(node, index, int(body.get("k", 10)),
                                scope=scope_of(body))
        return {"hits": [{"doc": h.doc_id, "score": h.score,
                          "external_id": index.doc(h.doc_id).external_id}
                         for h in hits]}

    def set_payload(s):
        return {"name": s.name, "size": s.size, "provenance": s.provenance}

    @app.get("/sets")
    def list_sets():
        return [set_payload(s) for s in registry.list()]

    @app.post("/sets")
    async def create_set(request: Request):
        body = await request.json()
        name = body["name"]
        src = body["from"]
        with mutate_lock:
            if "query" in src:
                k = src.get("k", ALL)
                s = registry.save_from_search(
                    name, src["query"], k,
                    default_field=src.get("field", "body"))
            elif "label" in src:
                s = registry.from_label(name, src["label"])
            elif "combine" in src:
                c = src["combine"]
                s = registry.combine(name, c["op"], c["a"], c["b"])
            elif "sample" in src:
                c = src["sample"]
                s = registry.complement_or_sample(
                    name, c["source"], n=int(c["n"]), seed=c.get("seed"))
            elif "complement" in src:
                s = registry.complement_or_sample(name, src["complement"]["source"])
            else:
                return error(400, "unknown set source")
        return set_payload(s)

    @app.delete("/sets/{name}")
    def delete_set(name: str):
        with mutate_lock:
            registry.delete(name)
        return {"deleted": name}

    @app.post("/analytics/frequency")
    async def freq(request: Request):
        body = await request.json()
        rows = analytics.frequency(
            index, body["field"], sort=body.get("sort", "df"),
            top_k=int(body.get("top_k", 20)), scope=scope_of(body))
        return [{"term": r.term, "df": r.df, "ctf": r.ctf} for r in rows]

    @app.post("/analytics/cooccurrence")
    async def cooccur(request: Request):
        body = await request.json()
        scope = scope_of(body)
        max_docs = body.get("max_docs")
        x_docs, truncated = analytics.resolve_x(
            index, registry, body["x"],
            default_field=body.get("field", "body"),
            max_docs=int(max_docs) if max_docs else None)
        rows = analytics.cooccurrence(
            index, x_docs, body["y_field"], scope=scope,
            sort_metric=body.get("metric", "pmi"),
            min_pair=int(body.get("min_pair", 1)),
            top_k=int(body.get("top_k", 20)))
        return {
            "truncated": truncated,
            "rows": [
                {"term": r.term, "pair_count": r.pair_count, "df": r.df,
                 "pmi": r.pmi, "phi2": r.phi2}
                for r in rows
            ],
        }

    def resolve_categories(names):
        cats = []
        for name in names:
            try:
                docs = set(registry.get(name).doc_ids)
            except SavedSetError:
                docs = index.label_docs(name)
            cats.append(CategorySpec(name, docs))
        return cats

    @app.post("/features/kappa")
    async def kappa_rank(request: Request):
        body = await request.json()
        ranked = features.rank_features(
            index, resolve_categories(body["categories"]), body["fields"],
            include_other=bool(body.get("include_other", False)))
        top_k = int(body.get("top_k", 50))
        return {
            cat: [
                {"field": r.feature.field, "term": r.feature.term,
                 "kappa": r.kappa,
                 "table": {"a": r.table.a, "b": r.table.b,
                           "c": r.table.c, "d": r.table.d}}
                for r in rows[:top_k]
            ]
            for cat, rows in ranked.items()
        }

    @app.post("/features/export")
    async def export(request: Request):
        body = await request.json()
        config = ExportConfig(
            categories=resolve_categories(body["categories"]),
            feature_fields=body["fields"],
            include_other=bool(body.get("include_other", False)),
            max_features=body.get("max_features"),
            min_kappa=body.get("min_kappa"),
            weighting=body.get("weighting", "binary"),
            relation_name=body.get("relation_name", "textbench_export"),
        )
        negatives = None
        if body.get("negatives"):
            negatives = set(registry.get(body["negatives"]).doc_ids)
        buf = io.StringIO()
        features.export_arff(index, config, buf, negatives=negatives)
        return PlainTextResponse(
            buf.getvalue(),
            headers={
                "Content-Disposition":
                    f'attachment; filename="{config.relation_name}.arff"'
            },
        )

    @app.get("/docs/{doc_id}")
    def get_doc(doc_id: int):
        rec = index.doc(doc_id)
        return {"doc": rec.doc_id, "external_id": rec.external_id,
                "labels": rec.labels, "fields": rec.fields}

    return app


def serve(index_path, port: int = 8765, host: str = "127.0.0.1"):
    import uvicorn

    index = open_index(index_path)
    uvicorn.run(create_app(index), host=host, port=port)
