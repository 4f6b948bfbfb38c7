"""Command-line interface: batch access to indexing, search, and analysis.

Exit codes: 0 ok, 1 usage error, 2 data/index error. Tabular results go to
stdout as TSV (or JSON with --json); diagnostics go to stderr.
"""

import argparse
import json
import sys

from . import analytics, features, query as query_mod
from .analytics import AnalyticsError
from .annotate import AnnotatorConfig, load_gazetteer, load_pos_lexicon, load_sidecar
from .features import CategorySpec, ExportConfig, FeatureError
from .index import IndexStoreError, build, open_index
from .ingest import IngestError, SourceFormat, parse_stream
from .query import QuerySyntaxError
from .sets import ALL, SavedSetError, SavedSetRegistry

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


def _emit(rows, header, as_json):
    if as_json:
        print(json.dumps([dict(zip(header, r)) for r in rows]))
    else:
        print("\t".join(header))
        for row in rows:
            print("\t".join(str(v) for v in row))


def _float(v):
    return format(v, ".6g")


def cmd_index(args):
    annotators = set(a.strip() for a in args.annotators.split(",") if a.strip())
    known = {"bigram", "trigram", "entities", "nounphrase"}
    unknown = annotators - known
    if unknown:
        raise IngestError(f"unknown annotators: {sorted(unknown)}")
    ngrams = tuple(n for n, name in ((2, "bigram"), (3, "trigram"))
                   if name in annotators)
    gazetteer = None
    if "entities" in annotators:
        if args.gazetteer is None:
            raise IngestError("--gazetteer is required with the entities annotator")
        gazetteer = load_gazetteer(args.gazetteer)
    pos_lexicon = None
    if "nounphrase" in annotators:
        pos_lexicon = load_pos_lexicon(args.pos_lexicon) if args.pos_lexicon else {}
    sidecar = load_sidecar(args.sidecar) if args.sidecar else None
    config = AnnotatorConfig(
        ngrams=ngrams,
        gazetteer=gazetteer,
        pos_lexicon=pos_lexicon,
        sidecar=sidecar,
    )
    docs = parse_stream(SourceFormat(args.format), args.input, strict=args.strict)
    handle = build(docs, config, args.out)
    print(f"indexed {handle.n_docs} documents into {args.out}", file=sys.stderr)
    return EXIT_OK


def cmd_search(args):
    with open_index(args.index) as index:
        registry = _registry(index, args)
        scope = _scope(registry, args)
        node = query_mod.parse(args.query, args.field)
        hits = query_mod.search(node, index, args.k, scope=scope)
        rows = [
            (h.doc_id, index.doc(h.doc_id).external_id, _float(h.score))
            for h in hits
        ]
        _emit(rows, ("doc", "external_id", "score"), args.json)
    return EXIT_OK


def cmd_freq(args):
    with open_index(args.index) as index:
        registry = _registry(index, args)
        scope = _scope(registry, args)
        rows = analytics.frequency(index, args.field, sort=args.sort,
                                   top_k=args.top, scope=scope)
        _emit([(r.term, r.df, r.ctf) for r in rows],
              ("term", "df", "ctf"), args.json)
    return EXIT_OK


def cmd_cooccur(args):
    with open_index(args.index) as index:
        registry = _registry(index, args)
        scope = _scope(registry, args)
        x = f"set:{args.x_set}" if args.x_set else args.x
        if x is None:
            raise AnalyticsError("one of --x or --x-set is required")
        x_docs, truncated = analytics.resolve_x(index, registry, x,
                                                max_docs=args.max_docs)
        if truncated:
            print("note: x truncated to top-n matches (approximation)",
                  file=sys.stderr)
        rows = analytics.cooccurrence(
            index, x_docs, args.field, scope=scope, sort_metric=args.metric,
            min_pair=args.min_pair, top_k=args.top)
        _emit(
            [(r.term, r.pair_count, r.df, _float(r.pmi), _float(r.phi2))
             for r in rows],
            ("term", "pair_count", "df", "pmi", "phi2"), args.json)
    return EXIT_OK


def cmd_sets(args):
    with open_index(args.index) as index:
        registry = _registry(index, args, required=False)
        action = args.action
        if action == "save":
            k = ALL if args.k is None else args.k
            registry.save_from_search(args.name, args.query, k)
        elif action == "label":
            registry.from_label(args.name, args.label)
        elif action == "combine":
            registry.combine(args.name, args.op, args.a, args.b)
        elif action == "sample":
            registry.complement_or_sample(args.name, args.source,
                                          n=args.n, seed=args.seed)
        elif action == "complement":
            registry.complement_or_sample(args.name, args.source)
        elif action == "list":
            _emit([(s.name, s.size, s.provenance) for s in registry.list()],
                  ("name", "size", "provenance"), args.json)
            return EXIT_OK
        elif action == "delete":
            registry.delete(args.name)
        if args.sets_file:
            registry.persist(args.sets_file)
    return EXIT_OK


def cmd_kappa(args):
    with open_index(args.index) as index:
        registry = _registry(index, args)
        cats = []
        for name in args.categories.split(","):
            name = name.strip()
            try:
                docs = set(registry.get(name).doc_ids)
            except SavedSetError:
                docs = index.label_docs(name)
            cats.append(CategorySpec(name, docs))
        ranked = features.rank_features(
            index, cats, args.fields.split(","),
            include_other=args.include_other)
        rows = []
        for cat in [c.name for c in cats] + (
                [features.OTHER_CATEGORY] if args.include_other else []):
            for r in ranked[cat][: args.top]:
                rows.append((cat, r.feature.field, r.feature.term,
                             _float(r.kappa)))
        _emit(rows, ("category", "field", "term", "kappa"), args.json)
    return EXIT_OK


def cmd_export_arff(args):
    with open_index(args.index) as index:
        registry = _registry(index, args)
        raw = json.loads(open(args.config, encoding="utf-8").read())
        cats = []
        for name in raw["categories"]:
            try:
                docs = set(registry.get(name).doc_ids)
            except SavedSetError:
                docs = index.label_docs(name)
            cats.append(CategorySpec(name, docs))
        config = ExportConfig(
            categories=cats,
            feature_fields=raw["fields"],
            include_other=raw.get("include_other", False),
            max_features=raw.get("max_features"),
            min_kappa=raw.get("min_kappa"),
            weighting=raw.get("weighting", "binary"),
            relation_name=raw.get("relation_name", "textbench_export"),
        )
        negatives = None
        if raw.get("negatives"):
            negatives = set(registry.get(raw["negatives"]).doc_ids)
        with open(args.out, "w", encoding="utf-8") as fh:
            count = features.export_arff(index, config, fh, negatives=negatives)
        print(f"wrote {count} instances to {args.out}", file=sys.stderr)
    return EXIT_OK


def cmd_serve(args):
    from .service import serve

    serve(args.index, port=args.port, host=args.host)
    return EXIT_OK


def _registry(index, args, required=True):
    registry = SavedSetRegistry(index)
    sets_file = getattr(args, "sets_file", None)
    if sets_file:
        try:
            registry.load(sets_file)
        except FileNotFoundError:
            pass
    return registry


def _scope(registry, args):
    name = getattr(args, "set", None)
    if name:
        return set(registry.get(name).doc_ids)
    return None


def _add_common(p):
    p.add_argument("--json", action="store_true", help="JSON output")
    p.add_argument("--sets-file", help="saved-set snapshot to load/update")


def build_parser():
    parser = argparse.ArgumentParser(prog="textbench")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("index", help="build an index from a corpus")
    p.add_argument("input", help="input file or directory")
    p.add_argument("--format", required=True,
                   choices=[f.value for f in SourceFormat])
    p.add_argument("--annotators", default="",
                   help="comma list of bigram,trigram,entities,nounphrase")
    p.add_argument("--gazetteer")
    p.add_argument("--pos-lexicon")
    p.add_argument("--sidecar")
    p.add_argument("--strict", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_index, json=False)

    p = sub.add_parser("search", help="ranked search")
    p.add_argument("index")
    p.add_argument("query")
    p.add_argument("-k", type=int, default=10)
    p.add_argument("--field", default="body")
    p.add_argument("--set")
    _add_common(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("freq", help="frequency analysis")
    p.add_argument("index")
    p.add_argument("--field", required=True)
    p.add_argument("--sort", choices=("df", "ctf"), default="df")
    p.add_argument("--top", type=int, default=20)
    p.add_argument("--set")
    _add_common(p)
    p.set_defaults(func=cmd_freq)

    p = sub.add_parser("cooccur", help="co-occurrence analysis")
    p.add_argument("index")
    p.add_argument("--x")
    p.add_argument("--x-set")
    p.add_argument("--field", required=True)
    p.add_argument("--metric", choices=("pmi", "phi2"), default="pmi")
    p.add_argument("--min-pair", type=int, default=1)
    p.add_argument("--max-docs", type=int)
    p.add_argument("--top", type=int, default=20)
    p.add_argument("--set")
    _add_common(p)
    p.set_defaults(func=cmd_cooccur)

    p = sub.add_parser("sets", help="saved-set management")
    p.add_argument("index")
    p.add_argument("action", choices=("save", "label", "combine", "sample",
                                      "complement", "list", "delete"))
    p.add_argument("--name")
    p.add_argument("--query")
    p.add_argument("-k", type=int)
    p.add_argument("--label")
    p.add_argument("--op", choices=("union", "intersect", "difference"))
    p.add_argument("--a")
    p.add_argument("--b")
    p.add_argument("--source")
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int)
    _add_common(p)
    p.set_defaults(func=cmd_sets)

    p = sub.add_parser("kappa", help="kappa feature ranking")
    p.add_argument("index")
    p.add_argument("--categories", required=True,
                   help="comma list of set names or labels")
    p.add_argument("--fields", required=True, help="comma list of fields")
    p.add_argument("--include-other", action="store_true")
    p.add_argument("--top", type=int, default=20)
    _add_common(p)
    p.set_defaults(func=cmd_kappa)

    p = sub.add_parser("export-arff", help="export sparse ARFF feature vectors")
    p.add_argument("index")
    p.add_argument("--config", required=True, help="JSON export config")
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_export_arff)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("index")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=cmd_serve, json=False)

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (QuerySyntaxError, SavedSetError, AnalyticsError, FeatureError,
            IngestError, IndexStoreError, FileNotFoundError, KeyError,
            ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
