"""textbench: a small text-mining workbench on top of its own search index.

Index annotated corpora into positional inverted + forward indexes, then
search, build saved document sets, run frequency / co-occurrence analysis
(PMI, phi-square), rank features by Cohen's kappa, and export sparse ARFF
feature vectors.
"""

from .analytics import (
    ContingencyTable,
    CooccurRow,
    FrequencyRow,
    contingency,
    cooccurrence,
    frequency,
    phi_square,
    pmi,
)
from .annotate import (
    AnnotatorConfig,
    Gazetteer,
    PositionedTerm,
    SidecarAnnotation,
    TokenStream,
    annotate_document,
    entity_annotate,
    ngram_annotate,
    nounphrase_annotate,
    tokenize,
)
from .features import (
    CategorySpec,
    ExportConfig,
    FeatureId,
    KappaRow,
    export_arff,
    kappa,
    rank_features,
    select,
    weight,
)
from .index import DocRecord, IndexHandle, IndexStoreError, build, open_index
from .ingest import IngestError, RawDocument, SourceFormat, parse_stream, strip_html
from .query import (
    BoolQuery,
    Hit,
    PhraseQuery,
    QuerySyntaxError,
    TermQuery,
    match,
    parse,
    search,
)
from .sets import ALL, SavedSet, SavedSetError, SavedSetRegistry

__version__ = "0.1.0"
