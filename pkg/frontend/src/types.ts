// JSON shapes of the textbench service endpoints.

export interface StatsResponse {
    n_docs: number;
    fields: string[];
    labels: string[];
    fingerprint: string;
}

export interface Hit {
    doc: number;
    score: number;
    external_id: string;
}

export interface SearchResponse {
    hits: Hit[];
}

export interface FrequencyRow {
    term: string;
    df: number;
    ctf: number;
}

export interface CooccurRow {
    term: string;
    pair_count: number;
    df: number;
    pmi: number;
    phi2: number;
}

export interface CooccurResponse {
    truncated: boolean;
    rows: CooccurRow[];
}

export interface SavedSetInfo {
    name: string;
    size: number;
    provenance: string;
}

export interface KappaRow {
    field: string;
    term: string;
    kappa: number;
    table: { a: number; b: number; c: number; d: number };
}

export type KappaResponse = Record<string, KappaRow[]>;

export type SetSource =
    | { query: string; k?: number; field?: string }
    | { label: string }
    | { combine: { op: 'union' | 'intersect' | 'difference'; a: string; b: string } }
    | { sample: { source: string; n: number; seed?: number } }
    | { complement: { source: string } };

export interface SearchRequest {
    q: string;
    k?: number;
    field?: string;
    set?: string;
}

export interface FrequencyRequest {
    field: string;
    sort?: 'df' | 'ctf';
    top_k?: number;
    set?: string;
}

export interface CooccurRequest {
    x: string;
    y_field: string;
    metric?: 'pmi' | 'phi2';
    min_pair?: number;
    max_docs?: number;
    top_k?: number;
    set?: string;
}

export interface KappaRequest {
    categories: string[];
    fields: string[];
    include_other?: boolean;
    top_k?: number;
}

export interface ExportRequest {
    categories: string[];
    fields: string[];
    include_other?: boolean;
    max_features?: number;
    min_kappa?: number;
    weighting?: 'binary' | 'tf' | 'tfidf';
    relation_name?: string;
    negatives?: string;
}
