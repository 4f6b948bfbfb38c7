// Thin typed client for the textbench service; the only module that
// performs network I/O. The base URL is configurable and the fetch
// implementation injectable for tests.

import {
    CooccurRequest,
    CooccurResponse,
    ExportRequest,
    FrequencyRequest,
    FrequencyRow,
    KappaRequest,
    KappaResponse,
    SavedSetInfo,
    SearchRequest,
    SearchResponse,
    SetSource,
    StatsResponse,
} from './types.js';

export interface FetchResponseLike {
    ok: boolean;
    status: number;
    json(): Promise<unknown>;
    text(): Promise<string>;
}

export type FetchLike = (
    url: string,
    init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<FetchResponseLike>;

export class ApiError extends Error {
    constructor(
        public readonly status: number,
        message: string,
    ) {
        super(message);
    }
}

export class ApiClient {
    constructor(
        private readonly baseUrl: string,
        private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
    ) {
        this.baseUrl = baseUrl.replace(/\/+$/, '');
    }

    private async request(method: string, path: string, body?: unknown): Promise<FetchResponseLike> {
        const init: Parameters<FetchLike>[1] = { method };
        if (body !== undefined) {
            init.headers = { 'Content-Type': 'application/json' };
            init.body = JSON.stringify(body);
        }
        const resp = await this.fetchFn(this.baseUrl + path, init);
        if (!resp.ok) {
            let message = `HTTP ${resp.status}`;
            try {
                const payload = (await resp.json()) as { error?: string };
                if (payload && payload.error) message = payload.error;
            } catch {
                // non-JSON error body; keep the status message
            }
            throw new ApiError(resp.status, message);
        }
        return resp;
    }

    private async json<T>(method: string, path: string, body?: unknown): Promise<T> {
        const resp = await this.request(method, path, body);
        return (await resp.json()) as T;
    }

    stats(): Promise<StatsResponse> {
        return this.json('GET', '/stats');
    }

    search(req: SearchRequest): Promise<SearchResponse> {
        return this.json('POST', '/search', req);
    }

    listSets(): Promise<SavedSetInfo[]> {
        return this.json('GET', '/sets');
    }

    createSet(name: string, from: SetSource): Promise<SavedSetInfo> {
        return this.json('POST', '/sets', { name, from });
    }

    deleteSet(name: string): Promise<{ deleted: string }> {
        return this.json('DELETE', `/sets/${encodeURIComponent(name)}`);
    }

    frequency(req: FrequencyRequest): Promise<FrequencyRow[]> {
        return this.json('POST', '/analytics/frequency', req);
    }

    cooccurrence(req: CooccurRequest): Promise<CooccurResponse> {
        return this.json('POST', '/analytics/cooccurrence', req);
    }

    kappa(req: KappaRequest): Promise<KappaResponse> {
        return this.json('POST', '/features/kappa', req);
    }

    async exportArff(req: ExportRequest): Promise<string> {
        const resp = await this.request('POST', '/features/export', req);
        return resp.text();
    }
}
