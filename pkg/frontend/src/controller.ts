// Orchestrates the analyst loop over the service API: frequency browsing,
// term-click-to-search, saved-set management, co-occurrence drilling, and
// feature export. Holds the ViewState; rendering is delegated to injected
// sinks so it can run headless in tests. At most one request per view is
// live: a newer request for the same view supersedes older responses.

import { ApiClient } from './api.js';
import {
    CORPUS_SCOPE,
    ExportConfigDraft,
    Tab,
    ViewState,
    exportDraftProblem,
    initialState,
    setScope,
    switchTab,
    toggleSort,
} from './state.js';
import {
    CooccurResponse,
    ExportRequest,
    FrequencyRow,
    Hit,
    KappaResponse,
    SavedSetInfo,
    SetSource,
} from './types.js';

export interface ViewSinks {
    frequency(field: string, rows: FrequencyRow[]): void;
    search(query: string, hits: Hit[]): void;
    cooccurrence(resp: CooccurResponse, state: ViewState): void;
    sets(sets: SavedSetInfo[]): void;
    kappa(resp: KappaResponse): void;
    download(filename: string, content: string): void;
    tabChanged(tab: Tab): void;
    error(view: string, message: string): void;
}

export class WorkbenchController {
    state: ViewState = initialState();
    private knownSets: string[] = [];
    private seq: Record<string, number> = {};
    private lastCooccur: { x: string; yField: string } | null = null;

    constructor(
        private readonly api: ApiClient,
        private readonly sinks: ViewSinks,
    ) {}

    private begin(view: string): number {
        this.seq[view] = (this.seq[view] ?? 0) + 1;
        return this.seq[view];
    }

    private current(view: string, token: number): boolean {
        return this.seq[view] === token;
    }

    private scopeParam(): string | undefined {
        return this.state.scope === CORPUS_SCOPE ? undefined : this.state.scope;
    }

    setTab(tab: Tab): void {
        this.state = switchTab(this.state, tab);
        this.sinks.tabChanged(tab);
    }

    async refreshSets(): Promise<SavedSetInfo[]> {
        const token = this.begin('sets');
        const sets = await this.api.listSets();
        if (!this.current('sets', token)) return sets;
        this.knownSets = sets.map((s) => s.name);
        this.sinks.sets(sets);
        return sets;
    }

    selectScope(scope: string): void {
        this.state = setScope(this.state, scope, this.knownSets);
    }

    async showFrequency(field: string, sort: 'df' | 'ctf' = 'df', topK = 20): Promise<void> {
        const token = this.begin('frequency');
        try {
            const rows = await this.api.frequency({
                field,
                sort,
                top_k: topK,
                set: this.scopeParam(),
            });
            if (!this.current('frequency', token)) return;
            this.sinks.frequency(field, rows);
        } catch (e) {
            if (this.current('frequency', token)) this.sinks.error('frequency', String(e));
        }
    }

    /** Clicking a frequency or co-occurrence term launches a field-scoped search. */
    async clickTerm(field: string, term: string): Promise<void> {
        await this.runSearch(`${field}:${term}`);
    }

    async runSearch(query: string, k = 10): Promise<void> {
        this.state = { ...switchTab(this.state, 'search'), query };
        this.sinks.tabChanged('search');
        const token = this.begin('search');
        try {
            const resp = await this.api.search({ q: query, k, set: this.scopeParam() });
            if (!this.current('search', token)) return;
            this.sinks.search(query, resp.hits);
        } catch (e) {
            if (this.current('search', token)) this.sinks.error('search', String(e));
        }
    }

    /** Saves the current search's matches as a named set, then refreshes the sidebar. */
    async saveCurrentSearch(name: string): Promise<void> {
        if (!this.state.query) {
            this.sinks.error('sets', 'run a search before saving it as a set');
            return;
        }
        await this.createSet(name, { query: this.state.query });
    }

    async createSet(name: string, from: SetSource): Promise<void> {
        try {
            await this.api.createSet(name, from);
            await this.refreshSets();
        } catch (e) {
            this.sinks.error('sets', String(e));
        }
    }

    async deleteSet(name: string): Promise<void> {
        try {
            await this.api.deleteSet(name);
            if (this.state.scope === name) {
                this.state = setScope(this.state, CORPUS_SCOPE, this.knownSets);
            }
            await this.refreshSets();
        } catch (e) {
            this.sinks.error('sets', String(e));
        }
    }

    async showCooccurrence(
        x: string,
        yField: string,
        minPair = 1,
        topK = 20,
        maxDocs?: number,
    ): Promise<void> {
        this.lastCooccur = { x, yField };
        const token = this.begin('cooccurrence');
        try {
            const metric = this.state.sort.column === 'phi2' ? 'phi2' : 'pmi';
            const resp = await this.api.cooccurrence({
                x,
                y_field: yField,
                metric,
                min_pair: minPair,
                top_k: topK,
                max_docs: maxDocs,
                set: this.scopeParam(),
            });
            if (!this.current('cooccurrence', token)) return;
            this.sinks.cooccurrence(resp, this.state);
        } catch (e) {
            if (this.current('cooccurrence', token)) this.sinks.error('cooccurrence', String(e));
        }
    }

    /** Column-header click: flip or change the sort metric and re-request. */
    async sortCooccurrence(column: 'pmi' | 'phi2'): Promise<void> {
        this.state = toggleSort(this.state, column);
        if (this.lastCooccur) {
            await this.showCooccurrence(this.lastCooccur.x, this.lastCooccur.yField);
        }
    }

    async showKappa(categories: string[], fields: string[], includeOther: boolean): Promise<void> {
        const token = this.begin('kappa');
        try {
            const resp = await this.api.kappa({
                categories,
                fields,
                include_other: includeOther,
            });
            if (!this.current('kappa', token)) return;
            this.sinks.kappa(resp);
        } catch (e) {
            if (this.current('kappa', token)) this.sinks.error('kappa', String(e));
        }
    }

    updateExportDraft(patch: Partial<ExportConfigDraft>): string | null {
        this.state = {
            ...this.state,
            exportDraft: { ...this.state.exportDraft, ...patch },
        };
        return exportDraftProblem(this.state.exportDraft);
    }

    /** The Create button: validate, fetch the ARFF, and hand it to the download sink. */
    async exportFeatures(): Promise<string | null> {
        const draft = this.state.exportDraft;
        const problem = exportDraftProblem(draft);
        if (problem) {
            this.sinks.error('features', problem);
            return null;
        }
        const req: ExportRequest = {
            categories: draft.categories,
            fields: draft.fields,
            include_other: draft.includeOther,
            weighting: draft.weighting,
            relation_name: draft.relationName,
        };
        if (draft.maxFeatures !== undefined) req.max_features = draft.maxFeatures;
        if (draft.minKappa !== undefined) req.min_kappa = draft.minKappa;
        try {
            const arff = await this.api.exportArff(req);
            this.sinks.download(`${draft.relationName}.arff`, arff);
            return arff;
        } catch (e) {
            this.sinks.error('features', String(e));
            return null;
        }
    }
}
