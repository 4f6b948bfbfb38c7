// Per-browser-session view state. Saved sets live server-side; this module
// only tracks which tab is open, the current query and scope, table sorting,
// and the pending export configuration.

export type Tab = 'search' | 'frequency' | 'cooccurrence' | 'sets' | 'features';

export const TABS: Tab[] = ['search', 'frequency', 'cooccurrence', 'sets', 'features'];

export const CORPUS_SCOPE = 'corpus';

export type SortDirection = 'asc' | 'desc';

export interface SortState {
    column: string;
    direction: SortDirection;
}

export interface ExportConfigDraft {
    categories: string[];
    fields: string[];
    includeOther: boolean;
    maxFeatures?: number;
    minKappa?: number;
    weighting: 'binary' | 'tf' | 'tfidf';
    relationName: string;
}

export interface ViewState {
    activeTab: Tab;
    query: string;
    scope: string; // a saved-set name, or CORPUS_SCOPE for the whole corpus
    sort: SortState;
    exportDraft: ExportConfigDraft;
}

export function initialState(): ViewState {
    return {
        activeTab: 'frequency',
        query: '',
        scope: CORPUS_SCOPE,
        sort: { column: 'pmi', direction: 'desc' },
        exportDraft: {
            categories: [],
            fields: ['body'],
            includeOther: false,
            weighting: 'binary',
            relationName: 'textbench_export',
        },
    };
}

export function switchTab(state: ViewState, tab: Tab): ViewState {
    return { ...state, activeTab: tab };
}

/** Scope must name an existing saved set, or be the whole-corpus sentinel. */
export function setScope(state: ViewState, scope: string, knownSets: string[]): ViewState {
    if (scope !== CORPUS_SCOPE && !knownSets.includes(scope)) {
        throw new Error(`unknown scope ${scope}`);
    }
    return { ...state, scope };
}

/** Clicking the active sort column flips direction; a new column sorts descending. */
export function toggleSort(state: ViewState, column: string): ViewState {
    const sort: SortState =
        state.sort.column === column
            ? { column, direction: state.sort.direction === 'desc' ? 'asc' : 'desc' }
            : { column, direction: 'desc' };
    return { ...state, sort };
}

/** The export form needs at least one category and a selection criterion. */
export function exportDraftProblem(draft: ExportConfigDraft): string | null {
    if (draft.categories.length === 0) return 'pick at least one category';
    if (draft.fields.length === 0) return 'pick at least one feature field';
    if (draft.maxFeatures === undefined && draft.minKappa === undefined) {
        return 'set a feature count and/or a kappa cutoff';
    }
    return null;
}
