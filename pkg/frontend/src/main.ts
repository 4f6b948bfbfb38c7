// Browser entry point: binds the controller to the DOM. The layout is a
// saved-set sidebar plus a tabbed table area (the sidebar-plus-table
// arrangement is an interpretation; the underlying views are the five tabs).

import { ApiClient } from './api.js';
import { ViewSinks, WorkbenchController } from './controller.js';
import {
    renderCooccurTable,
    renderError,
    renderFrequencyTable,
    renderHits,
    renderKappaRankings,
    renderSetsSidebar,
    renderSetsTable,
} from './render.js';
import { TABS } from './state.js';

function el(id: string): HTMLElement {
    const node = document.getElementById(id);
    if (!node) throw new Error(`missing element #${id}`);
    return node;
}

function input(id: string): HTMLInputElement {
    return el(id) as HTMLInputElement;
}

function apiBaseUrl(): string {
    const params = new URLSearchParams(window.location.search);
    return params.get('api') ?? 'http://127.0.0.1:8765';
}

function triggerDownload(filename: string, content: string): void {
    const blob = new Blob([content], { type: 'text/plain' });
    const url = URL.createObjectURL(blob);
    const a = document.createElement('a');
    a.href = url;
    a.download = filename;
    a.click();
    URL.revokeObjectURL(url);
}

function main(): void {
    const api = new ApiClient(apiBaseUrl());

    const sinks: ViewSinks = {
        frequency: (field, rows) => {
            el('frequency-table').innerHTML = renderFrequencyTable(field, rows);
        },
        search: (query, hits) => {
            input('search-query').value = query;
            el('search-results').innerHTML = renderHits(hits);
        },
        cooccurrence: (resp, state) => {
            el('cooccur-table').innerHTML = renderCooccurTable(resp.rows, state.sort, resp.truncated);
        },
        sets: (sets) => {
            el('sets-sidebar').innerHTML = renderSetsSidebar(sets);
            el('sets-table').innerHTML = renderSetsTable(sets);
        },
        kappa: (resp) => {
            el('kappa-rankings').innerHTML = renderKappaRankings(resp);
        },
        download: triggerDownload,
        tabChanged: (tab) => {
            for (const t of TABS) {
                el(`tab-${t}`).classList.toggle('active', t === tab);
                el(`view-${t}`).hidden = t !== tab;
            }
        },
        error: (view, message) => {
            el(`${view}-error`).innerHTML = renderError(message);
        },
    };

    const controller = new WorkbenchController(api, sinks);

    for (const t of TABS) {
        el(`tab-${t}`).addEventListener('click', () => controller.setTab(t));
    }

    el('sets-sidebar').addEventListener('click', (ev) => {
        const target = ev.target as HTMLElement;
        const scope = target.dataset.scope;
        if (!scope) return;
        ev.preventDefault();
        controller.selectScope(scope);
        void controller.showFrequency(input('frequency-field').value || 'body');
    });

    el('frequency-table').addEventListener('click', (ev) => {
        const target = ev.target as HTMLElement;
        if (!target.dataset.term || !target.dataset.field) return;
        ev.preventDefault();
        void controller.clickTerm(target.dataset.field, target.dataset.term);
    });

    el('frequency-run').addEventListener('click', () => {
        const sort = input('frequency-sort').value === 'ctf' ? 'ctf' : 'df';
        void controller.showFrequency(input('frequency-field').value || 'body', sort);
    });

    el('search-run').addEventListener('click', () => {
        void controller.runSearch(input('search-query').value);
    });

    el('search-save').addEventListener('click', () => {
        const name = input('search-save-name').value;
        if (name) void controller.saveCurrentSearch(name);
    });

    el('cooccur-run').addEventListener('click', () => {
        void controller.showCooccurrence(
            input('cooccur-x').value,
            input('cooccur-field').value || 'body',
            Number(input('cooccur-min-pair').value) || 1,
            Number(input('cooccur-top').value) || 20,
            Number(input('cooccur-max-docs').value) || undefined,
        );
    });

    el('cooccur-table').addEventListener('click', (ev) => {
        const target = ev.target as HTMLElement;
        ev.preventDefault();
        if (target.dataset.sort === 'pmi' || target.dataset.sort === 'phi2') {
            void controller.sortCooccurrence(target.dataset.sort);
        } else if (target.dataset.term) {
            void controller.clickTerm(input('cooccur-field').value || 'body', target.dataset.term);
        }
    });

    el('sets-table').addEventListener('click', (ev) => {
        const target = ev.target as HTMLElement;
        if (!target.dataset.delete) return;
        ev.preventDefault();
        void controller.deleteSet(target.dataset.delete);
    });

    const readDraft = () => {
        const maxFeatures = Number(input('export-max-features').value);
        const minKappa = Number(input('export-min-kappa').value);
        const weighting = input('export-weighting').value;
        const problem = controller.updateExportDraft({
            categories: input('export-categories')
                .value.split(',')
                .map((s) => s.trim())
                .filter(Boolean),
            fields: input('export-fields')
                .value.split(',')
                .map((s) => s.trim())
                .filter(Boolean),
            includeOther: input('export-include-other').checked,
            maxFeatures: maxFeatures > 0 ? maxFeatures : undefined,
            minKappa: input('export-min-kappa').value !== '' ? minKappa : undefined,
            weighting: weighting === 'tf' || weighting === 'tfidf' ? weighting : 'binary',
            relationName: input('export-relation').value || 'textbench_export',
        });
        (el('export-create') as HTMLButtonElement).disabled = problem !== null;
        el('features-error').textContent = problem ?? '';
        return problem;
    };

    for (const id of [
        'export-categories',
        'export-fields',
        'export-include-other',
        'export-max-features',
        'export-min-kappa',
        'export-weighting',
        'export-relation',
    ]) {
        el(id).addEventListener('input', readDraft);
    }

    el('kappa-run').addEventListener('click', () => {
        if (readDraft() !== null) return;
        const draft = controller.state.exportDraft;
        void controller.showKappa(draft.categories, draft.fields, draft.includeOther);
    });

    el('export-create').addEventListener('click', () => {
        if (readDraft() !== null) return;
        void controller.exportFeatures();
    });

    controller.setTab('frequency');
    void controller.refreshSets();
    void controller.showFrequency('body');
}

main();
