// Pure HTML-string renderers. No analytic logic lives here: every value in
// the markup is copied verbatim from a service response (numbers are not
// recomputed, rounded, or aggregated), which the tests verify by recording
// API traffic.

import { CooccurRow, FrequencyRow, Hit, KappaRow, SavedSetInfo } from './types.js';
import { SortState } from './state.js';

export function escapeHtml(s: string): string {
    return s
        .replace(/&/g, '&amp;')
        .replace(/</g, '&lt;')
        .replace(/>/g, '&gt;')
        .replace(/"/g, '&quot;');
}

function td(value: string | number): string {
    return `<td>${escapeHtml(String(value))}</td>`;
}

export function renderEmptyState(what: string): string {
    return `<p class="empty">no ${escapeHtml(what)} to show</p>`;
}

export function renderError(message: string): string {
    return `<p class="error">${escapeHtml(message)}</p>`;
}

/** Frequency table; each term cell is a link that launches a field-scoped search. */
export function renderFrequencyTable(field: string, rows: FrequencyRow[]): string {
    if (rows.length === 0) return renderEmptyState('terms');
    const body = rows
        .map(
            (r) =>
                `<tr><td><a href="#" data-term="${escapeHtml(r.term)}" ` +
                `data-field="${escapeHtml(field)}">${escapeHtml(r.term)}</a></td>` +
                `${td(r.df)}${td(r.ctf)}</tr>`,
        )
        .join('');
    return (
        '<table><thead><tr><th>Term</th><th>df</th><th>ctf</th></tr></thead>' +
        `<tbody>${body}</tbody></table>`
    );
}

function sortMarker(sort: SortState, column: string): string {
    if (sort.column !== column) return '';
    return sort.direction === 'desc' ? ' ▼' : ' ▲';
}

/** Co-occurrence table with clickable PMI / Phi-Square sort headers. */
export function renderCooccurTable(rows: CooccurRow[], sort: SortState, truncated: boolean): string {
    if (rows.length === 0) return renderEmptyState('co-occurring terms');
    const body = rows
        .map(
            (r) =>
                `<tr><td><a href="#" data-term="${escapeHtml(r.term)}">` +
                `${escapeHtml(r.term)}</a></td>` +
                `${td(r.pair_count)}${td(r.df)}${td(r.pmi)}${td(r.phi2)}</tr>`,
        )
        .join('');
    const note = truncated
        ? '<p class="note">x was truncated to the top-ranked matches (approximation)</p>'
        : '';
    return (
        note +
        '<table><thead><tr><th>Term</th><th>Pair Count</th><th>df</th>' +
        `<th><a href="#" data-sort="pmi">PMI${sortMarker(sort, 'pmi')}</a></th>` +
        `<th><a href="#" data-sort="phi2">Phi-Square${sortMarker(sort, 'phi2')}</a></th>` +
        `</tr></thead><tbody>${body}</tbody></table>`
    );
}

export function renderHits(hits: Hit[]): string {
    if (hits.length === 0) return renderEmptyState('matching documents');
    const body = hits
        .map((h) => `<tr>${td(h.doc)}${td(h.external_id)}${td(h.score)}</tr>`)
        .join('');
    return (
        '<table><thead><tr><th>Doc</th><th>Id</th><th>Score</th></tr></thead>' +
        `<tbody>${body}</tbody></table>`
    );
}

/** Saved-set sidebar: name + size, as a scope picker. */
export function renderSetsSidebar(sets: SavedSetInfo[]): string {
    const items = sets
        .map(
            (s) =>
                `<li><a href="#" data-scope="${escapeHtml(s.name)}">` +
                `${escapeHtml(s.name)}</a> <span class="size">${escapeHtml(
                    String(s.size),
                )}</span></li>`,
        )
        .join('');
    return `<ul class="sets"><li><a href="#" data-scope="corpus">corpus</a></li>${items}</ul>`;
}

export function renderSetsTable(sets: SavedSetInfo[]): string {
    if (sets.length === 0) return renderEmptyState('saved sets');
    const body = sets
        .map(
            (s) =>
                `<tr>${td(s.name)}${td(s.size)}${td(s.provenance)}` +
                `<td><a href="#" data-delete="${escapeHtml(s.name)}">delete</a></td></tr>`,
        )
        .join('');
    return (
        '<table><thead><tr><th>Name</th><th>Size</th><th>Provenance</th><th></th>' +
        `</tr></thead><tbody>${body}</tbody></table>`
    );
}

export function renderKappaRankings(ranked: Record<string, KappaRow[]>): string {
    const sections = Object.entries(ranked).map(([cat, rows]) => {
        const body = rows
            .map((r) => `<tr>${td(r.field)}${td(r.term)}${td(r.kappa)}</tr>`)
            .join('');
        return (
            `<h3>${escapeHtml(cat)}</h3>` +
            '<table><thead><tr><th>Field</th><th>Term</th><th>Kappa</th></tr></thead>' +
            `<tbody>${body}</tbody></table>`
        );
    });
    return sections.join('');
}
