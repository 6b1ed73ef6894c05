import 'leaflet/dist/leaflet.css';
import './style.css';

import { loadResults } from './load';
import { InstitutionMap } from './map';
import {
    clearSelection,
    decodeHash,
    encodeHash,
    setOnlySignificant,
    setSearch,
    setViewport,
    switchSubject,
    toggleSelection,
    toggleSort,
    type ViewState,
} from './state';
import { renderSelection, renderTable } from './table';
import type { ResultsIndex } from './types';

function element<T extends HTMLElement>(id: string): T {
    const node = document.getElementById(id);
    if (!node) throw new Error(`missing #${id}`);
    return node as T;
}

function showError(message: string): void {
    const banner = element<HTMLDivElement>('banner');
    banner.textContent = message;
    banner.hidden = false;
}

async function start(): Promise<void> {
    const params = new URLSearchParams(window.location.search);
    let index: ResultsIndex;
    try {
        index = await loadResults(params.get('results') ?? 'results.json');
    } catch (error) {
        showError(error instanceof Error ? error.message : String(error));
        return;
    }

    const codes = [...index.subjects.keys()];
    if (codes.length === 0) {
        showError('no data: the results file contains no subject areas');
        return;
    }

    let state: ViewState = decodeHash(window.location.hash, codes[0]);
    if (!index.subjects.has(state.subject)) {
        state = { ...state, subject: codes[0] };
    }

    const subjectSelect = element<HTMLSelectElement>('subject');
    for (const code of codes) {
        const option = document.createElement('option');
        option.value = code;
        const subject = index.subjects.get(code)!;
        option.textContent = subject.display_name;
        if (!subject.model.ranking_reasonable) {
            option.textContent += ' (ranking not reasonable)';
        }
        subjectSelect.append(option);
    }

    const searchBox = element<HTMLInputElement>('search');
    const significantBox = element<HTMLInputElement>('only-significant');
    const tableHost = element<HTMLDivElement>('table-host');
    const selectionHost = element<HTMLDivElement>('selection-host');
    const note = element<HTMLParagraphElement>('model-note');

    const callbacks = {
        onSort: (column: Parameters<typeof toggleSort>[1]) =>
            update(toggleSort(state, column)),
        onToggle: (id: string) => update(toggleSelection(state, id)),
        onClearSelection: () => update(clearSelection(state)),
        onViewport: (viewport: Parameters<typeof setViewport>[1]) =>
            update(setViewport(state, viewport), { skipMapViewport: true }),
    };
    const map = new InstitutionMap(
        element<HTMLDivElement>('map'), state.viewport, callbacks,
        params.get('tiles') ?? undefined);

    function update(next: ViewState, options: { skipMapViewport?: boolean } = {}): void {
        state = next;
        const subject = index.subjects.get(state.subject)!;
        subjectSelect.value = state.subject;
        searchBox.value = state.search;
        significantBox.checked = state.onlySignificant;
        note.textContent = subject.model.ranking_reasonable
            ? `${subject.n_institutions} institutions; mean probability ` +
              `${(100 * subject.model.grand_mean_prob).toFixed(1)}%`
            : 'No systematic differences between institutions in this ' +
              'subject: ranking and comparison are not reasonable.';
        renderTable(tableHost, subject, state, callbacks);
        renderSelection(selectionHost, subject, state, callbacks);
        map.render(subject, state);
        if (!options.skipMapViewport) {
            map.setViewport(state.viewport);
        }
        history.replaceState(null, '', encodeHash(state));
    }

    subjectSelect.addEventListener('change', () =>
        update(switchSubject(state, subjectSelect.value)));
    searchBox.addEventListener('input', () =>
        update(setSearch(state, searchBox.value)));
    significantBox.addEventListener('change', () =>
        update(setOnlySignificant(state, significantBox.checked)));

    update(state);
}

start();
