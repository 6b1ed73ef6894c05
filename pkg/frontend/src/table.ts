// DOM rendering of the institution list and the "Your selection"
// section. All decisions about what to show come from filters.ts; this
// file only turns view models into elements.

import type { InstitutionRow, SubjectResult } from './types';
import type { SortColumn, ViewState } from './state';
import { selectionView, visibleRows } from './filters';

export interface TableCallbacks {
    onSort(column: SortColumn): void;
    onToggle(institutionId: string): void;
    onClearSelection(): void;
}

const COLUMNS: { column: SortColumn; label: string }[] = [
    { column: 'name', label: 'Institution' },
    { column: 'country', label: 'Country' },
    { column: 'papers', label: 'Papers' },
    { column: 'probability', label: 'Probability of excellent papers' },
];

function probabilityBar(row: InstitutionRow, meanProb: number, maxProb: number): HTMLElement {
    const scale = (p: number) => `${(100 * p / maxProb).toFixed(2)}%`;
    const cell = document.createElement('div');
    cell.className = 'prob-bar';
    const whisker = document.createElement('span');
    whisker.className = 'whisker';
    whisker.style.left = scale(row.ci_goldstein[0]);
    whisker.style.width = `calc(${scale(row.ci_goldstein[1] - row.ci_goldstein[0])})`;
    const point = document.createElement('span');
    point.className = 'point';
    point.style.left = scale(row.eb_prob);
    point.title = row.eb_prob.toFixed(4);
    const mean = document.createElement('span');
    mean.className = 'mean-tick';
    mean.style.left = scale(meanProb);
    mean.title = `subject mean ${meanProb.toFixed(4)}`;
    cell.append(whisker, mean, point);
    return cell;
}

function institutionRow(
    row: InstitutionRow, subject: SubjectResult, state: ViewState,
    callbacks: TableCallbacks, maxProb: number,
): HTMLTableRowElement {
    const tr = document.createElement('tr');
    tr.dataset.id = row.institution_id;
    if (state.selection.includes(row.institution_id)) {
        tr.classList.add('selected');
    }
    const name = document.createElement('td');
    name.textContent = row.name;
    if (row.latitude === null || row.longitude === null) {
        const badge = document.createElement('span');
        badge.className = 'badge';
        badge.textContent = 'no location';
        badge.title = 'listed but not drawn on the map';
        name.append(' ', badge);
    }
    const country = document.createElement('td');
    country.textContent = row.country;
    const papers = document.createElement('td');
    papers.className = 'num';
    papers.textContent = String(row.n_papers);
    const prob = document.createElement('td');
    prob.append(probabilityBar(row, subject.model.grand_mean_prob, maxProb));
    tr.append(name, country, papers, prob);
    tr.addEventListener('click', () => callbacks.onToggle(row.institution_id));
    return tr;
}

export function renderTable(
    container: HTMLElement, subject: SubjectResult, state: ViewState,
    callbacks: TableCallbacks,
): void {
    container.replaceChildren();
    const rows = visibleRows(subject, state);
    const maxProb = Math.max(
        ...subject.institutions.map((row) => row.ci95[1]),
        subject.model.grand_mean_prob) * 1.05;

    const table = document.createElement('table');
    const head = document.createElement('tr');
    for (const { column, label } of COLUMNS) {
        const th = document.createElement('th');
        th.textContent = label;
        if (state.sortColumn === column) {
            th.textContent += state.sortDirection === 'asc' ? ' ▲' : ' ▼';
        }
        th.addEventListener('click', () => callbacks.onSort(column));
        head.append(th);
    }
    table.append(head);
    for (const row of rows) {
        table.append(institutionRow(row, subject, state, callbacks, maxProb));
    }
    container.append(table);
}

export function renderSelection(
    container: HTMLElement, subject: SubjectResult, state: ViewState,
    callbacks: TableCallbacks,
): void {
    container.replaceChildren();
    const heading = document.createElement('h2');
    heading.textContent = 'Your selection';
    container.append(heading);

    const view = selectionView(subject, state);
    if (view.entries.length === 0) {
        const hint = document.createElement('p');
        hint.className = 'hint';
        hint.textContent = 'Click institutions in the list or on the map to compare them.';
        container.append(hint);
        return;
    }

    const list = document.createElement('ul');
    for (const entry of view.entries) {
        const item = document.createElement('li');
        if (entry.row) {
            item.textContent =
                `${entry.row.name} — ${(100 * entry.row.eb_prob).toFixed(1)}%`;
        } else {
            item.textContent = `${entry.institutionId} — not available in this subject`;
            item.classList.add('unavailable');
        }
        list.append(item);
    }
    container.append(list);

    if (view.pairs.length > 0) {
        const verdicts = document.createElement('ul');
        verdicts.className = 'verdicts';
        for (const pair of view.pairs) {
            const item = document.createElement('li');
            item.dataset.verdict = pair.verdict;
            item.textContent = `${pair.a} vs ${pair.b}: ${pair.verdict}`;
            verdicts.append(item);
        }
        container.append(verdicts);
    }

    const clear = document.createElement('button');
    clear.textContent = 'Clear selection';
    clear.addEventListener('click', () => callbacks.onClearSelection());
    container.append(clear);
}
