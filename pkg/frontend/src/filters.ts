// Pure table logic: filtering, sorting, and the "Your selection" view
// model. The DOM layer renders whatever these functions return, which
// keeps every interaction contract testable without a browser.

import type { InstitutionRow, SubjectResult } from './types';
import type { ViewState } from './state';
import { compareVerdict, pairwiseVerdicts, type PairVerdict } from './compare';

function directed(cmp: number, direction: 'asc' | 'desc'): number {
    return direction === 'asc' ? cmp : -cmp;
}

export function sortRows(
    rows: InstitutionRow[], state: ViewState): InstitutionRow[] {
    const { sortColumn, sortDirection } = state;
    const sorted = [...rows];
    sorted.sort((a, b) => {
        let cmp: number;
        switch (sortColumn) {
            case 'name':
                cmp = a.name.localeCompare(b.name);
                break;
            case 'papers':
                cmp = a.n_papers - b.n_papers;
                break;
            case 'probability':
                cmp = a.eb_prob - b.eb_prob;
                break;
            case 'country':
                // two-level: country first, probability inside a country
                cmp = a.country.localeCompare(b.country);
                if (cmp === 0) cmp = a.eb_prob - b.eb_prob;
                break;
        }
        if (cmp === 0) cmp = a.institution_id.localeCompare(b.institution_id);
        return directed(cmp, sortDirection);
    });
    return sorted;
}

/** Rows shown in the main list under the current search/filter/sort. */
export function visibleRows(
    subject: SubjectResult, state: ViewState): InstitutionRow[] {
    const query = state.search.trim().toLowerCase();
    let rows = subject.institutions;
    if (query) {
        rows = rows.filter((row) => row.name.toLowerCase().includes(query));
    }
    if (state.onlySignificant) {
        rows = rows.filter((row) => row.sig_vs_mean !== 'not_distinguishable');
    }
    return sortRows(rows, state);
}

export interface SelectionEntry {
    institutionId: string;
    row: InstitutionRow | null; // null: not present in this subject
}

export interface SelectionView {
    entries: SelectionEntry[];
    pairs: PairVerdict[];
}

/** The "Your selection" section: never filtered, ordered like the list.
 *
 * Institutions absent from the current subject stay listed as
 * unavailable so the selection survives subject switches intact.
 */
export function selectionView(
    subject: SubjectResult, state: ViewState): SelectionView {
    const bySubject = new Map(
        subject.institutions.map((row) => [row.institution_id, row]));
    const present: InstitutionRow[] = [];
    const entries: SelectionEntry[] = state.selection.map((institutionId) => {
        const row = bySubject.get(institutionId) ?? null;
        if (row) present.push(row);
        return { institutionId, row };
    });
    const orderedPresent = sortRows(present, state);
    const ordered: SelectionEntry[] = [
        ...orderedPresent.map((row) => ({ institutionId: row.institution_id, row })),
        ...entries.filter((entry) => entry.row === null),
    ];
    return { entries: ordered, pairs: pairwiseVerdicts(orderedPresent) };
}

export { compareVerdict };
