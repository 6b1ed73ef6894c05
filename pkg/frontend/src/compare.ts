// Pairwise comparison semantics for "Your selection": two institutions
// differ at about the 5% level exactly when their comparison intervals
// (the 1.39-SE bars shown in the table) do not overlap. Touching bars
// count as overlap, so the verdict errs toward "not distinguishable".

import type { InstitutionRow } from './types';

export type Verdict = 'significantly different' | 'not distinguishable';

export function intervalsDisjoint(
    a: [number, number], b: [number, number]): boolean {
    return a[0] > b[1] || b[0] > a[1];
}

export function compareVerdict(a: InstitutionRow, b: InstitutionRow): Verdict {
    return intervalsDisjoint(a.ci_goldstein, b.ci_goldstein)
        ? 'significantly different'
        : 'not distinguishable';
}

export interface PairVerdict {
    a: string;
    b: string;
    verdict: Verdict;
}

/** Verdicts for every selected pair, in selection order. */
export function pairwiseVerdicts(rows: InstitutionRow[]): PairVerdict[] {
    const pairs: PairVerdict[] = [];
    for (let i = 0; i < rows.length; i += 1) {
        for (let j = i + 1; j < rows.length; j += 1) {
            pairs.push({
                a: rows[i].institution_id,
                b: rows[j].institution_id,
                verdict: compareVerdict(rows[i], rows[j]),
            });
        }
    }
    return pairs;
}
