// Three-subject fixture mirroring the exporter's schema. PHYS holds the
// acceptance cases: ALPHA/BETA have disjoint comparison intervals and
// differing paper counts (500 vs 2000); GAMMA is indistinguishable from
// the mean; DELTA lacks coordinates.

import type { InstitutionRow, ModelStats, ResultsDocument, SubjectResult } from '../src/types';

function model(overrides: Partial<ModelStats> = {}): ModelStats {
    return {
        beta0: -1.7346,
        sigma2: 0.25,
        se_beta0: 0.03,
        se_sigma2: 0.05,
        icc: 0.070621,
        wald_z: 5.0,
        wald_p: 2.87e-7,
        ranking_reasonable: true,
        grand_mean_prob: 0.15,
        mean_raw_proportion: 0.16,
        ...overrides,
    };
}

export function row(overrides: Partial<InstitutionRow>): InstitutionRow {
    return {
        institution_id: 'X',
        name: 'Institution X',
        country: 'US',
        latitude: 40.0,
        longitude: -74.0,
        n_papers: 1000,
        n_top: 150,
        raw_prop: 0.15,
        eb_logit: -1.7346,
        eb_se: 0.1,
        eb_prob: 0.15,
        ci95: [0.1267, 0.1767],
        ci_goldstein: [0.131, 0.1711],
        sig_vs_mean: 'not_distinguishable',
        sig_vs_mean_goldstein: 'not_distinguishable',
        rank_score: 0.0,
        rank: 1,
        ...overrides,
    };
}

function subject(code: string, institutions: InstitutionRow[],
                 overrides: Partial<SubjectResult> = {}): SubjectResult {
    return {
        subject: code,
        display_name: code,
        n_institutions: institutions.length,
        model: model(),
        institutions,
        ...overrides,
    };
}

export const PHYS_ROWS: InstitutionRow[] = [
    row({
        institution_id: 'ALPHA', name: 'Alpha Institute', country: 'US',
        n_papers: 2000, n_top: 500, raw_prop: 0.25, eb_prob: 0.245,
        eb_logit: -1.125, ci95: [0.221, 0.27], ci_goldstein: [0.228, 0.262],
        sig_vs_mean: 'above', sig_vs_mean_goldstein: 'above',
        rank_score: 0.49, rank: 1,
    }),
    row({
        institution_id: 'BETA', name: 'Beta University', country: 'DE',
        n_papers: 500, n_top: 40, raw_prop: 0.08, eb_prob: 0.09,
        eb_logit: -2.313, ci95: [0.072, 0.112], ci_goldstein: [0.077, 0.105],
        sig_vs_mean: 'below', sig_vs_mean_goldstein: 'below',
        rank_score: -0.51, rank: 4,
    }),
    row({
        institution_id: 'GAMMA', name: 'Gamma College', country: 'US',
        n_papers: 800, n_top: 122, raw_prop: 0.1525, eb_prob: 0.152,
        eb_logit: -1.719, ci95: [0.132, 0.174], ci_goldstein: [0.137, 0.168],
        sig_vs_mean: 'not_distinguishable',
        sig_vs_mean_goldstein: 'not_distinguishable',
        rank_score: 0.013, rank: 2,
    }),
    row({
        institution_id: 'DELTA', name: 'Delta Labs', country: 'FR',
        latitude: null, longitude: null,
        n_papers: 600, n_top: 90, raw_prop: 0.15, eb_prob: 0.15,
        rank_score: 0.0, rank: 3,
    }),
];

export const FIXTURE: ResultsDocument = {
    schema_version: 1,
    generated_at: '2026-01-01T00:00:00Z',
    subjects: [
        subject('CHEM', [
            row({ institution_id: 'ALPHA', name: 'Alpha Institute', rank: 1 }),
            row({ institution_id: 'GAMMA', name: 'Gamma College', rank: 2 }),
        ]),
        subject('MATH', [
            row({ institution_id: 'GAMMA', name: 'Gamma College', rank: 1 }),
        ]),
        subject('PHYS', PHYS_ROWS),
    ],
};
