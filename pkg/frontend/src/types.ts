// Shape of results.json as produced by `excellence-mapper fit`.

export const SUPPORTED_SCHEMA_VERSION = 1;

export type SignificanceFlag = 'above' | 'not_distinguishable' | 'below';

export interface ModelStats {
    beta0: number;
    sigma2: number;
    se_beta0: number;
    se_sigma2: number;
    icc: number;
    wald_z: number;
    wald_p: number;
    ranking_reasonable: boolean;
    grand_mean_prob: number;
    mean_raw_proportion: number;
}

export interface InstitutionRow {
    institution_id: string;
    name: string;
    country: string;
    latitude: number | null;
    longitude: number | null;
    n_papers: number;
    n_top: number;
    raw_prop: number;
    eb_logit: number;
    eb_se: number;
    eb_prob: number;
    ci95: [number, number];
    ci_goldstein: [number, number];
    sig_vs_mean: SignificanceFlag;
    sig_vs_mean_goldstein: SignificanceFlag;
    rank_score: number;
    rank: number;
}

export interface SubjectResult {
    subject: string;
    display_name: string;
    n_institutions: number;
    model: ModelStats;
    institutions: InstitutionRow[];
}

export interface ResultsDocument {
    schema_version: number;
    generated_at: string;
    subjects: SubjectResult[];
}

export interface ResultsIndex {
    document: ResultsDocument;
    subjects: Map<string, SubjectResult>;
    byInstitution: Map<string, Map<string, InstitutionRow>>;
}

export class SchemaError extends Error {
    constructor(readonly found: unknown, readonly supported: number) {
        super(`results schema_version ${String(found)} is not supported ` +
            `(this build understands version ${supported})`);
        this.name = 'SchemaError';
    }
}

/** Validate and index a parsed results document. */
export function indexResults(raw: unknown): ResultsIndex {
    const doc = raw as ResultsDocument;
    if (!doc || typeof doc !== 'object' ||
        doc.schema_version !== SUPPORTED_SCHEMA_VERSION) {
        throw new SchemaError(
            doc && typeof doc === 'object' ? doc.schema_version : raw,
            SUPPORTED_SCHEMA_VERSION);
    }
    const subjects = new Map<string, SubjectResult>();
    const byInstitution = new Map<string, Map<string, InstitutionRow>>();
    for (const subject of doc.subjects) {
        subjects.set(subject.subject, subject);
        const index = new Map<string, InstitutionRow>();
        for (const row of subject.institutions) {
            index.set(row.institution_id, row);
        }
        byInstitution.set(subject.subject, index);
    }
    return { document: doc, subjects, byInstitution };
}
