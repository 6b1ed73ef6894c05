"""End-to-end orchestration and canonical JSON export.

One subject area flows through: full-counting attribution, inclusion
thresholds, stratified percentile flags, cluster tabulation, the
random-intercept fit, and per-institution shrinkage estimates. Subjects
are isolated from each other: a failure (threshold rejection, model
non-convergence, numerical trouble) becomes a diagnostic entry and the
remaining subjects still run.

The exported document is canonical: keys sorted, floats at six
significant digits, LF line endings, trailing newline. Identical
resolved inputs therefore produce byte-identical files, which keeps
golden-file tests and cache keys stable.
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from . import corpus as corpus_mod
from . import percentiles as pct
from .errors import ExcellenceMapperError, InputError
from .estimates import InstitutionEstimate, estimate_institution
from .glmm import FitResult, fit_model, wald_test

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class PipelineConfig:
    papers_path: str
    institutions_path: str
    subjects: tuple[str, ...] | None = None  # None means every subject present
    year_min: int = 2005
    year_max: int = 2009
    min_papers: int = 500
    min_institutions: int = 50
    quad_nodes: int = 20
    generated_at: str | None = None
    subject_names: dict[str, str] = field(default_factory=dict)
    jobs: int = 1
    dump_percentiles: str | None = None


@dataclass(frozen=True)
class SubjectModelStats:
    beta0: float
    sigma2: float
    se_beta0: float
    se_sigma2: float
    icc: float
    wald_z: float
    wald_p: float
    ranking_reasonable: bool
    grand_mean_prob: float
    mean_raw_proportion: float


@dataclass(frozen=True)
class SubjectResult:
    subject: str
    display_name: str
    n_institutions: int
    model: SubjectModelStats
    institutions: tuple[InstitutionEstimate, ...]
    fit: FitResult


@dataclass(frozen=True)
class SubjectDiagnostic:
    subject: str
    message: str


@dataclass(frozen=True)
class ResultsDocument:
    schema_version: int
    generated_at: str
    subjects: tuple[SubjectResult, ...]
    # geo metadata for every institution referenced by any subject
    geo: dict[str, corpus_mod.InstitutionRecord] = field(default_factory=dict)


def resolve_timestamp(explicit: str | None = None) -> str:
    """Timestamp for the export: explicit value, else the
    SOURCE_DATE_EPOCH reproducible-build convention, else wall clock."""
    if explicit:
        return explicit
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch:
        moment = datetime.fromtimestamp(int(epoch), tz=timezone.utc)
    else:
        moment = datetime.now(tz=timezone.utc)
    return moment.strftime("%Y-%m-%dT%H:%M:%SZ")


def _run_subject(
    corpus: corpus_mod.Corpus, subject: str, config: PipelineConfig
) -> tuple[SubjectResult, dict[str, pct.PercentileAssignment]]:
    attribution = corpus_mod.attribute_full_counting(corpus, subject)
    surviving = corpus_mod.apply_thresholds(
        attribution, subject,
        min_papers=config.min_papers,
        min_institutions=config.min_institutions,
    )
    assignments = pct.assign_subject_percentiles(corpus, subject)
    table = pct.tabulate_clusters(assignments, surviving, subject)

    fit = fit_model(table, nodes=config.quad_nodes)
    if not fit.converged:
        raise ExcellenceMapperError("model fit did not converge")
    wald = wald_test(fit)

    estimates = [
        estimate_institution(fit, row.institution_id, subject,
                             row.n_papers, row.n_top)
        for row in table.rows
    ]
    estimates.sort(key=lambda e: (-e.rank_score, e.institution_id))
    ranked = tuple(
        dataclasses.replace(est, rank=position)
        for position, est in enumerate(estimates, start=1)
    )

    stats = SubjectModelStats(
        beta0=fit.params.beta0,
        sigma2=fit.params.sigma2,
        se_beta0=fit.se_beta0,
        se_sigma2=fit.se_sigma2,
        icc=fit.icc,
        wald_z=fit.wald_z,
        wald_p=fit.wald_p,
        ranking_reasonable=wald.significant,
        grand_mean_prob=fit.grand_mean_prob,
        mean_raw_proportion=table.mean_raw_proportion,
    )
    result = SubjectResult(
        subject=subject,
        display_name=config.subject_names.get(subject, subject),
        n_institutions=len(ranked),
        model=stats,
        institutions=ranked,
        fit=fit,
    )
    return result, assignments


def run_pipeline(
    config: PipelineConfig,
) -> tuple[ResultsDocument, list[SubjectDiagnostic]]:
    """Run every requested subject; failures become diagnostics."""
    papers = corpus_mod.parse_papers(config.papers_path)
    institutions = corpus_mod.parse_institutions(config.institutions_path)
    corpus = corpus_mod.build_corpus(papers, institutions)
    corpus = corpus_mod.filter_period(corpus, config.year_min, config.year_max)

    subjects = list(config.subjects) if config.subjects else corpus.subjects()
    subjects = sorted(set(subjects))

    results: dict[str, SubjectResult] = {}
    dumps: dict[str, dict[str, pct.PercentileAssignment]] = {}
    diagnostics: list[SubjectDiagnostic] = []

    def attempt(subject: str) -> None:
        try:
            result, assignments = _run_subject(corpus, subject, config)
        except Exception as exc:  # per-subject fault isolation
            diagnostics.append(SubjectDiagnostic(subject, str(exc)))
        else:
            results[subject] = result
            dumps[subject] = assignments

    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            list(pool.map(attempt, subjects))
    else:
        for subject in subjects:
            attempt(subject)

    diagnostics.sort(key=lambda d: d.subject)
    referenced = {
        est.institution_id
        for subject in results.values()
        for est in subject.institutions
    }
    document = ResultsDocument(
        schema_version=SCHEMA_VERSION,
        generated_at=resolve_timestamp(config.generated_at),
        subjects=tuple(results[s] for s in sorted(results)),
        geo={inst_id: corpus.institutions[inst_id]
             for inst_id in sorted(referenced)},
    )
    if config.dump_percentiles:
        with open(config.dump_percentiles, "w", encoding="utf-8",
                  newline="") as handle:
            pct.dump_assignments(dumps, handle)
    return document, diagnostics


def _sig6(value: float) -> float:
    """Round to six significant digits; the export-wide float contract."""
    if not math.isfinite(value):
        raise ValueError(f"cannot export non-finite value {value!r}")
    return float(f"{value:.6g}")


def _institution_dict(est: InstitutionEstimate,
                      record: corpus_mod.InstitutionRecord | None) -> dict:
    row = {
        "institution_id": est.institution_id,
        "name": record.name if record else est.institution_id,
        "country": record.country if record else "",
        "latitude": _sig6(record.latitude)
        if record and record.latitude is not None else None,
        "longitude": _sig6(record.longitude)
        if record and record.longitude is not None else None,
        "n_papers": est.n_papers,
        "n_top": est.n_top,
        "raw_prop": _sig6(est.raw_prop),
        "eb_logit": _sig6(est.eb_logit),
        "eb_se": _sig6(est.eb_se),
        "eb_prob": _sig6(est.eb_prob),
        "ci95": [_sig6(est.ci95[0]), _sig6(est.ci95[1])],
        "ci_goldstein": [_sig6(est.ci_goldstein[0]), _sig6(est.ci_goldstein[1])],
        "sig_vs_mean": est.sig_vs_mean,
        "sig_vs_mean_goldstein": est.sig_vs_mean_goldstein,
        "rank_score": _sig6(est.rank_score),
        "rank": est.rank,
    }
    return row


def document_to_dict(document: ResultsDocument) -> dict:
    """Canonical dict form of a document (floats already rounded)."""
    geo = document.geo
    return {
        "schema_version": document.schema_version,
        "generated_at": document.generated_at,
        "subjects": [
            {
                "subject": subj.subject,
                "display_name": subj.display_name,
                "n_institutions": subj.n_institutions,
                "model": {
                    "beta0": _sig6(subj.model.beta0),
                    "sigma2": _sig6(subj.model.sigma2),
                    "se_beta0": _sig6(subj.model.se_beta0),
                    "se_sigma2": _sig6(subj.model.se_sigma2),
                    "icc": _sig6(subj.model.icc),
                    "wald_z": _sig6(subj.model.wald_z),
                    "wald_p": _sig6(subj.model.wald_p),
                    "ranking_reasonable": subj.model.ranking_reasonable,
                    "grand_mean_prob": _sig6(subj.model.grand_mean_prob),
                    "mean_raw_proportion": _sig6(subj.model.mean_raw_proportion),
                },
                "institutions": [
                    _institution_dict(est, geo.get(est.institution_id))
                    for est in subj.institutions
                ],
            }
            for subj in document.subjects
        ],
    }


def export_results(document: ResultsDocument, path) -> None:
    """Write the canonical JSON file (sorted keys, LF, trailing newline)."""
    payload = document_to_dict(document)
    text = json.dumps(payload, sort_keys=True, indent=2)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
            handle.write("\n")
    except OSError as exc:
        raise InputError(f"cannot write results to {path}: {exc}") from exc
