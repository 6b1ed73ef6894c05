"""Stratified citation percentile ranks and per-institution tabulation.

Papers are ranked within a stratum (subject area, publication year,
document type) by citations ascending, with journal prestige (SJR2) as
the secondary key so that, among equally cited papers, the more
prestigious journal ends up nearer the top of the ranking. Residual
ties (equal citations and equal SJR2) share the tie group's maximum
percentile, which can only inflate the number of flagged papers.

The percentile of rank r in a stratum of size n is 100*(r-1)/n, so a
tie-free stratum of size 10 yields exactly one top-decile paper. Strata
with n < 10 flag nothing: the top paper sits at 100*(n-1)/n < 90.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .corpus import Corpus
from .errors import InternalConsistencyError

CLASS_THRESHOLD = 90.0


@dataclass(frozen=True, order=True)
class Stratum:
    """Reference set key for percentile computation."""

    subject: str
    year: int
    doc_type: str


@dataclass(frozen=True)
class RankedPaper:
    """One paper in stratum rank order; ``tie_group`` indexes the run of
    papers sharing (citations, journal_sjr2)."""

    paper_id: str
    citations: int
    journal_sjr2: float
    rank: int
    tie_group: int


@dataclass(frozen=True)
class PercentileAssignment:
    paper_id: str
    stratum: Stratum
    rank: int
    percentile: float
    is_class10: bool


@dataclass(frozen=True)
class ClusterRow:
    institution_id: str
    n_papers: int
    n_top: int


@dataclass(frozen=True)
class ClusterTable:
    """Per-subject institution counts feeding the multilevel model."""

    subject: str
    rows: tuple[ClusterRow, ...]

    @property
    def mean_raw_proportion(self) -> float:
        """Unweighted mean of the observed top-decile proportions."""
        if not self.rows:
            return math.nan
        return sum(r.n_top / r.n_papers for r in self.rows) / len(self.rows)


def rank_stratum(
    papers: Sequence[tuple[str, int, float]],
) -> list[RankedPaper]:
    """Order one stratum's papers and assign 1-based ranks.

    Sort keys: citations ascending, then SJR2 so that higher prestige
    takes the higher rank position among equal citation counts, then
    paper_id for a deterministic residual order. Papers with identical
    (citations, SJR2) form one tie group.
    """
    if not papers:
        raise ValueError("rank_stratum requires a non-empty stratum")
    ordered = sorted(papers, key=lambda p: (p[1], p[2], p[0]))
    ranked: list[RankedPaper] = []
    group = 0
    for idx, (paper_id, citations, sjr2) in enumerate(ordered):
        if idx > 0:
            prev = ordered[idx - 1]
            if (citations, sjr2) != (prev[1], prev[2]):
                group += 1
        ranked.append(RankedPaper(paper_id, citations, sjr2, idx + 1, group))
    return ranked


def assign_percentiles(
    ordered: Sequence[RankedPaper], stratum: Stratum
) -> list[PercentileAssignment]:
    """Turn a ranked stratum into percentile assignments.

    Every member of a tie group receives the group's maximum percentile,
    so ties can only push papers into the top decile, never out of it.
    """
    n = len(ordered)
    group_max_rank: dict[int, int] = {}
    for paper in ordered:
        group_max_rank[paper.tie_group] = max(
            group_max_rank.get(paper.tie_group, 0), paper.rank
        )
    assignments = []
    for paper in ordered:
        percentile = 100.0 * (group_max_rank[paper.tie_group] - 1) / n
        assignments.append(
            PercentileAssignment(
                paper_id=paper.paper_id,
                stratum=stratum,
                rank=paper.rank,
                percentile=percentile,
                is_class10=percentile >= CLASS_THRESHOLD,
            )
        )
    return assignments


def assign_subject_percentiles(
    corpus: Corpus, subject: str
) -> dict[str, PercentileAssignment]:
    """Percentile assignments for every paper carrying ``subject``.

    Strata are processed independently (they partition the subject's
    papers); the merged mapping is assembled in stratum-key order so the
    result is deterministic regardless of processing order.
    """
    strata: dict[Stratum, list[tuple[str, int, float]]] = {}
    for paper in corpus.papers:
        if subject not in paper.subject_areas:
            continue
        key = Stratum(subject, paper.year, paper.doc_type)
        strata.setdefault(key, []).append(
            (paper.paper_id, paper.citations, paper.journal_sjr2)
        )

    assignments: dict[str, PercentileAssignment] = {}
    for key in sorted(strata):
        for assignment in assign_percentiles(rank_stratum(strata[key]), key):
            assignments[assignment.paper_id] = assignment
    return assignments


def tabulate_clusters(
    assignments: Mapping[str, PercentileAssignment],
    attribution: Mapping[str, Iterable[str]],
    subject: str,
) -> ClusterTable:
    """Count attributed and attributed-top-decile papers per institution.

    Full counting applies: a shared top-decile paper increments every
    affiliated institution's count.
    """
    rows = []
    for inst_id in sorted(attribution):
        paper_ids = attribution[inst_id]
        n = 0
        k = 0
        for paper_id in paper_ids:
            try:
                assignment = assignments[paper_id]
            except KeyError:
                raise InternalConsistencyError(
                    f"paper {paper_id!r} attributed to {inst_id!r} has no "
                    f"percentile assignment in subject {subject!r}"
                ) from None
            n += 1
            k += assignment.is_class10
        rows.append(ClusterRow(inst_id, n, k))
    return ClusterTable(subject=subject, rows=tuple(rows))


def dump_assignments(assignments_by_subject: Mapping[str, Mapping[str, PercentileAssignment]], stream) -> None:
    """Write assignments as CSV, ordered by stratum key then rank.

    Fixed ordering and formatting keep the dump byte-identical across
    runs on identical inputs.
    """
    stream.write("paper_id,subject,year,doc_type,rank,percentile,is_class10\n")
    for subject in sorted(assignments_by_subject):
        rows = sorted(
            assignments_by_subject[subject].values(),
            key=lambda a: (a.stratum, a.rank),
        )
        for a in rows:
            stream.write(
                f"{a.paper_id},{a.stratum.subject},{a.stratum.year},"
                f"{a.stratum.doc_type},{a.rank},{a.percentile:.6g},"
                f"{'true' if a.is_class10 else 'false'}\n"
            )
