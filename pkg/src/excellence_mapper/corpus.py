"""Corpus ingestion: parse papers and institutions, attribute papers to
institutions by full counting, and apply the inclusion thresholds.

Papers arrive as JSONL (one object per line), institutions as RFC-4180
CSV with header ``institution_id,name,country,latitude,longitude``.
A CSV variant for papers is also accepted; list-valued columns use
``;`` as the separator.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass, field

from .errors import InputError, SubjectRejected

DOC_TYPES = ("article", "review", "conference_paper")

PAPER_FIELDS = (
    "paper_id",
    "year",
    "doc_type",
    "subject_areas",
    "citations",
    "journal_sjr2",
    "affiliations",
)

_COUNTRY_RE = re.compile(r"^[A-Z]{2}$")


@dataclass(frozen=True)
class PaperRecord:
    """One publication with its citation count and affiliations."""

    paper_id: str
    year: int
    doc_type: str
    subject_areas: frozenset[str]
    citations: int
    journal_sjr2: float
    affiliations: frozenset[str]


@dataclass(frozen=True)
class InstitutionRecord:
    """A geocoded institution. Coordinates may be absent for institutions
    the geocoder could not place; such institutions are listed but not
    drawn on the map."""

    institution_id: str
    name: str
    country: str
    latitude: float | None
    longitude: float | None


@dataclass(frozen=True)
class Corpus:
    """Immutable paper/institution collection, safe to share across
    concurrent per-subject pipelines."""

    papers: tuple[PaperRecord, ...]
    institutions: dict[str, InstitutionRecord]
    census_year: int

    def subjects(self) -> list[str]:
        """Sorted list of subject-area codes occurring in the corpus."""
        codes: set[str] = set()
        for paper in self.papers:
            codes.update(paper.subject_areas)
        return sorted(codes)


def _as_text(source) -> io.TextIOBase:
    """Wrap a byte stream / path / text stream as a UTF-8 text stream."""
    if isinstance(source, (str, bytes)) and not isinstance(source, bytes):
        return open(source, "r", encoding="utf-8", newline="")
    if isinstance(source, bytes):
        return io.StringIO(source.decode("utf-8"))
    if isinstance(source, io.TextIOBase):
        return source
    return io.TextIOWrapper(source, encoding="utf-8", newline="")


def _require(condition: bool, message: str, line: int, field_name: str) -> None:
    if not condition:
        raise InputError(message, line=line, field=field_name)


def _validate_paper(row: dict, line: int) -> PaperRecord:
    for name in PAPER_FIELDS:
        _require(name in row, f"missing field {name!r}", line, name)

    paper_id = str(row["paper_id"])
    _require(bool(paper_id), "paper_id must be non-empty", line, "paper_id")

    year = row["year"]
    _require(isinstance(year, int) and not isinstance(year, bool),
             f"year must be an integer, got {year!r}", line, "year")

    doc_type = row["doc_type"]
    _require(doc_type in DOC_TYPES,
             f"doc_type must be one of {DOC_TYPES}, got {doc_type!r}",
             line, "doc_type")

    subjects = row["subject_areas"]
    _require(isinstance(subjects, (list, tuple, set, frozenset)) and len(subjects) > 0,
             "subject_areas must be a non-empty list", line, "subject_areas")

    citations = row["citations"]
    _require(isinstance(citations, int) and not isinstance(citations, bool)
             and citations >= 0,
             f"citations must be a non-negative integer, got {citations!r}",
             line, "citations")

    sjr2 = row["journal_sjr2"]
    _require(isinstance(sjr2, (int, float)) and not isinstance(sjr2, bool)
             and float(sjr2) >= 0.0,
             f"journal_sjr2 must be a non-negative number, got {sjr2!r}",
             line, "journal_sjr2")

    affiliations = row["affiliations"]
    _require(isinstance(affiliations, (list, tuple, set, frozenset))
             and len(affiliations) > 0,
             "affiliations must be a non-empty list", line, "affiliations")

    return PaperRecord(
        paper_id=paper_id,
        year=year,
        doc_type=doc_type,
        subject_areas=frozenset(str(s) for s in subjects),
        citations=citations,
        journal_sjr2=float(sjr2),
        affiliations=frozenset(str(a) for a in affiliations),
    )


def _int_field(raw: str, name: str, line: int) -> int:
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"{name} must be an integer, got {raw!r}",
                         line=line, field=name) from None


def _paper_row_from_csv(row: dict[str, str], line: int) -> dict:
    try:
        sjr2 = float(row["journal_sjr2"])
    except (ValueError, KeyError):
        raise InputError(
            f"journal_sjr2 must be a number, got {row.get('journal_sjr2')!r}",
            line=line, field="journal_sjr2") from None
    return {
        "paper_id": row.get("paper_id", ""),
        "year": _int_field(row.get("year", ""), "year", line),
        "doc_type": row.get("doc_type", ""),
        "subject_areas": [s for s in row.get("subject_areas", "").split(";") if s],
        "citations": _int_field(row.get("citations", ""), "citations", line),
        "journal_sjr2": sjr2,
        "affiliations": [a for a in row.get("affiliations", "").split(";") if a],
    }


def parse_papers(source, fmt: str = "jsonl") -> list[PaperRecord]:
    """Parse and validate paper records from ``source``.

    ``fmt`` is either ``"jsonl"`` (canonical) or ``"csv"``. Rows that
    violate an invariant raise :class:`InputError` naming the line and
    field; duplicate ``paper_id`` values are rejected.
    """
    if fmt not in ("jsonl", "csv"):
        raise ValueError(f"unknown paper format {fmt!r}")

    stream = _as_text(source)
    records: list[PaperRecord] = []
    seen: set[str] = set()

    def add(record: PaperRecord, line: int) -> None:
        if record.paper_id in seen:
            raise InputError(f"duplicate paper_id {record.paper_id!r}",
                             line=line, field="paper_id")
        seen.add(record.paper_id)
        records.append(record)

    if fmt == "jsonl":
        for line_no, line in enumerate(stream, start=1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InputError(f"malformed JSON: {exc.msg}", line=line_no) from None
            if not isinstance(row, dict):
                raise InputError("row must be a JSON object", line=line_no)
            add(_validate_paper(row, line_no), line_no)
    else:
        reader = csv.DictReader(stream)
        for line_no, row in enumerate(reader, start=2):
            add(_validate_paper(_paper_row_from_csv(row, line_no), line_no), line_no)

    return records


def parse_institutions(source) -> list[InstitutionRecord]:
    """Parse the institutions CSV; empty latitude/longitude mean ungecoded."""
    stream = _as_text(source)
    reader = csv.DictReader(stream)
    expected = ["institution_id", "name", "country", "latitude", "longitude"]
    if reader.fieldnames is None or list(reader.fieldnames) != expected:
        raise InputError(
            f"institutions header must be {','.join(expected)}, "
            f"got {reader.fieldnames}", line=1)

    records: list[InstitutionRecord] = []
    seen: set[str] = set()
    for line_no, row in enumerate(reader, start=2):
        inst_id = (row["institution_id"] or "").strip()
        _require(bool(inst_id), "institution_id must be non-empty",
                 line_no, "institution_id")
        if inst_id in seen:
            raise InputError(f"duplicate institution_id {inst_id!r}",
                             line=line_no, field="institution_id")
        seen.add(inst_id)

        country = (row["country"] or "").strip()
        _require(bool(_COUNTRY_RE.match(country)),
                 f"country must be an ISO-3166 alpha-2 code, got {country!r}",
                 line_no, "country")

        def coord(name: str, lo: float, hi: float) -> float | None:
            raw = (row[name] or "").strip()
            if not raw:
                return None
            try:
                value = float(raw)
            except ValueError:
                raise InputError(f"{name} must be a number, got {raw!r}",
                                 line=line_no, field=name) from None
            _require(lo <= value <= hi,
                     f"{name} must be in [{lo}, {hi}], got {value}",
                     line_no, name)
            return value

        records.append(InstitutionRecord(
            institution_id=inst_id,
            name=row["name"] or inst_id,
            country=country,
            latitude=coord("latitude", -90.0, 90.0),
            longitude=coord("longitude", -180.0, 180.0),
        ))
    return records


def build_corpus(papers: list[PaperRecord],
                 institutions: list[InstitutionRecord],
                 census_year: int | None = None) -> Corpus:
    """Assemble a validated corpus; every affiliation must resolve."""
    by_id = {inst.institution_id: inst for inst in institutions}
    for paper in papers:
        for aff in paper.affiliations:
            if aff not in by_id:
                raise InputError(
                    f"paper {paper.paper_id!r} references unknown institution {aff!r}",
                    field="affiliations")
    if census_year is None:
        census_year = max((p.year for p in papers), default=0)
    return Corpus(papers=tuple(papers), institutions=by_id,
                  census_year=census_year)


def filter_period(corpus: Corpus, year_min: int, year_max: int) -> Corpus:
    """Restrict the corpus to papers published within [year_min, year_max]."""
    kept = tuple(p for p in corpus.papers if year_min <= p.year <= year_max)
    return Corpus(papers=kept, institutions=corpus.institutions,
                  census_year=corpus.census_year)


def attribute_full_counting(corpus: Corpus, subject: str) -> dict[str, list[str]]:
    """Attribute each paper of ``subject`` to every affiliated institution.

    Full counting: a paper with m affiliations appears once, with weight 1,
    in each of the m institutions' lists. Returns institution_id -> sorted
    list of paper_ids (possibly empty dict).
    """
    table: dict[str, list[str]] = {}
    for paper in corpus.papers:
        if subject not in paper.subject_areas:
            continue
        for inst_id in sorted(paper.affiliations):
            table.setdefault(inst_id, []).append(paper.paper_id)
    for papers in table.values():
        papers.sort()
    return table


def apply_thresholds(table: dict[str, list[str]],
                     subject: str = "",
                     min_papers: int = 500,
                     min_institutions: int = 50) -> dict[str, list[str]]:
    """Drop institutions below ``min_papers``; reject sparse subjects.

    Raises :class:`SubjectRejected` (carrying the counts) when fewer than
    ``min_institutions`` institutions survive, mirroring the exclusion of
    low-coverage subject areas.
    """
    if min_papers < 1 or min_institutions < 1:
        raise ValueError("thresholds must be >= 1")
    surviving = {inst: papers for inst, papers in table.items()
                 if len(papers) >= min_papers}
    if len(surviving) < min_institutions:
        raise SubjectRejected(subject, len(surviving), min_institutions)
    return surviving
