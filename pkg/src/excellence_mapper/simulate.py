"""Synthetic corpus generation for tests and acceptance runs.

Two layers of output from one call:

* ``assignments.csv`` holds the exact generating flags: each paper is
  top-decile with probability expit(beta0 + u_j) for its home
  institution's random intercept u_j. Feeding these flags straight into
  the cluster tabulation lets the statistical layers be tested without
  the percentile engine in the loop.
* ``papers.jsonl`` carries citation counts drawn from two well-separated
  distributions (high for generated-excellent papers, low otherwise),
  so running the full percentile pipeline on the files approximately
  recovers the same flags. The recovery is only approximate: stratified
  percentile ranking always flags the top decile of the realized
  distribution, so it matches the generating probabilities best when
  the implied mean probability is near 0.10.

All draws come from one seeded generator in a fixed order, so identical
parameters produce byte-identical files.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np
from scipy.special import expit

from .percentiles import ClusterRow, ClusterTable

COUNTRIES = ("US", "DE", "FR", "GB", "JP", "CN", "CH", "NL", "SE", "AU")

CITATIONS_LOW_MEAN = 6.0
CITATIONS_HIGH_OFFSET = 40
CITATIONS_HIGH_MEAN = 25.0


def simulate_cluster_table(
    rng: np.random.Generator,
    n_clusters: int,
    cluster_size: int,
    beta0: float,
    sigma: float,
    subject: str = "SIM",
) -> tuple[ClusterTable, np.ndarray]:
    """In-memory draw of a cluster table from the generating model.

    Papers within a cluster are exchangeable, so the per-paper Bernoulli
    flags aggregate to one Binomial draw per cluster. Returns the table
    and the sampled random intercepts.
    """
    u = rng.normal(0.0, sigma, n_clusters)
    probs = expit(beta0 + u)
    k = rng.binomial(cluster_size, probs)
    rows = tuple(
        ClusterRow(f"INST{j:04d}", cluster_size, int(k[j]))
        for j in range(n_clusters)
    )
    return ClusterTable(subject=subject, rows=rows), u


def simulate_corpus(
    out_dir,
    seed: int,
    n_institutions: int,
    papers_per_institution: int,
    beta0: float,
    sigma: float,
    collaboration_rate: float = 0.0,
    subject: str = "SIM",
    year_min: int = 2005,
    year_max: int = 2009,
    doc_type: str = "article",
    inst_prefix: str = "INST",
) -> dict[str, Path]:
    """Write a synthetic corpus to ``out_dir``; returns the file paths.

    Collaborative papers (probability ``collaboration_rate``) carry one
    extra affiliation; under full counting they are counted by both
    institutions, deliberately reproducing the inflation that multiple
    counting introduces in observed proportions. ``inst_prefix`` keeps
    institution ids distinct when corpora are merged into one fixture.
    """
    if not 0.0 <= collaboration_rate <= 1.0:
        raise ValueError("collaboration_rate must lie in [0, 1]")
    if n_institutions < 1 or papers_per_institution < 1:
        raise ValueError("need at least one institution and one paper")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)

    inst_ids = [f"{inst_prefix}{j:04d}" for j in range(n_institutions)]
    u = rng.normal(0.0, sigma, n_institutions)
    q = expit(beta0 + u)

    institutions_path = out / "institutions.csv"
    with institutions_path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["institution_id", "name", "country",
                         "latitude", "longitude"])
        lats = rng.uniform(-60.0, 70.0, n_institutions)
        lons = rng.uniform(-180.0, 180.0, n_institutions)
        for j, inst_id in enumerate(inst_ids):
            writer.writerow([
                inst_id,
                f"Institution {j:04d}",
                COUNTRIES[j % len(COUNTRIES)],
                f"{lats[j]:.4f}",
                f"{lons[j]:.4f}",
            ])

    years = list(range(year_min, year_max + 1))
    papers_path = out / "papers.jsonl"
    assignments_path = out / "assignments.csv"
    with papers_path.open("w", encoding="utf-8", newline="") as papers_handle, \
            assignments_path.open("w", encoding="utf-8", newline="") as flags_handle:
        flags_handle.write("paper_id,subject,year,doc_type,is_class10\n")
        counter = 0
        for j, inst_id in enumerate(inst_ids):
            excellent = rng.random(papers_per_institution) < q[j]
            year_idx = rng.integers(0, len(years), papers_per_institution)
            low = rng.poisson(CITATIONS_LOW_MEAN, papers_per_institution)
            high = CITATIONS_HIGH_OFFSET + rng.poisson(
                CITATIONS_HIGH_MEAN, papers_per_institution)
            sjr2 = rng.uniform(0.0, 10.0, papers_per_institution)
            collab = rng.random(papers_per_institution) < collaboration_rate
            partners = rng.integers(0, n_institutions, papers_per_institution)
            for i in range(papers_per_institution):
                paper_id = f"{subject}-P{counter:07d}"
                counter += 1
                affiliations = [inst_id]
                if collab[i] and n_institutions > 1:
                    partner = inst_ids[int(partners[i])]
                    if partner != inst_id:
                        affiliations.append(partner)
                record = {
                    "paper_id": paper_id,
                    "year": int(years[int(year_idx[i])]),
                    "doc_type": doc_type,
                    "subject_areas": [subject],
                    "citations": int(high[i] if excellent[i] else low[i]),
                    "journal_sjr2": round(float(sjr2[i]), 4),
                    "affiliations": affiliations,
                }
                papers_handle.write(json.dumps(record, separators=(",", ":")))
                papers_handle.write("\n")
                flags_handle.write(
                    f"{paper_id},{subject},{record['year']},{doc_type},"
                    f"{'true' if excellent[i] else 'false'}\n"
                )

    truth_path = out / "truth.json"
    truth = {
        "seed": seed,
        "beta0": beta0,
        "sigma": sigma,
        "collaboration_rate": collaboration_rate,
        "subject": subject,
        "institutions": {
            inst_id: {"u": float(u[j]), "prob": float(q[j])}
            for j, inst_id in enumerate(inst_ids)
        },
    }
    truth_path.write_text(
        json.dumps(truth, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    return {
        "institutions": institutions_path,
        "papers": papers_path,
        "assignments": assignments_path,
        "truth": truth_path,
    }


def load_simulated_table(out_dir, subject: str = "SIM") -> ClusterTable:
    """Cluster table straight from the generating flags.

    Reads papers.jsonl for affiliations (full counting) and
    assignments.csv for the exact flags, bypassing percentile ranking.
    """
    out = Path(out_dir)
    flags: dict[str, bool] = {}
    with (out / "assignments.csv").open(encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        for row in reader:
            if row["subject"] == subject:
                flags[row["paper_id"]] = row["is_class10"] == "true"

    counts: dict[str, list[int]] = {}
    with (out / "papers.jsonl").open(encoding="utf-8") as handle:
        for line in handle:
            record = json.loads(line)
            if subject not in record["subject_areas"]:
                continue
            flagged = flags[record["paper_id"]]
            for inst_id in record["affiliations"]:
                n_k = counts.setdefault(inst_id, [0, 0])
                n_k[0] += 1
                n_k[1] += flagged
    rows = tuple(
        ClusterRow(inst_id, counts[inst_id][0], counts[inst_id][1])
        for inst_id in sorted(counts)
    )
    return ClusterTable(subject=subject, rows=rows)


def logit(p: float) -> float:
    """Inverse of the logistic transform."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie strictly in (0, 1)")
    return math.log(p / (1.0 - p))
