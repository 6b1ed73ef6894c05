import pytest

from excellence_mapper.simulate import logit, simulate_corpus


@pytest.fixture(scope="session")
def sim_corpus(tmp_path_factory):
    """One qualifying subject: 55 institutions x 520 papers."""
    out = tmp_path_factory.mktemp("corpus")
    paths = simulate_corpus(
        out, seed=11, n_institutions=55, papers_per_institution=520,
        beta0=logit(0.10), sigma=0.4, subject="PHYS",
    )
    return paths


@pytest.fixture(scope="session")
def merged_two_subject_corpus(tmp_path_factory):
    """Two disjoint subjects with distinct institution populations."""
    base = tmp_path_factory.mktemp("corpus2")
    first = simulate_corpus(
        base / "a", seed=21, n_institutions=52, papers_per_institution=510,
        beta0=logit(0.10), sigma=0.35, subject="PHYS", inst_prefix="PH",
    )
    second = simulate_corpus(
        base / "b", seed=22, n_institutions=53, papers_per_institution=505,
        beta0=logit(0.11), sigma=0.45, subject="CHEM", inst_prefix="CH",
    )
    papers = base / "papers.jsonl"
    papers.write_text(
        first["papers"].read_text(encoding="utf-8")
        + second["papers"].read_text(encoding="utf-8"),
        encoding="utf-8",
    )
    institutions = base / "institutions.csv"
    first_rows = first["institutions"].read_text(encoding="utf-8")
    second_rows = second["institutions"].read_text(encoding="utf-8")
    body = second_rows.split("\n", 1)[1]
    institutions.write_text(first_rows + body, encoding="utf-8")
    return {
        "papers": papers,
        "institutions": institutions,
        "first": first,
        "second": second,
        "dir": base,
    }
