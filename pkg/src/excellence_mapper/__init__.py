"""Rank and map institutions by their output of highly-cited papers.

The pipeline classifies each paper's citation count into stratified
percentile ranks, counts top-decile papers per institution, fits a
random-intercept logistic model per subject area, and exports shrinkage
estimates with comparison intervals for the map/table front end.
"""

from .corpus import (
    Corpus,
    InstitutionRecord,
    PaperRecord,
    apply_thresholds,
    attribute_full_counting,
    build_corpus,
    filter_period,
    parse_institutions,
    parse_papers,
)
from .errors import (
    ExcellenceMapperError,
    InputError,
    InternalConsistencyError,
    NumericalError,
    SubjectRejected,
    UndefinedTestError,
)
from .estimates import (
    InstitutionEstimate,
    compare_institutions,
    estimate_institution,
    intervals,
    posterior_summary,
    rank_score,
    significance_vs_mean,
)
from .glmm import (
    FitResult,
    ModelParams,
    WaldTest,
    fit_model,
    intraclass_correlation,
    marginal_loglik,
    oracle_loglik,
    wald_test,
)
from .percentiles import (
    ClusterRow,
    ClusterTable,
    PercentileAssignment,
    Stratum,
    assign_percentiles,
    assign_subject_percentiles,
    rank_stratum,
    tabulate_clusters,
)
from .pipeline import (
    PipelineConfig,
    ResultsDocument,
    SubjectResult,
    document_to_dict,
    export_results,
    run_pipeline,
)
from .simulate import simulate_cluster_table, simulate_corpus

__version__ = "0.1.0"
