"""Per-institution shrinkage estimates, intervals, and comparisons.

The institution-level summary is the mode of the random-intercept
posterior given the fitted model, with a curvature-based standard
error. The mode solves u = sigma^2 * (k - n*expit(beta0+u)), which
places the resulting probability strictly between the institution's raw
proportion and the model's grand mean: sparse institutions are pulled
strongly toward the mean, prolific ones barely move.

Intervals are built on the logit scale and transformed back, keeping
the bounds inside (0, 1). Two multipliers are used: 1.96 for the usual
95% interval (read against the grand mean), and 1.39 for comparison
intervals with the property that two institutions whose intervals do
not overlap differ at about the 5% level pairwise; read against the
grand mean, the 1.39 interval tests at roughly the 16.3% level instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .errors import ExcellenceMapperError
from .glmm import FitResult, posterior_modes

Z_95 = 1.96
Z_COMPARISON = 1.39

SIG_ABOVE = "above"
SIG_BELOW = "below"
SIG_NONE = "not_distinguishable"

A_HIGHER = "a_higher"
B_HIGHER = "b_higher"


@dataclass(frozen=True)
class InstitutionEstimate:
    institution_id: str
    subject: str
    n_papers: int
    n_top: int
    raw_prop: float
    eb_logit: float
    eb_se: float
    eb_prob: float
    ci95: tuple[float, float]
    ci_goldstein: tuple[float, float]
    sig_vs_mean: str
    sig_vs_mean_goldstein: str
    rank_score: float
    rank: int = 0


def posterior_summary(fit: FitResult, n_j: int, k_j: int) -> tuple[float, float]:
    """Posterior mode and curvature SE of an institution's logit.

    At sigma^2 = 0 there is nothing to estimate per institution: the
    summary collapses to the intercept and its standard error.
    """
    if not fit.converged:
        raise ValueError("posterior_summary requires a converged fit")
    if not 0 <= k_j <= n_j or n_j <= 0:
        raise ValueError(f"invalid cluster counts n={n_j}, k={k_j}")
    sigma2 = fit.params.sigma2
    if sigma2 == 0.0:
        return fit.params.beta0, fit.se_beta0
    u_hat, tau = posterior_modes(
        fit.params.beta0, sigma2,
        np.array([float(n_j)]), np.array([float(k_j)]), tol=1e-10,
    )
    return fit.params.beta0 + float(u_hat[0]), float(tau[0])


def intervals(eb_logit: float, eb_se: float) -> tuple[tuple[float, float], tuple[float, float]]:
    """95% and comparison (1.39 SE) intervals on the probability scale."""
    if not eb_se > 0:
        raise ValueError("eb_se must be positive")

    def band(z: float) -> tuple[float, float]:
        return (float(expit(eb_logit - z * eb_se)),
                float(expit(eb_logit + z * eb_se)))

    return band(Z_95), band(Z_COMPARISON)


def significance_vs_mean(ci: tuple[float, float], grand_mean_prob: float) -> str:
    """Classify an institution against the all-institution mean."""
    lo, hi = ci
    if lo > grand_mean_prob:
        return SIG_ABOVE
    if hi < grand_mean_prob:
        return SIG_BELOW
    return SIG_NONE


def rank_score(eb_prob: float, grand_mean_prob: float) -> float:
    """Log of the ratio to the grand mean.

    Symmetric by construction: twice the expected proportion scores
    +ln 2, half of it scores -ln 2.
    """
    if not (0.0 < eb_prob < 1.0 and 0.0 < grand_mean_prob < 1.0):
        raise ValueError("probabilities must lie strictly in (0, 1)")
    return math.log(eb_prob / grand_mean_prob)


def estimate_institution(fit: FitResult, institution_id: str, subject: str,
                         n_j: int, k_j: int) -> InstitutionEstimate:
    """Full estimate bundle for one institution under one subject's fit."""
    eb_logit, eb_se = posterior_summary(fit, n_j, k_j)
    ci95, ci_comp = intervals(eb_logit, eb_se)
    eb_prob = float(expit(eb_logit))
    mean_prob = fit.grand_mean_prob
    return InstitutionEstimate(
        institution_id=institution_id,
        subject=subject,
        n_papers=n_j,
        n_top=k_j,
        raw_prop=k_j / n_j,
        eb_logit=eb_logit,
        eb_se=eb_se,
        eb_prob=eb_prob,
        ci95=ci95,
        ci_goldstein=ci_comp,
        sig_vs_mean=significance_vs_mean(ci95, mean_prob),
        sig_vs_mean_goldstein=significance_vs_mean(ci_comp, mean_prob),
        rank_score=rank_score(eb_prob, mean_prob),
    )


def compare_institutions(a: InstitutionEstimate, b: InstitutionEstimate) -> str:
    """Pairwise verdict from comparison-interval overlap.

    Touching intervals count as overlapping, so the verdict errs toward
    "not distinguishable". Estimates from different subjects live under
    different models and cannot be compared.
    """
    if a.subject != b.subject:
        raise ExcellenceMapperError(
            f"cannot compare across subjects ({a.subject!r} vs {b.subject!r})"
        )
    if a.ci_goldstein[0] > b.ci_goldstein[1]:
        return A_HIGHER
    if b.ci_goldstein[0] > a.ci_goldstein[1]:
        return B_HIGHER
    return SIG_NONE
