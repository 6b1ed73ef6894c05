"""Random-intercept logistic model for clustered binary counts.

Each institution j contributes (n_j, k_j): papers attributed to it and
how many fall in the top citation decile. The model places a normal
random intercept on the logit scale,

    k_j ~ Binomial(n_j, expit(beta0 + u_j)),   u_j ~ N(0, sigma^2),

and is fitted by maximum marginal likelihood. Cluster integrals are
evaluated with adaptive Gauss-Hermite quadrature centred at each
cluster's posterior mode and scaled by the posterior curvature, which
keeps a small number of nodes accurate even for large n_j. At sigma=0
the marginal likelihood collapses to the plain binomial likelihood and
is computed in closed form.

Optimization runs over (beta0, log sigma) so the variance stays
non-negative without constraints: a derivative-free simplex search
followed by damped Newton steps on a high-order numerical gradient.
Standard errors come from the inverse negative numerical Hessian, with
the delta method mapping se(log sigma) to se(sigma^2).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.hermite import hermgauss
from scipy.optimize import minimize
from scipy.special import expit, gammaln, log_expit, logsumexp

from .errors import NumericalError, UndefinedTestError
from .percentiles import ClusterTable

# Level-1 variance of the standard logistic distribution (pi^2/3),
# written as the conventional rounded constant so published intraclass
# correlation spot values (e.g. sigma^2 = 3.29 -> 0.5) reproduce exactly.
LOGIT_VARIANCE = 3.29

GRAD_TOL = 1e-6
STEP_TOL = 1e-8
MAX_ITER = 500

# Below this residual standard deviation the likelihood is flat in
# log(sigma); the fit is reported on the sigma=0 boundary instead.
SIGMA_FLOOR = 1e-3


class PowerWarning(UserWarning):
    """Fewer clusters than the recommended minimum for stable inference."""


@dataclass(frozen=True)
class ModelParams:
    beta0: float
    sigma_u0: float

    def __post_init__(self):
        if not (math.isfinite(self.beta0) and math.isfinite(self.sigma_u0)):
            raise ValueError("model parameters must be finite")
        if self.sigma_u0 < 0:
            raise ValueError("sigma_u0 must be non-negative")

    @property
    def sigma2(self) -> float:
        return self.sigma_u0 * self.sigma_u0


@dataclass(frozen=True)
class FitResult:
    params: ModelParams
    se_beta0: float
    se_sigma2: float
    loglik: float
    icc: float
    wald_z: float
    wald_p: float
    converged: bool
    n_clusters: int
    grand_mean_prob: float
    boundary: bool = False
    messages: tuple[str, ...] = field(default=())


@dataclass(frozen=True)
class WaldTest:
    statistic: float
    p_value: float
    significant: bool


def intraclass_correlation(sigma2: float) -> float:
    """Homogeneity of papers within institutions on the logit scale."""
    if sigma2 < 0:
        raise ValueError("sigma2 must be non-negative")
    if sigma2 == 0.0:
        return 0.0
    return sigma2 / (LOGIT_VARIANCE + sigma2)


def _table_arrays(table: ClusterTable) -> tuple[np.ndarray, np.ndarray]:
    n = np.array([row.n_papers for row in table.rows], dtype=float)
    k = np.array([row.n_top for row in table.rows], dtype=float)
    if n.size == 0:
        raise ValueError("cluster table is empty")
    return n, k


def _binomial_loglik(beta0: float, n: np.ndarray, k: np.ndarray) -> float:
    """Closed-form log-likelihood of the sigma=0 (no random effect) model."""
    coef = gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0)
    terms = coef + k * log_expit(beta0) + (n - k) * log_expit(-beta0)
    return math.fsum(terms.tolist())


def posterior_modes(
    beta0: float,
    sigma2: float,
    n: np.ndarray,
    k: np.ndarray,
    tol: float = 1e-12,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-cluster posterior modes of the random intercept, vectorized.

    Maximizes k*eta - n*log(1+e^eta) - u^2/(2 sigma^2) over u for every
    cluster at once. The objective is strictly concave, so a safeguarded
    Newton iteration (falling back to bisection of the current bracket
    whenever the Newton step leaves it) always converges. Returns the
    modes and the curvature scales tau = (-h''(u_hat))^(-1/2).
    """
    if sigma2 <= 0:
        raise ValueError("posterior_modes requires sigma2 > 0")
    # The stationarity condition u = sigma2*(k - n*expit(beta0+u)) pins
    # the root inside [sigma2*(k-n), sigma2*k].
    lo = sigma2 * (k - n) - 1e-12
    hi = sigma2 * k + 1e-12
    u = np.zeros_like(n)
    for _ in range(200):
        p = expit(beta0 + u)
        grad = k - n * p - u / sigma2
        curv = n * p * (1.0 - p) + 1.0 / sigma2
        lo = np.where(grad > 0, u, lo)
        hi = np.where(grad < 0, u, hi)
        step = grad / curv
        proposal = u + step
        outside = (proposal <= lo) | (proposal >= hi)
        proposal = np.where(outside, 0.5 * (lo + hi), proposal)
        done = np.abs(proposal - u) <= tol * (1.0 + np.abs(u))
        u = proposal
        if bool(done.all()):
            break
    p = expit(beta0 + u)
    tau = 1.0 / np.sqrt(n * p * (1.0 - p) + 1.0 / sigma2)
    return u, tau


def _loglik_arrays(
    beta0: float,
    sigma: float,
    n: np.ndarray,
    k: np.ndarray,
    nodes: int,
    gh: tuple[np.ndarray, np.ndarray] | None = None,
) -> np.ndarray:
    """Per-cluster marginal log-likelihood contributions."""
    coef = gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0)
    if sigma == 0.0:
        return coef + k * log_expit(beta0) + (n - k) * log_expit(-beta0)

    sigma2 = sigma * sigma
    u_hat, tau = posterior_modes(beta0, sigma2, n, k)
    x, w = gh if gh is not None else hermgauss(nodes)
    # u-values evaluated per cluster: shape (clusters, nodes)
    z = u_hat[:, None] + math.sqrt(2.0) * tau[:, None] * x[None, :]
    eta = beta0 + z
    log_density = (
        k[:, None] * log_expit(eta)
        + (n - k)[:, None] * log_expit(-eta)
        - 0.5 * z * z / sigma2
        - 0.5 * math.log(2.0 * math.pi * sigma2)
    )
    log_terms = np.log(w)[None, :] + (x * x)[None, :] + log_density
    return (
        coef
        + 0.5 * math.log(2.0)
        + np.log(tau)
        + logsumexp(log_terms, axis=1)
    )


def marginal_loglik(params: ModelParams, table: ClusterTable, nodes: int = 20) -> float:
    """Marginal log-likelihood of the model on a cluster table.

    Each cluster integral is evaluated by adaptive Gauss-Hermite
    quadrature with ``nodes`` points; sigma_u0 = 0 returns the exact
    binomial log-likelihood without quadrature. Cluster contributions
    are combined with exact summation, so the value is invariant under
    permutation of clusters.
    """
    if nodes < 1:
        raise ValueError("nodes must be >= 1")
    n, k = _table_arrays(table)
    per_cluster = _loglik_arrays(params.beta0, params.sigma_u0, n, k, nodes)
    bad = np.flatnonzero(~np.isfinite(per_cluster))
    if bad.size:
        j = int(bad[0])
        raise NumericalError(
            f"non-finite likelihood for cluster {table.rows[j].institution_id!r} "
            f"(n={table.rows[j].n_papers}, k={table.rows[j].n_top})"
        )
    return math.fsum(per_cluster.tolist())


def oracle_loglik(params: ModelParams, table: ClusterTable,
                  grid_points: int = 20001) -> float:
    """Reference marginal log-likelihood via fixed-grid trapezoid rule.

    Integrates each cluster over u in [-10 sigma, 10 sigma] with at
    least 20,000 points. Intended for small test tables only; the
    integrand here is spelled out independently of the quadrature path.
    """
    if params.sigma_u0 <= 0:
        raise ValueError("oracle_loglik requires sigma_u0 > 0")
    if grid_points < 20000:
        raise ValueError("oracle_loglik requires >= 20,000 grid points")
    sigma = params.sigma_u0
    beta0 = params.beta0
    u = np.linspace(-10.0 * sigma, 10.0 * sigma, grid_points)
    du = u[1] - u[0]
    log_phi = -0.5 * (u / sigma) ** 2 - 0.5 * math.log(2.0 * math.pi) - math.log(sigma)
    total = []
    for row in table.rows:
        n_j, k_j = float(row.n_papers), float(row.n_top)
        coef = (math.lgamma(n_j + 1.0) - math.lgamma(k_j + 1.0)
                - math.lgamma(n_j - k_j + 1.0))
        eta = beta0 + u
        # log of Binomial(k; n, expit(eta)) without the coefficient:
        # k*eta - n*log(1+e^eta), written stably for either sign of eta
        log_binom = k_j * eta - n_j * (np.logaddexp(0.0, eta))
        integrand = log_binom + log_phi
        peak = integrand.max()
        integral = np.trapezoid(np.exp(integrand - peak), dx=du)
        total.append(coef + peak + math.log(integral))
    return math.fsum(total)


def _gradient(f, x: np.ndarray, h: float = 1e-4) -> np.ndarray:
    """Five-point central difference gradient; the higher order keeps
    truncation error negligible at a step size large enough to dominate
    round-off even when |f| is of order 1e5."""
    grad = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h * max(1.0, abs(x[i]))
        grad[i] = (
            f(x - 2 * e) - 8.0 * f(x - e) + 8.0 * f(x + e) - f(x + 2 * e)
        ) / (12.0 * e[i])
    return grad


def _hessian(f, x: np.ndarray, h: float = 1e-4) -> np.ndarray:
    dim = x.size
    steps = np.array([h * max(1.0, abs(v)) for v in x])
    hess = np.empty((dim, dim))
    f0 = f(x)
    for i in range(dim):
        ei = np.zeros(dim)
        ei[i] = steps[i]
        hess[i, i] = (f(x + ei) - 2.0 * f0 + f(x - ei)) / steps[i] ** 2
        for j in range(i + 1, dim):
            ej = np.zeros(dim)
            ej[j] = steps[j]
            hess[i, j] = hess[j, i] = (
                f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)
            ) / (4.0 * steps[i] * steps[j])
    return hess


def _boundary_fit(n: np.ndarray, k: np.ndarray,
                  messages: tuple[str, ...]) -> FitResult:
    """Fit reported on the sigma=0 boundary: pooled binomial estimate,
    Wald p = 0.5 by convention (the test is one-sided and the estimate
    sits on the null)."""
    total_n = float(n.sum())
    total_k = float(k.sum())
    if total_k == 0.0 or total_k == total_n:
        # Continuity correction keeps the intercept finite when every
        # cluster is all-zero or all-one.
        pooled = (total_k + 0.5) / (total_n + 1.0)
        messages = messages + (
            "degenerate outcome counts; intercept uses a continuity correction",
        )
    else:
        pooled = total_k / total_n
    beta0 = math.log(pooled / (1.0 - pooled))
    se_beta0 = 1.0 / math.sqrt(total_n * pooled * (1.0 - pooled))
    return FitResult(
        params=ModelParams(beta0=beta0, sigma_u0=0.0),
        se_beta0=se_beta0,
        se_sigma2=0.0,
        loglik=_binomial_loglik(beta0, n, k),
        icc=0.0,
        wald_z=0.0,
        wald_p=0.5,
        converged=True,
        n_clusters=int(n.size),
        grand_mean_prob=pooled,
        boundary=True,
        messages=messages,
    )


def fit_model(table: ClusterTable, nodes: int = 20) -> FitResult:
    """Maximum marginal likelihood fit of the random-intercept model.

    Runs Nelder-Mead over (beta0, log sigma), polishes with damped
    Newton steps on the numerical gradient, and reports standard errors
    from the inverse negative numerical Hessian. Never raises on
    non-convergence; the result carries ``converged=False`` instead.
    """
    n, k = _table_arrays(table)
    messages: tuple[str, ...] = ()
    if n.size < 100:
        message = (
            f"only {n.size} institutions; at least 100 groups are "
            "recommended for stable variance inference"
        )
        warnings.warn(message, PowerWarning, stacklevel=2)
        messages = (message,)

    total_k = float(k.sum())
    if total_k == 0.0 or total_k == float(n.sum()):
        return _boundary_fit(n, k, messages)

    gh = hermgauss(nodes)

    def objective(theta: np.ndarray) -> float:
        beta0, log_sigma = float(theta[0]), float(theta[1])
        if log_sigma > 5.0 or abs(beta0) > 50.0:
            return float("inf")
        per_cluster = _loglik_arrays(beta0, math.exp(log_sigma), n, k, nodes, gh)
        value = math.fsum(per_cluster.tolist())
        return float("inf") if not math.isfinite(value) else -value

    # moment-style starting values from the per-cluster empirical logits
    p_j = (k + 0.5) / (n + 1.0)
    logits = np.log(p_j / (1.0 - p_j))
    beta_start = float(np.mean(logits))
    sigma_start = float(np.clip(np.std(logits), 0.02, 3.0))
    theta = np.array([beta_start, math.log(sigma_start)])

    simplex = minimize(
        objective,
        theta,
        method="Nelder-Mead",
        options={"xatol": 1e-7, "fatol": 1e-12,
                 "maxiter": MAX_ITER, "maxfev": 4 * MAX_ITER},
    )
    theta = np.asarray(simplex.x, dtype=float)

    if math.exp(theta[1]) < SIGMA_FLOOR:
        interior = -simplex.fun
        boundary = _boundary_fit(n, k, messages)
        if boundary.loglik >= interior - 1e-6:
            return boundary
        # the simplex wandered toward the boundary but the interior is
        # genuinely better; restart the polish from a safe scale
        theta[1] = math.log(SIGMA_FLOOR)

    # Newton polish on the numerical gradient. Inside the quadratic
    # basin the step is taken directly: its predicted improvement is
    # often below the floating-point resolution of the objective, so a
    # monotonicity check would stall the polish before the gradient
    # tolerance is reached.
    f_curr = objective(theta)
    for _ in range(50):
        grad = _gradient(objective, theta)
        grad_norm = float(np.abs(grad).max())
        if grad_norm <= 0.1 * GRAD_TOL:
            break
        hess = _hessian(objective, theta)
        step = None
        damping = 0.0
        identity = np.eye(2)
        for _attempt in range(8):
            try:
                candidate = np.linalg.solve(hess + damping * identity, -grad)
            except np.linalg.LinAlgError:
                candidate = None
            if candidate is not None and np.all(np.isfinite(candidate)):
                step = candidate
                break
            damping = 10.0 * damping if damping else 1e-4 * max(1.0, float(np.abs(hess).max()))
        if step is None:
            break
        step_norm = float(np.abs(step).max())
        if step_norm > 1.0:
            step = step / step_norm
            step_norm = 1.0
        if grad_norm < 1e-3:
            theta = theta + step
            f_curr = objective(theta)
            if step_norm < 0.01 * STEP_TOL:
                break
        else:
            # far from the optimum, backtracking keeps the polish monotone
            scale = 1.0
            improved = False
            for _bt in range(30):
                trial = theta + scale * step
                f_trial = objective(trial)
                if f_trial <= f_curr:
                    theta, f_curr = trial, f_trial
                    improved = True
                    break
                scale *= 0.5
            if not improved or scale * step_norm < STEP_TOL:
                break

    grad = _gradient(objective, theta)
    converged = bool(np.abs(grad).max() <= GRAD_TOL)

    beta0 = float(theta[0])
    sigma = math.exp(float(theta[1]))
    sigma2 = sigma * sigma
    loglik = -objective(theta)

    hess = _hessian(objective, theta)  # Hessian of the negative log-likelihood
    se_beta0 = float("nan")
    se_log_sigma = float("nan")
    try:
        cov = np.linalg.inv(hess)
        if cov[0, 0] > 0 and cov[1, 1] > 0:
            se_beta0 = math.sqrt(cov[0, 0])
            se_log_sigma = math.sqrt(cov[1, 1])
        else:
            converged = False
    except np.linalg.LinAlgError:
        converged = False

    if math.isnan(se_log_sigma):
        se_sigma2 = float("nan")
        wald_z = float("nan")
        wald_p = float("nan")
    else:
        se_sigma2 = 2.0 * sigma2 * se_log_sigma
        wald_z = sigma2 / se_sigma2
        wald_p = 0.5 * math.erfc(wald_z / math.sqrt(2.0))

    return FitResult(
        params=ModelParams(beta0=beta0, sigma_u0=sigma),
        se_beta0=se_beta0,
        se_sigma2=se_sigma2,
        loglik=loglik,
        icc=intraclass_correlation(sigma2),
        wald_z=wald_z,
        wald_p=wald_p,
        converged=converged,
        n_clusters=int(n.size),
        grand_mean_prob=float(expit(beta0)),
        messages=messages,
    )


def wald_test(fit: FitResult, alpha: float = 0.05) -> WaldTest:
    """One-sided Wald test of sigma^2 > 0.

    Significance means institutions vary systematically, so ranking and
    pairwise comparison are meaningful. A boundary fit (sigma^2 = 0)
    returns p = 0.5 by convention.
    """
    if not fit.converged:
        raise ValueError("Wald test requires a converged fit")
    if fit.params.sigma_u0 == 0.0:
        return WaldTest(statistic=0.0, p_value=0.5, significant=False)
    if not (fit.se_sigma2 > 0.0):
        raise UndefinedTestError("standard error of sigma^2 is zero")
    z = fit.params.sigma2 / fit.se_sigma2
    p = 0.5 * math.erfc(z / math.sqrt(2.0))
    return WaldTest(statistic=z, p_value=p, significant=p < alpha)
