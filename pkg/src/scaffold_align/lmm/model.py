"""Maximum-likelihood random-intercept linear mixed model.

The marginal model is y ~ N(X beta, sigma2 * (I + ratio * Z Z')) with one
random intercept per group and ratio = tau2 / sigma2.  For a grouped
intercept, V = I + ratio * Z Z' is block diagonal with closed-form
inverse blocks I - (ratio / (1 + ratio * n_i)) J, so beta and sigma2
concentrate out of the likelihood and fitting reduces to a 1-D search
over the variance ratio.  Every deviance evaluation is O(n p^2) using
per-group sums; no dense n x n matrix is ever formed.

Estimation is plain ML (divisor n), not REML: the downstream likelihood
ratio tests compare models that differ in fixed effects, which is only
valid under ML.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.exceptions import NotFittedError

from ..errors import ModelingError
from .design import ModelDesign
from .stats import wald_p

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
_INVPHI2 = (3.0 - math.sqrt(5.0)) / 2.0

DEFAULT_MAX_RATIO = 1e6
DEFAULT_TOL = 1e-8


@dataclass(frozen=True)
class FitResult:
    """ML fit of one model: coefficients, variances, likelihood."""

    column_names: tuple[str, ...]
    beta: np.ndarray
    se: np.ndarray
    z: np.ndarray
    p: np.ndarray
    sigma2: float
    tau2: float
    variance_ratio: float
    loglik: float
    n_obs: int
    n_groups: int
    k_params: int
    converged: bool
    model_id: int | None = None


class _GroupedProblem:
    """Per-group sufficient statistics shared by all deviance evaluations."""

    def __init__(self, X: np.ndarray, y: np.ndarray, codes: np.ndarray, n_groups: int):
        self.X = X
        self.y = y
        self.codes = codes
        self.n, self.p = X.shape
        self.sizes = np.bincount(codes, minlength=n_groups).astype(np.float64)
        self.group_x_sums = np.zeros((n_groups, self.p))
        np.add.at(self.group_x_sums, codes, X)
        self.group_y_sums = np.bincount(codes, weights=y, minlength=n_groups)
        self.xtx = X.T @ X
        self.xty = X.T @ y

    def solve(self, ratio: float) -> tuple[float, np.ndarray, float, np.ndarray]:
        """Profiled deviance and GLS quantities at one variance ratio.

        Returns (deviance, beta, sigma2, xtwx).
        """
        shrink = ratio / (1.0 + ratio * self.sizes)  # (G,)
        xtwx = self.xtx - (self.group_x_sums.T * shrink) @ self.group_x_sums
        xtwy = self.xty - self.group_x_sums.T @ (shrink * self.group_y_sums)
        try:
            beta = np.linalg.solve(xtwx, xtwy)
        except np.linalg.LinAlgError as exc:
            raise ModelingError(f"normal equations singular at variance ratio {ratio:g}") from exc
        resid = self.y - self.X @ beta
        group_resid_sums = np.bincount(self.codes, weights=resid, minlength=self.sizes.shape[0])
        weighted_rss = float(resid @ resid - shrink @ (group_resid_sums**2))
        if not weighted_rss > 0.0 or not np.isfinite(weighted_rss):
            raise ModelingError("non-finite likelihood: weighted residual sum of squares vanished")
        sigma2 = weighted_rss / self.n
        logdet = float(np.sum(np.log1p(ratio * self.sizes)))
        deviance = self.n * math.log(2.0 * math.pi * sigma2) + logdet + self.n
        return deviance, beta, sigma2, xtwx


def _group_codes(groups) -> tuple[np.ndarray, int]:
    labels = np.asarray(groups)
    if labels.ndim != 1:
        raise ModelingError("groups must be a flat label array")
    _, codes = np.unique(labels, return_inverse=True)
    return codes, int(codes.max()) + 1 if codes.size else 0


def profiled_deviance(ratio: float, design: ModelDesign) -> float:
    """-2 log-likelihood with beta and sigma2 concentrated out.

    Exposes the exact objective the fitter minimizes, so independent
    oracles (grid searches, dense reimplementations) can check it.
    """
    if ratio < 0.0:
        raise ModelingError(f"variance ratio must be >= 0, got {ratio}")
    codes, n_groups = _group_codes(design.groups)
    problem = _GroupedProblem(design.X, design.y, codes, n_groups)
    return problem.solve(ratio)[0]


def _golden_section(f, lo: float, hi: float, tol: float) -> tuple[float, float]:
    """Minimize a unimodal scalar function; returns (argmin, bracket width)."""
    width = hi - lo
    x1 = lo + _INVPHI2 * width
    x2 = lo + _INVPHI * width
    f1 = f(x1)
    f2 = f(x2)
    while width > tol:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            width = hi - lo
            x1 = lo + _INVPHI2 * width
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            width = hi - lo
            x2 = lo + _INVPHI * width
            f2 = f(x2)
    return 0.5 * (lo + hi), width


class RandomInterceptLMM(RegressorMixin, BaseEstimator):
    """sklearn-style ML estimator for a single random intercept.

    Parameters
    ----------
    max_ratio : float, default=1e6
        Upper bound of the variance-ratio search interval.
    tol : float, default=1e-8
        Golden-section bracket tolerance on the log1p(ratio) scale.

    Attributes (after ``fit``)
    --------------------------
    coef_, se_, zvalues_, pvalues_ : per-column inference arrays
    sigma2_, tau2_, variance_ratio_ : variance components
    loglik_ : maximized ML log-likelihood
    n_obs_, n_groups_, converged_ : bookkeeping
    """

    def __init__(self, max_ratio: float = DEFAULT_MAX_RATIO, tol: float = DEFAULT_TOL):
        self.max_ratio = max_ratio
        self.tol = tol

    def fit(self, X, y, groups):
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64).reshape(-1)
        if X.ndim != 2:
            raise ModelingError(f"X must be 2-D, got shape {X.shape}")
        n, p = X.shape
        if y.shape[0] != n:
            raise ModelingError(f"X has {n} rows but y has {y.shape[0]}")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise ModelingError("design and response must be finite")
        codes, n_groups = _group_codes(groups)
        if codes.shape[0] != n:
            raise ModelingError(f"X has {n} rows but groups has {codes.shape[0]}")
        if n <= p:
            raise ModelingError(f"need more observations ({n}) than fixed effects ({p})")
        if np.linalg.matrix_rank(X) < p:
            raise ModelingError("design matrix is rank deficient")

        problem = _GroupedProblem(X, y, codes, n_groups)

        if n_groups < 2:
            warnings.warn(
                "only one group: random-intercept variance is not identifiable, pinning tau2 to 0",
                UserWarning,
                stacklevel=2,
            )
            ratio_hat, converged = 0.0, True
        else:
            def objective(u: float) -> float:
                return problem.solve(math.expm1(u))[0]

            u_hat, width = _golden_section(objective, 0.0, math.log1p(self.max_ratio), self.tol)
            ratio_hat = math.expm1(u_hat)
            converged = width < self.tol
            # The search interval is open at 0 only through the bracket;
            # take the boundary exactly when it is at least as good.
            if problem.solve(0.0)[0] <= problem.solve(ratio_hat)[0]:
                ratio_hat = 0.0

        deviance, beta, sigma2, xtwx = problem.solve(ratio_hat)
        try:
            cov_beta = sigma2 * np.linalg.inv(xtwx)
        except np.linalg.LinAlgError as exc:
            raise ModelingError("normal equations singular at the optimum") from exc
        se = np.sqrt(np.diag(cov_beta))
        with np.errstate(divide="ignore", invalid="ignore"):
            zvalues = np.where(se > 0, beta / se, np.inf)
        pvalues = np.array([wald_p(z) for z in zvalues])

        self.coef_ = beta
        self.se_ = se
        self.zvalues_ = zvalues
        self.pvalues_ = pvalues
        self.sigma2_ = float(sigma2)
        self.variance_ratio_ = float(ratio_hat)
        self.tau2_ = float(ratio_hat * sigma2)
        self.loglik_ = -0.5 * float(deviance)
        self.n_obs_ = n
        self.n_groups_ = n_groups
        self.converged_ = bool(converged)
        return self

    def predict(self, X) -> np.ndarray:
        if not hasattr(self, "coef_"):
            raise NotFittedError("this RandomInterceptLMM is not fitted yet")
        return np.asarray(X, dtype=np.float64) @ self.coef_


def fit_lmm(design: ModelDesign, max_ratio: float = DEFAULT_MAX_RATIO, tol: float = DEFAULT_TOL) -> FitResult:
    """Fit a design from :func:`build_design` and package the result."""
    est = RandomInterceptLMM(max_ratio=max_ratio, tol=tol).fit(design.X, design.y, design.groups)
    return FitResult(
        column_names=tuple(design.column_names),
        beta=est.coef_,
        se=est.se_,
        z=est.zvalues_,
        p=est.pvalues_,
        sigma2=est.sigma2_,
        tau2=est.tau2_,
        variance_ratio=est.variance_ratio_,
        loglik=est.loglik_,
        n_obs=est.n_obs_,
        n_groups=est.n_groups_,
        k_params=design.X.shape[1] + 2,
        converged=est.converged_,
        model_id=design.model_id,
    )
