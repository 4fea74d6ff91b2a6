"""Model comparison: BIC, likelihood-ratio tests, ICC.

Comparisons require properly nested ML fits.  Nesting is checked by
column names, with one wrinkle: a column that appears in the full model
only as its tutor/student partition ("name:tutor" + "name:student")
still nests the unpartitioned "name" column, because the two indicator
slices sum to the original column.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import ModelingError
from .model import FitResult
from .stats import chi_square_sf


@dataclass(frozen=True)
class ComparisonResult:
    """Likelihood-ratio test of a full fit against a nested reduction."""

    chi2: float
    df: int
    p_value: float
    bic_full: float
    bic_reduced: float


def bic(fit: FitResult) -> float:
    """Bayesian Information Criterion: -2 loglik + k ln(n).

    k counts the fixed effects plus the two variance parameters
    (sigma2, tau2); toolkits differ on this, so it is pinned here.
    """
    if not fit.converged:
        raise ModelingError("BIC requires a converged fit")
    return -2.0 * fit.loglik + fit.k_params * math.log(fit.n_obs)


def icc(fit: FitResult) -> float:
    """Intraclass correlation tau2 / (tau2 + sigma2)."""
    if not fit.converged:
        raise ModelingError("ICC requires a converged fit")
    return fit.tau2 / (fit.tau2 + fit.sigma2)


def _effective_columns(names: tuple[str, ...]) -> set[str]:
    """Column names plus base names recoverable from role partitions."""
    effective = set(names)
    bases = {name.split(":", 1)[0] for name in names if ":" in name}
    for base in bases:
        if f"{base}:tutor" in effective and f"{base}:student" in effective:
            effective.add(base)
    return effective


def is_nested(reduced: FitResult, full: FitResult) -> bool:
    return set(reduced.column_names) <= _effective_columns(full.column_names)


def lrt(full: FitResult, reduced: FitResult) -> ComparisonResult:
    """Likelihood-ratio test; both fits must be ML on the same rows."""
    if full.n_obs != reduced.n_obs:
        raise ModelingError(
            f"fits cover different data: {full.n_obs} vs {reduced.n_obs} observations"
        )
    if not is_nested(reduced, full):
        raise ModelingError(
            f"designs are not nested: {reduced.column_names} is not a subset of {full.column_names}"
        )
    df = len(full.beta) - len(reduced.beta)
    if df < 0:
        raise ModelingError("full model has fewer parameters than the reduced model")
    chi2 = max(0.0, 2.0 * (full.loglik - reduced.loglik))
    p_value = 1.0 if df == 0 else chi_square_sf(chi2, df)
    return ComparisonResult(
        chi2=chi2,
        df=df,
        p_value=p_value,
        bic_full=bic(full),
        bic_reduced=bic(reduced),
    )
