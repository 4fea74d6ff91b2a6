"""Assumption checks: collinearity and residual shape.

Residual moments use population formulas (divisor n); kurtosis is
reported as excess kurtosis (normal = 0) and labeled as such in every
export.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ModelingError
from .design import INTERCEPT, ModelDesign
from .model import FitResult


@dataclass(frozen=True)
class ResidualDiagnostics:
    """Shape summary of the marginal residuals y - X beta."""

    skewness: float
    excess_kurtosis: float
    heteroscedasticity_slope: float

    def to_dict(self) -> dict:
        return {
            "skewness": self.skewness,
            "excess_kurtosis": self.excess_kurtosis,
            "heteroscedasticity_slope": self.heteroscedasticity_slope,
        }


def vif(design: ModelDesign) -> dict[str, float]:
    """Variance inflation factor per non-intercept column.

    Each column is regressed (with intercept) on all other non-intercept
    columns; VIF = 1 / (1 - R^2).  Perfect collinearity reports +inf for
    the offending column rather than erroring, so callers can name it.
    """
    keep = [i for i, name in enumerate(design.column_names) if name != INTERCEPT]
    if len(keep) < 2:
        raise ModelingError("VIF needs at least 2 non-intercept columns")
    names = [design.column_names[i] for i in keep]
    Z = design.X[:, keep]
    n = Z.shape[0]
    out: dict[str, float] = {}
    for j in range(Z.shape[1]):
        target = Z[:, j]
        others = np.column_stack([np.ones(n)] + [Z[:, k] for k in range(Z.shape[1]) if k != j])
        coef, *_ = np.linalg.lstsq(others, target, rcond=None)
        resid = target - others @ coef
        total = float(np.sum((target - target.mean()) ** 2))
        if total == 0.0:
            out[names[j]] = math.inf
            continue
        r2 = 1.0 - float(resid @ resid) / total
        out[names[j]] = math.inf if r2 >= 1.0 - 1e-12 else 1.0 / (1.0 - r2)
    return out


def residual_diagnostics(fit: FitResult, design: ModelDesign) -> ResidualDiagnostics:
    """Moments of the marginal residuals plus a heteroscedasticity probe.

    The probe is the OLS slope of squared residuals on fitted values;
    a slope near 0 means no mean-variance trend.
    """
    resid = design.y - design.X @ fit.beta
    n = resid.shape[0]
    if n < 4:
        raise ModelingError(f"residual diagnostics need at least 4 residuals, got {n}")
    centered = resid - resid.mean()
    m2 = float(np.mean(centered**2))
    if m2 == 0.0:
        raise ModelingError("residuals are constant; moments undefined")
    m3 = float(np.mean(centered**3))
    m4 = float(np.mean(centered**4))

    fitted = design.X @ fit.beta
    sq = resid**2
    fitted_var = float(np.mean((fitted - fitted.mean()) ** 2))
    if fitted_var == 0.0:
        slope = 0.0
    else:
        slope = float(np.mean((fitted - fitted.mean()) * (sq - sq.mean()))) / fitted_var

    return ResidualDiagnostics(
        skewness=m3 / m2**1.5,
        excess_kurtosis=m4 / m2**2 - 3.0,
        heteroscedasticity_slope=slope,
    )
