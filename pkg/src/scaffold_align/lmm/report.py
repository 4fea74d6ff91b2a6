"""JSON-ready report dictionaries for fits and comparisons."""

from __future__ import annotations

import math

from .compare import ComparisonResult, bic, icc
from .design import ModelDesign
from .diagnostics import residual_diagnostics, vif
from .model import FitResult


def _jsonable(x: float) -> float | str:
    # json.dump would emit bare Infinity/NaN, which many parsers reject.
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return x


def fit_report(fit: FitResult, design: ModelDesign) -> dict:
    """Full per-model report: inference, variance components, diagnostics."""
    report = {
        "model_id": fit.model_id,
        "n_obs": fit.n_obs,
        "n_groups": fit.n_groups,
        "columns": list(fit.column_names),
        "beta": [float(b) for b in fit.beta],
        "se": [float(s) for s in fit.se],
        "z": [_jsonable(float(z)) for z in fit.z],
        "p": [float(p) for p in fit.p],
        "sigma2": fit.sigma2,
        "tau2": fit.tau2,
        "icc": icc(fit),
        "loglik": fit.loglik,
        "bic": bic(fit),
        "converged": fit.converged,
    }
    if design.X.shape[1] >= 3:  # VIF needs >= 2 non-intercept columns
        report["vif"] = {name: _jsonable(value) for name, value in vif(design).items()}
    else:
        report["vif"] = {}
    report["diagnostics"] = residual_diagnostics(fit, design).to_dict()
    return report


def comparison_report(result: ComparisonResult, full_id: int | None, reduced_id: int | None) -> dict:
    return {
        "full_model": full_id,
        "reduced_model": reduced_id,
        "chi2": result.chi2,
        "df": result.df,
        "p_value": result.p_value,
        "bic_full": result.bic_full,
        "bic_reduced": result.bic_reduced,
    }
