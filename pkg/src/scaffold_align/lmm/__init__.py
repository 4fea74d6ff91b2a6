"""Random-intercept linear mixed models and associated inference."""

from .compare import ComparisonResult, bic, icc, is_nested, lrt
from .design import (
    COL_LENGTH,
    COL_SEQ,
    COL_SIM_PROBLEM,
    COL_SIM_SOLUTION,
    INTERCEPT,
    MODEL_IDS,
    PARTITION_ROLES,
    ModelDesign,
    build_design,
    logit_progression,
    model_column_names,
    standardize_column,
)
from .diagnostics import ResidualDiagnostics, residual_diagnostics, vif
from .model import FitResult, RandomInterceptLMM, fit_lmm, profiled_deviance
from .report import comparison_report, fit_report
from .stats import chi_square_sf, normal_sf, wald_p

__all__ = [
    "COL_LENGTH",
    "COL_SEQ",
    "COL_SIM_PROBLEM",
    "COL_SIM_SOLUTION",
    "INTERCEPT",
    "MODEL_IDS",
    "PARTITION_ROLES",
    "ComparisonResult",
    "FitResult",
    "ModelDesign",
    "RandomInterceptLMM",
    "ResidualDiagnostics",
    "bic",
    "build_design",
    "chi_square_sf",
    "comparison_report",
    "fit_lmm",
    "fit_report",
    "icc",
    "is_nested",
    "logit_progression",
    "lrt",
    "model_column_names",
    "normal_sf",
    "profiled_deviance",
    "residual_diagnostics",
    "standardize_column",
    "vif",
    "wald_p",
]
