"""Model designs for the progression regressions.

The response is the logit of relative position, squeezed away from the
boundary so the final message of a dialogue (progression exactly 1)
stays finite.  Predictors are standardized to population mean 0 / SD 1
over all modeled rows; the role-specific design standardizes the
similarity columns first and then splits them by role indicator.

Model ladder (fixed effects):
    0: intercept + sequence rank
    1: + message length
    2: + problem similarity + solution similarity
    3: similarities replaced by their tutor/student partitions
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..alignment import AlignmentRecord
from ..errors import DegenerateColumnError, ModelingError

MODEL_IDS = (0, 1, 2, 3)

INTERCEPT = "intercept"
COL_SEQ = "seq_rank"
COL_LENGTH = "msg_length"
COL_SIM_PROBLEM = "sim_problem"
COL_SIM_SOLUTION = "sim_solution"

# Suffix convention for role-partitioned columns ("sim_problem:tutor", ...).
PARTITION_ROLES = ("tutor", "student")


@dataclass(frozen=True)
class ModelDesign:
    """Response, fixed-effect matrix, and grouping labels for one model."""

    y: np.ndarray
    X: np.ndarray
    column_names: tuple[str, ...]
    groups: np.ndarray
    model_id: int
    standardization_params: dict[str, tuple[float, float]]

    @property
    def n_obs(self) -> int:
        return self.y.shape[0]

    @property
    def k_fixed(self) -> int:
        return self.X.shape[1]


def logit_progression(p: float, m_rows: int) -> float:
    """Boundary-safe logit of a progression fraction.

    The squeeze p' = (p*(M-1) + 0.5) / M maps (0, 1] into the open unit
    interval before the logit, so p = 1 stays finite for any M >= 2.
    """
    if not 0.0 < p <= 1.0:
        raise ValueError(f"progression must lie in (0, 1], got {p}")
    if m_rows < 2:
        raise ValueError(f"dataset row count must be >= 2, got {m_rows}")
    squeezed = (p * (m_rows - 1) + 0.5) / m_rows
    return math.log(squeezed / (1.0 - squeezed))


def standardize_column(values: np.ndarray, name: str) -> tuple[np.ndarray, float, float]:
    """Center and scale by the population SD (divisor n)."""
    mean = float(np.mean(values))
    sd = float(np.sqrt(np.mean((values - mean) ** 2)))
    if sd == 0.0 or not np.isfinite(sd):
        raise DegenerateColumnError(name)
    return (values - mean) / sd, mean, sd


def model_column_names(model_id: int) -> tuple[str, ...]:
    if model_id == 0:
        return (INTERCEPT, COL_SEQ)
    if model_id == 1:
        return (INTERCEPT, COL_SEQ, COL_LENGTH)
    if model_id == 2:
        return (INTERCEPT, COL_SEQ, COL_LENGTH, COL_SIM_PROBLEM, COL_SIM_SOLUTION)
    if model_id == 3:
        return (
            INTERCEPT,
            COL_SEQ,
            COL_LENGTH,
            f"{COL_SIM_PROBLEM}:tutor",
            f"{COL_SIM_PROBLEM}:student",
            f"{COL_SIM_SOLUTION}:tutor",
            f"{COL_SIM_SOLUTION}:student",
        )
    raise ModelingError(f"model_id must be one of {MODEL_IDS}, got {model_id}")


def build_design(records: Sequence[AlignmentRecord], model_id: int) -> ModelDesign:
    """Assemble the standardized design for one model of the ladder."""
    if model_id not in MODEL_IDS:
        raise ModelingError(f"model_id must be one of {MODEL_IDS}, got {model_id}")
    if not records:
        raise ModelingError("cannot build a design from zero records")
    n = len(records)
    if n < 2:
        raise ModelingError("need at least 2 records to model progression")

    y = np.array([logit_progression(r.rel_position, n) for r in records], dtype=np.float64)
    groups = np.array([r.tutor_id for r in records], dtype=object)
    roles = np.array([r.role for r in records], dtype=object)

    params: dict[str, tuple[float, float]] = {}

    def zcol(raw: np.ndarray, name: str) -> np.ndarray:
        col, mean, sd = standardize_column(raw.astype(np.float64), name)
        params[name] = (mean, sd)
        return col

    columns: list[np.ndarray] = [np.ones(n, dtype=np.float64)]
    columns.append(zcol(np.array([r.index for r in records]), COL_SEQ))
    if model_id >= 1:
        columns.append(zcol(np.array([r.msg_length for r in records]), COL_LENGTH))
    if model_id >= 2:
        z_problem = zcol(np.array([r.sim_problem for r in records]), COL_SIM_PROBLEM)
        z_solution = zcol(np.array([r.sim_solution for r in records]), COL_SIM_SOLUTION)
        if model_id == 2:
            columns.extend([z_problem, z_solution])
        else:
            for base, zvals in ((COL_SIM_PROBLEM, z_problem), (COL_SIM_SOLUTION, z_solution)):
                for role in PARTITION_ROLES:
                    part = zvals * (roles == role)
                    if not np.any(part != 0.0):
                        raise DegenerateColumnError(
                            f"{base}:{role}",
                            f"partitioned column '{base}:{role}' is identically zero "
                            f"(no {role} records with nonzero standardized similarity)",
                        )
                    columns.append(part)

    X = np.column_stack(columns)
    names = model_column_names(model_id)
    if np.linalg.matrix_rank(X) < X.shape[1]:
        raise ModelingError(f"design matrix for model {model_id} is rank deficient (columns: {names})")
    return ModelDesign(
        y=y,
        X=X,
        column_names=names,
        groups=groups,
        model_id=model_id,
        standardization_params=params,
    )
