"""Smoothed alignment trajectories over normalized dialogue position.

The estimator is Nadaraya-Watson kernel regression with a Gaussian
kernel: a kernel-weighted mean of the per-turn alignment scores, read
out on an equally spaced position grid.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.exceptions import NotFittedError

from .alignment import AlignmentRecord, similarity_column
from .errors import CorpusError

ROLE_FILTERS = ("tutor", "student", "both")


@dataclass(frozen=True)
class TrajectoryCurve:
    """Plot-ready smoothed trajectory for one (anchor, role) slice."""

    grid: np.ndarray        # strictly increasing positions in [0, 1]
    values: np.ndarray      # smoothed mean alignment per grid point
    n_support: np.ndarray   # effective sample count per grid point
    anchor: str
    role_filter: str
    bandwidth: float


class NadarayaWatsonRegressor(RegressorMixin, BaseEstimator):
    """Gaussian-kernel local mean, stabilized for tiny bandwidths.

    Weights are computed as exp(-z_i^2/2 - max_j(-z_j^2/2)) so the
    denominator always contains a term equal to 1: when every raw kernel
    weight underflows, the prediction degrades gracefully to the mean of
    the nearest training points instead of 0/0.

    Parameters
    ----------
    bandwidth : float, default=0.05
        Gaussian kernel scale on the predictor axis; must be > 0.
    """

    def __init__(self, bandwidth: float = 0.05):
        self.bandwidth = bandwidth

    def fit(self, X, y):
        if not self.bandwidth > 0:
            raise ValueError(f"bandwidth must be > 0, got {self.bandwidth}")
        x = np.asarray(X, dtype=np.float64).reshape(-1)
        t = np.asarray(y, dtype=np.float64).reshape(-1)
        if x.size == 0:
            raise ValueError("at least one training point is required")
        if x.size != t.size:
            raise ValueError(f"X and y disagree on length: {x.size} vs {t.size}")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(t))):
            raise ValueError("training data must be finite")
        self.x_train_ = x
        self.y_train_ = t
        return self

    def _check_fitted(self):
        if not hasattr(self, "x_train_"):
            raise NotFittedError("this NadarayaWatsonRegressor is not fitted yet")

    def _weights(self, X) -> np.ndarray:
        grid = np.asarray(X, dtype=np.float64).reshape(-1)
        z = (grid[:, None] - self.x_train_[None, :]) / self.bandwidth
        log_k = -0.5 * z * z
        return np.exp(log_k - log_k.max(axis=1, keepdims=True))

    def predict(self, X) -> np.ndarray:
        self._check_fitted()
        w = self._weights(X)
        return w @ self.y_train_ / w.sum(axis=1)

    def predict_with_support(self, X) -> tuple[np.ndarray, np.ndarray]:
        """Predictions plus the effective sample count (sum w)^2 / sum w^2.

        The support count is invariant to weight rescaling; it equals the
        number of points when all weights are equal and tends to 1 when a
        single point dominates.
        """
        self._check_fitted()
        w = self._weights(X)
        total = w.sum(axis=1)
        return w @ self.y_train_ / total, total**2 / (w * w).sum(axis=1)


def smooth_trajectory(
    records: Sequence[AlignmentRecord],
    anchor: str,
    role_filter: str = "both",
    bandwidth: float = 0.05,
    grid_points: int = 101,
) -> TrajectoryCurve:
    """Smooth one anchor's similarity over relative position.

    The grid is ``grid_points`` equally spaced positions on [0, 1].
    """
    if role_filter not in ROLE_FILTERS:
        raise ValueError(f"role_filter must be one of {ROLE_FILTERS}, got {role_filter!r}")
    if grid_points < 2:
        raise ValueError(f"grid_points must be >= 2, got {grid_points}")
    subset = [r for r in records if role_filter == "both" or r.role == role_filter]
    if not subset:
        raise CorpusError(f"no records match role filter {role_filter!r}")
    positions = np.array([r.rel_position for r in subset], dtype=np.float64)
    values = similarity_column(subset, anchor)
    grid = np.linspace(0.0, 1.0, grid_points)
    model = NadarayaWatsonRegressor(bandwidth=bandwidth).fit(positions, values)
    smoothed, support = model.predict_with_support(grid)
    return TrajectoryCurve(
        grid=grid,
        values=smoothed,
        n_support=support,
        anchor=anchor,
        role_filter=role_filter,
        bandwidth=bandwidth,
    )


def write_trajectory_csv(curve: TrajectoryCurve, sink) -> None:
    """CSV export: one ``position,value,n_support`` row per grid point."""
    if isinstance(sink, (str, Path)):
        with open(sink, "w", encoding="utf-8", newline="") as fh:
            write_trajectory_csv(curve, fh)
        return
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(["position", "value", "n_support"])
    for pos, val, sup in zip(curve.grid, curve.values, curve.n_support):
        writer.writerow([f"{pos:.9g}", f"{val:.9g}", f"{sup:.9g}"])


def trajectory_csv_text(curve: TrajectoryCurve) -> str:
    buf = io.StringIO()
    write_trajectory_csv(curve, buf)
    return buf.getvalue()
