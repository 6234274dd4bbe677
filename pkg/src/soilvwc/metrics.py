"""Evaluation metrics: RMSE, MAE and Pearson's correlation coefficient.

Reports are rendered at 8 decimal places. Pearson uses the raw-sums form
with a two-pass mean-centered fallback when the raw form loses more than
six digits to cancellation (near-constant VWC plateaus hit this).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyInput, LengthMismatch

# Relative size below which the raw-sums variance terms are considered
# cancellation-dominated (> 6 digits lost).
_CANCEL_TOL = 1e-6


def _pair(actual, predicted):
    a = np.asarray(actual, dtype=float).ravel()
    p = np.asarray(predicted, dtype=float).ravel()
    if a.size != p.size:
        raise LengthMismatch(a.size, p.size)
    if a.size == 0:
        raise EmptyInput("empty input series")
    return a, p


def rmse(actual, predicted) -> float:
    a, p = _pair(actual, predicted)
    d = a - p
    return math.sqrt(float(np.dot(d, d)) / d.size)


def mae(actual, predicted) -> float:
    a, p = _pair(actual, predicted)
    return float(np.abs(a - p).sum()) / a.size


def pearson_r(x, y) -> float | None:
    """Pearson's R, or None when either series has zero variance."""
    a, b = _pair(x, y)
    n = a.size
    if n < 2:
        raise EmptyInput("pearson_r needs at least 2 samples")
    sx = float(a.sum())
    sy = float(b.sum())
    sxx = float(np.dot(a, a))
    syy = float(np.dot(b, b))
    sxy = float(np.dot(a, b))
    vx = sxx - sx * sx / n
    vy = syy - sy * sy / n
    cov = sxy - sx * sy / n
    if vx < _CANCEL_TOL * sxx or vy < _CANCEL_TOL * syy:
        am = a - sx / n
        bm = b - sy / n
        vx = float(np.dot(am, am))
        vy = float(np.dot(bm, bm))
        cov = float(np.dot(am, bm))
    if vx <= 0.0 or vy <= 0.0:
        return None
    return cov / math.sqrt(vx * vy)


@dataclass(frozen=True)
class EvaluationReport:
    rmse: float
    mae: float
    pearson_r: float | None
    n: int

    @classmethod
    def from_pairs(cls, actual, predicted) -> "EvaluationReport":
        a, p = _pair(actual, predicted)
        r = pearson_r(a, p) if a.size >= 2 else None
        return cls(rmse=rmse(a, p), mae=mae(a, p), pearson_r=r, n=a.size)

    def format_r(self) -> str:
        return "n/a" if self.pearson_r is None else f"{self.pearson_r:.8f}"

    def to_lines(self, prefix: str = "report") -> list[str]:
        """Machine-readable key=value block at 8 decimal places."""
        return [
            f"{prefix}.n={self.n}",
            f"{prefix}.rmse={self.rmse:.8f}",
            f"{prefix}.mae={self.mae:.8f}",
            f"{prefix}.pearson_r={self.format_r()}",
        ]
