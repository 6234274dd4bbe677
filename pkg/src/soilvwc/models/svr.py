"""Epsilon-insensitive support vector regression with an RBF kernel.

The dual is solved by SMO-style pairwise ascent on the net dual weights
beta_i = alpha_i - alpha_i^* (box |beta_i| <= C, sum beta_i = 0). Each step
picks the maximal KKT-violating pair and maximizes the dual exactly along
the feasible line segment, which is piecewise quadratic with breakpoints
where either weight crosses zero.
"""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass

import numpy as np

from ..errors import DimensionMismatch, NotConverged

_FULL_KERNEL_MAX_ROWS = 3000
_ROW_CACHE_SIZE = 512
_SNAP = 1e-12


@dataclass(frozen=True)
class SvrConfig:
    c_penalty: float = 1.0
    epsilon_tube: float = 0.01  # in target (VWC) units
    gamma: float = 0.5  # 1/(2 sigma^2); 0.5 = unit sigma on standardized features
    max_passes: int = 200000  # pairwise update budget
    kkt_tol: float = 1e-3

    def __post_init__(self):
        if self.c_penalty <= 0 or self.epsilon_tube < 0 or self.gamma <= 0:
            raise ValueError("invalid SVR configuration")


@dataclass
class SvrModel:
    config: SvrConfig
    support_vectors: np.ndarray  # rows with nonzero dual weight
    beta: np.ndarray  # net dual weights of the support vectors
    bias: float
    n_features: int
    converged: bool = True
    kkt_violation: float = 0.0


def rbf_kernel(x, y, gamma):
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.shape != y.shape:
        raise DimensionMismatch(f"kernel inputs {x.shape} vs {y.shape}")
    d = x - y
    return float(np.exp(-gamma * np.dot(d, d)))


def rbf_matrix(A, B, gamma):
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    if A.shape[1] != B.shape[1]:
        raise DimensionMismatch(f"kernel inputs {A.shape} vs {B.shape}")
    sq = (
        (A * A).sum(axis=1)[:, None]
        + (B * B).sum(axis=1)[None, :]
        - 2.0 * (A @ B.T)
    )
    return np.exp(-gamma * np.maximum(sq, 0.0))


class _KernelCache:
    """Full matrix for small problems, bounded row cache otherwise."""

    def __init__(self, X, gamma):
        self.X = X
        self.gamma = gamma
        self.n = X.shape[0]
        self.full = rbf_matrix(X, X, gamma) if self.n <= _FULL_KERNEL_MAX_ROWS else None
        self._rows = OrderedDict()

    def row(self, i):
        if self.full is not None:
            return self.full[i]
        if i in self._rows:
            self._rows.move_to_end(i)
            return self._rows[i]
        d = self.X - self.X[i]
        row = np.exp(-self.gamma * (d * d).sum(axis=1))
        self._rows[i] = row
        if len(self._rows) > _ROW_CACHE_SIZE:
            self._rows.popitem(last=False)
        return row

    def entry(self, i, j):
        return float(self.row(i)[j])


def _kkt_bounds(beta, F, C, eps):
    """Per-point admissible bias interval [low_i, up_i] from the KKT system."""
    low = np.empty_like(F)
    up = np.empty_like(F)
    at_zero = np.abs(beta) <= _SNAP
    at_upper = beta >= C - _SNAP
    at_lower = beta <= -C + _SNAP
    pos = (beta > _SNAP) & ~at_upper
    neg = (beta < -_SNAP) & ~at_lower

    low[at_zero] = F[at_zero] - eps
    up[at_zero] = F[at_zero] + eps
    low[pos] = F[pos] - eps
    up[pos] = F[pos] - eps
    low[neg] = F[neg] + eps
    up[neg] = F[neg] + eps
    low[at_upper] = -np.inf
    up[at_upper] = F[at_upper] - eps
    low[at_lower] = F[at_lower] + eps
    up[at_lower] = np.inf
    return low, up


def _bias_from_bounds(low, up):
    lo = float(np.max(low))
    hi = float(np.min(up))
    if not np.isfinite(lo):
        return hi if np.isfinite(hi) else 0.0
    if not np.isfinite(hi):
        return lo
    return 0.5 * (lo + hi)


def _line_max(v0, s, g0, eta, eps, C):
    """Maximize the dual along beta_i = v, beta_j = s - v.

    Returns (v_best, gain). The objective change is
    g0*(v-v0) - eta/2*(v-v0)^2 - eps*(|v|-|v0|) - eps*(|s-v|-|s-v0|).
    """
    lo = max(-C, s - C)
    hi = min(C, s + C)
    if hi - lo <= _SNAP:
        return v0, 0.0
    points = sorted({lo, hi} | {b for b in (0.0, s) if lo < b < hi})

    def delta_w(v):
        d = v - v0
        return (
            g0 * d
            - 0.5 * eta * d * d
            - eps * (abs(v) - abs(v0))
            - eps * (abs(s - v) - abs(s - v0))
        )

    candidates = list(points)
    for a, b in zip(points[:-1], points[1:]):
        mid = 0.5 * (a + b)
        sig_i = 1.0 if mid > 0 else (-1.0 if mid < 0 else 0.0)
        sig_j = 1.0 if s - mid > 0 else (-1.0 if s - mid < 0 else 0.0)
        if eta > _SNAP:
            v_star = v0 + (g0 - eps * (sig_i - sig_j)) / eta
            candidates.append(min(max(v_star, a), b))

    best_v, best_gain = v0, 0.0
    for v in candidates:
        # snap to breakpoints/bounds so KKT classification stays exact
        for snap_to in (0.0, s, C, -C):
            if abs(v - snap_to) <= _SNAP:
                v = snap_to
        if not (lo - _SNAP <= v <= hi + _SNAP):
            continue
        gain = delta_w(v)
        if gain > best_gain:
            best_v, best_gain = v, gain
    return best_v, best_gain


def svr_fit(X, y, cfg: SvrConfig, seed: int = 0) -> SvrModel:
    """Fit epsilon-SVR; raises NotConverged (carrying the best model) when the
    pairwise-update budget runs out. ``seed`` is accepted for interface
    uniformity; the solver is deterministic."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    if X.ndim == 1:
        X = X[:, None]
    n = len(y)
    if n < 2:
        raise ValueError("svr_fit needs at least 2 rows")
    C = cfg.c_penalty
    eps = cfg.epsilon_tube

    cache = _KernelCache(X, cfg.gamma)
    beta = np.zeros(n)
    F = y.copy()  # F_i = y_i - sum_j beta_j K_ij

    converged = False
    violation = np.inf
    for _ in range(cfg.max_passes):
        low, up = _kkt_bounds(beta, F, C, eps)
        i = int(np.argmax(low))
        j = int(np.argmin(up))
        violation = float(low[i] - up[j])
        if violation <= cfg.kkt_tol:
            converged = True
            break
        row_i = cache.row(i)
        row_j = cache.row(j)
        eta = float(row_i[i] + row_j[j] - 2.0 * row_i[j])
        v0 = beta[i]
        s = beta[i] + beta[j]
        g0 = float(F[i] - F[j])
        v, gain = _line_max(v0, s, g0, eta, eps, C)
        if gain <= 0.0:
            break  # numerically stuck; report as non-convergence below
        delta = v - v0
        beta[i] = v
        beta[j] = s - v
        F -= delta * (row_i - row_j)

    low, up = _kkt_bounds(beta, F, C, eps)
    bias = _bias_from_bounds(low, up)
    mask = np.abs(beta) > 0.0
    model = SvrModel(
        config=cfg,
        support_vectors=X[mask].copy(),
        beta=beta[mask].copy(),
        bias=bias,
        n_features=X.shape[1],
        converged=converged,
        kkt_violation=0.0 if converged else violation,
    )
    if not converged:
        raise NotConverged(model, violation)
    return model


def svr_predict(model: SvrModel, X):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[0] == 0:
        return np.empty(0)
    if X.shape[1] != model.n_features:
        raise DimensionMismatch(f"expected {model.n_features} features, got {X.shape[1]}")
    if len(model.beta) == 0:
        return np.full(X.shape[0], model.bias)
    K = rbf_matrix(X, model.support_vectors, model.config.gamma)
    return K @ model.beta + model.bias


def svr_dual_objective(X, y, beta, cfg: SvrConfig) -> float:
    """Dual objective W(beta) = -1/2 b'Kb + y'b - eps*sum|b| (for tests/diagnostics)."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    beta = np.asarray(beta, dtype=float)
    K = rbf_matrix(X, X, cfg.gamma)
    return float(
        -0.5 * beta @ K @ beta
        + np.dot(np.asarray(y, dtype=float), beta)
        - cfg.epsilon_tube * np.abs(beta).sum()
    )
