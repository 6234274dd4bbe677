"""Independent reference implementations used only by the test suite.

Everything here is deliberately written differently from the library code:
exact summation instead of BLAS dots, a dense QP solver instead of SMO,
exhaustive split enumeration instead of prefix sums. Tests compare library
output against these oracles rather than against copied-out expected values.
"""

import math

import numpy as np

from soilvwc.models.svr import _bias_from_bounds, _kkt_bounds, rbf_matrix


# --- metrics ----------------------------------------------------------------

def rmse_fsum(actual, predicted):
    sq = [(float(a) - float(p)) ** 2 for a, p in zip(actual, predicted)]
    return math.sqrt(math.fsum(sq) / len(sq))


def mae_fsum(actual, predicted):
    ab = [abs(float(a) - float(p)) for a, p in zip(actual, predicted)]
    return math.fsum(ab) / len(ab)


def pearson_fsum(x, y):
    n = len(x)
    mx = math.fsum(float(v) for v in x) / n
    my = math.fsum(float(v) for v in y) / n
    vx = math.fsum((float(v) - mx) ** 2 for v in x)
    vy = math.fsum((float(v) - my) ** 2 for v in y)
    if vx <= 0.0 or vy <= 0.0:
        return None
    cov = math.fsum((float(a) - mx) * (float(b) - my) for a, b in zip(x, y))
    return cov / math.sqrt(vx * vy)


# --- SVR dual QP ------------------------------------------------------------

def svr_qp_solve(X, y, cfg):
    """Solve the epsilon-SVR dual exactly with a dense QP solver.

    Variables are the 2n-vector (alpha, alpha*); returns (beta, bias) where
    beta = alpha - alpha* is snapped to {0, +-C} before the bias rule so KKT
    classification is unambiguous.
    """
    import cvxopt

    cvxopt.solvers.options["show_progress"] = False
    cvxopt.solvers.options["abstol"] = 1e-12
    cvxopt.solvers.options["reltol"] = 1e-12
    cvxopt.solvers.options["feastol"] = 1e-12

    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    n = len(y)
    C = cfg.c_penalty
    eps = cfg.epsilon_tube
    K = rbf_matrix(X, X, cfg.gamma)
    # minimize 1/2 z'Pz + q'z over z = (alpha, alpha*)
    P = np.block([[K, -K], [-K, K]])
    P = P + 1e-12 * np.eye(2 * n)  # keep the solver's factorization happy
    q = np.concatenate([eps - y, eps + y])
    G = np.vstack([-np.eye(2 * n), np.eye(2 * n)])
    h = np.concatenate([np.zeros(2 * n), np.full(2 * n, C)])
    A = np.concatenate([np.ones(n), -np.ones(n)])[None, :]
    b = np.zeros(1)
    sol = cvxopt.solvers.qp(
        cvxopt.matrix(P), cvxopt.matrix(q), cvxopt.matrix(G), cvxopt.matrix(h),
        cvxopt.matrix(A), cvxopt.matrix(b),
    )
    z = np.array(sol["x"]).ravel()
    beta = z[:n] - z[n:]
    # The interior-point solver only approaches active box bounds to within
    # its own accuracy (~1e-7 observed), so classify anything that close as
    # "at bound" before the bias rule.
    snap = 1e-6
    beta = np.where(np.abs(beta) <= snap, 0.0, beta)
    beta = np.where(beta >= C - snap, C, beta)
    beta = np.where(beta <= -C + snap, -C, beta)
    F = y - K @ beta
    low, up = _kkt_bounds(beta, F, C, eps)
    return beta, _bias_from_bounds(low, up)


def svr_qp_predict(X_train, beta, bias, X_test, cfg):
    K = rbf_matrix(np.asarray(X_test, float), np.asarray(X_train, float), cfg.gamma)
    return K @ beta + bias


# --- CART splits ------------------------------------------------------------

def sse(y):
    y = np.asarray(y, dtype=float)
    if y.size == 0:
        return 0.0
    return float(((y - y.mean()) ** 2).sum())


def best_split_gain(X, y, idx, min_samples_leaf=1):
    """Exhaustive best SSE-reduction over every (feature, midpoint threshold)."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    parent = sse(y[idx])
    best = 0.0
    for f in range(X.shape[1]):
        vals = np.unique(X[idx, f])
        for a, b in zip(vals[:-1], vals[1:]):
            thr = 0.5 * (a + b)
            mask = X[idx, f] <= thr
            if mask.sum() < min_samples_leaf or (~mask).sum() < min_samples_leaf:
                continue
            gain = parent - sse(y[idx[mask]]) - sse(y[idx[~mask]])
            best = max(best, gain)
    return best


def tree_node_rows(tree, X, y):
    """Replay a fitted tree on its training rows: node id -> training row
    indices reaching that node."""
    X = np.asarray(X, dtype=float)
    rows = {0: np.arange(len(y))}
    for nid in range(len(tree.feature)):
        f = tree.feature[nid]
        if f < 0:
            continue
        idx = rows[nid]
        mask = X[idx, f] <= tree.threshold[nid]
        rows[int(tree.left[nid])] = idx[mask]
        rows[int(tree.right[nid])] = idx[~mask]
    return rows


# --- Adam -------------------------------------------------------------------

def adam_reference_sequence(w0, steps, lr, beta1, beta2, eps):
    """Hand-style Adam on f(w) = w^2 (gradient 2w), one float op at a time."""
    w, m, v = float(w0), 0.0, 0.0
    out = []
    for t in range(1, steps + 1):
        g = 2.0 * w
        m = beta1 * m + (1.0 - beta1) * g
        v = beta2 * v + (1.0 - beta2) * g * g
        m_hat = m / (1.0 - beta1**t)
        v_hat = v / (1.0 - beta2**t)
        w = w - lr * m_hat / (math.sqrt(v_hat) + eps)
        out.append(w)
    return out
