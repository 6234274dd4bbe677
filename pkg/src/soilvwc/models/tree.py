"""CART regression tree with best-first growth.

Splits maximize weighted SSE reduction (variance reduction); thresholds sit
at midpoints of consecutive distinct sorted values; leaves predict the mean
target of their rows. Growth is best-first so a leaf-count cap and a depth
cap are both meaningful. Ties break deterministically: highest gain, then
earliest-created node, then lowest feature index, then lowest threshold.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np


@dataclass
class Tree:
    # Parallel node arrays; feature == -1 marks a leaf.
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    n_leaves: int
    depth: int

    def predict(self, X):
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[None, :]
        node = np.zeros(X.shape[0], dtype=np.int64)
        for _ in range(self.depth + 1):
            feat = self.feature[node]
            interior = feat >= 0
            if not interior.any():
                break
            rows = np.nonzero(interior)[0]
            f = feat[rows]
            go_left = X[rows, f] <= self.threshold[node[rows]]
            node[rows] = np.where(go_left, self.left[node[rows]], self.right[node[rows]])
        return self.value[node]


def _best_split(X, y, indices, min_samples_leaf):
    """Best (feature, threshold, gain) for one node, or None.

    Gain is parent SSE minus the two child SSEs, computed from prefix sums.
    """
    n = len(indices)
    if n < 2 * min_samples_leaf:
        return None
    ysub = y[indices]
    total1 = ysub.sum()
    total2 = np.dot(ysub, ysub)
    parent_sse = total2 - total1 * total1 / n
    if parent_sse <= 0:
        return None

    best = None  # (gain, feature, threshold, order, pos)
    for f in range(X.shape[1]):
        xs = X[indices, f]
        order = np.argsort(xs, kind="stable")
        xs_sorted = xs[order]
        ys_sorted = ysub[order]
        c1 = np.cumsum(ys_sorted)
        c2 = np.cumsum(ys_sorted * ys_sorted)
        # split after position i (0-based): left = [0..i], right = [i+1..n-1]
        pos = np.arange(n - 1)
        valid = xs_sorted[:-1] < xs_sorted[1:]
        valid &= (pos + 1 >= min_samples_leaf) & (n - pos - 1 >= min_samples_leaf)
        if not valid.any():
            continue
        nl = (pos + 1).astype(float)
        nr = n - nl
        sse_l = c2[:-1] - c1[:-1] * c1[:-1] / nl
        sse_r = (total2 - c2[:-1]) - (total1 - c1[:-1]) ** 2 / nr
        gains = np.where(valid, parent_sse - sse_l - sse_r, -np.inf)
        i = int(np.argmax(gains))  # first maximum = lowest threshold
        if gains[i] <= 0:
            continue
        if best is None or gains[i] > best[0]:
            thr = 0.5 * (xs_sorted[i] + xs_sorted[i + 1])
            best = (float(gains[i]), f, float(thr), order, i)
    return best


def tree_fit(X, y, max_depth, max_leaf_nodes, min_samples_leaf=1, rng=None) -> Tree:
    """Fit a regression tree; a single-row input yields a single leaf.

    ``rng`` is accepted for interface symmetry with ensemble callers; the
    builder itself is fully deterministic.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    if X.ndim == 1:
        X = X[:, None]

    feature = [-1]
    threshold = [0.0]
    left = [-1]
    right = [-1]
    value = [float(y.mean())]
    depths = {0: 0}

    heap = []
    counter = 0

    def push_candidate(node_id, indices):
        nonlocal counter
        if depths[node_id] >= max_depth:
            return
        split = _best_split(X, y, indices, min_samples_leaf)
        if split is None:
            return
        gain, f, thr, order, pos = split
        heapq.heappush(heap, (-gain, counter, node_id, f, thr, indices, order, pos))
        counter += 1

    all_idx = np.arange(len(y))
    push_candidate(0, all_idx)
    n_leaves = 1
    max_node_depth = 0

    while heap and n_leaves < max_leaf_nodes:
        _, _, node_id, f, thr, indices, order, pos = heapq.heappop(heap)
        left_idx = indices[order[: pos + 1]]
        right_idx = indices[order[pos + 1 :]]

        for child_idx in (left_idx, right_idx):
            cid = len(feature)
            feature.append(-1)
            threshold.append(0.0)
            left.append(-1)
            right.append(-1)
            value.append(float(y[child_idx].mean()))
            depths[cid] = depths[node_id] + 1
        left_id = len(feature) - 2
        right_id = len(feature) - 1
        feature[node_id] = f
        threshold[node_id] = thr
        left[node_id] = left_id
        right[node_id] = right_id
        n_leaves += 1
        max_node_depth = max(max_node_depth, depths[left_id])
        push_candidate(left_id, left_idx)
        push_candidate(right_id, right_idx)

    return Tree(
        feature=np.array(feature, dtype=np.int64),
        threshold=np.array(threshold, dtype=float),
        left=np.array(left, dtype=np.int64),
        right=np.array(right, dtype=np.int64),
        value=np.array(value, dtype=float),
        n_leaves=n_leaves,
        depth=max_node_depth,
    )
