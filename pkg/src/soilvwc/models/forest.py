"""Random forest regressor: bagged CART trees, unweighted mean prediction.

Every split considers all features (no random subspace). Each tree draws its
bootstrap resample from an RNG stream seeded by (seed, tree index), so the
ensemble is bit-identical regardless of how the trees are scheduled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tree import tree_fit


@dataclass(frozen=True)
class ForestConfig:
    n_estimators: int = 24
    max_leaf_nodes: int = 30
    max_depth: int = 7
    bootstrap: bool = True
    min_samples_leaf: int = 1

    def __post_init__(self):
        if self.n_estimators < 1 or self.max_depth < 1 or self.max_leaf_nodes < 2:
            raise ValueError("invalid forest configuration")


@dataclass
class ForestModel:
    config: ForestConfig
    seed: int
    trees: list


def forest_fit(X, y, cfg: ForestConfig, seed: int = 0) -> ForestModel:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    n = len(y)
    trees = []
    for i in range(cfg.n_estimators):
        rng = np.random.default_rng([seed, i])
        if cfg.bootstrap:
            idx = rng.integers(0, n, size=n)
        else:
            idx = np.arange(n)
        trees.append(
            tree_fit(
                X[idx],
                y[idx],
                max_depth=cfg.max_depth,
                max_leaf_nodes=cfg.max_leaf_nodes,
                min_samples_leaf=cfg.min_samples_leaf,
            )
        )
    return ForestModel(config=cfg, seed=seed, trees=trees)


def forest_predict(model: ForestModel, X):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    total = np.zeros(X.shape[0])
    for tree in model.trees:  # summed in tree-index order for determinism
        total += tree.predict(X)
    return total / len(model.trees)
