"""Gradient boosting for squared error: stagewise residual-fitting trees.

Stage 0 predicts the target mean; each later stage fits a shallow tree to
the current residuals and adds learning_rate times its output. With mean
leaves and learning_rate <= 1 the training MSE can never increase.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tree import tree_fit


@dataclass(frozen=True)
class GbrConfig:
    n_estimators: int = 100
    max_leaf_nodes: int = 25
    max_depth: int = 3
    random_state: int = 0
    learning_rate: float = 0.1

    def __post_init__(self):
        if self.n_estimators < 1 or self.max_depth < 1 or self.max_leaf_nodes < 2:
            raise ValueError("invalid boosting configuration")
        if not (0 < self.learning_rate <= 1):
            raise ValueError("learning_rate must be in (0, 1]")


@dataclass
class GbrModel:
    config: GbrConfig
    base_value: float
    trees: list
    train_mse: list  # per-stage training MSE (stage 0 first)


def gbr_fit(X, y, cfg: GbrConfig) -> GbrModel:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    base = float(y.mean())
    pred = np.full(len(y), base)
    trees = []
    history = [float(np.mean((y - pred) ** 2))]
    for _ in range(cfg.n_estimators):
        residual = y - pred
        tree = tree_fit(
            X,
            residual,
            max_depth=cfg.max_depth,
            max_leaf_nodes=cfg.max_leaf_nodes,
        )
        pred = pred + cfg.learning_rate * tree.predict(X)
        trees.append(tree)
        history.append(float(np.mean((y - pred) ** 2)))
    return GbrModel(config=cfg, base_value=base, trees=trees, train_mse=history)


def gbr_predict(model: GbrModel, X):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    pred = np.full(X.shape[0], model.base_value)
    for tree in model.trees:
        pred += model.config.learning_rate * tree.predict(X)
    return pred
