"""Common fit/predict surface over the four regressor families plus the
k-fold cross-validation driver.

A fitted model always bundles the standardizer learned on its training rows,
so callers hand in raw (unstandardized) feature matrices on both sides.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dataset import FoldPlan, Standardizer, standardize_fit
from ..errors import FamilyMismatch, NotConverged
from ..metrics import EvaluationReport, pearson_r
from .boosting import GbrConfig, gbr_fit, gbr_predict
from .forest import ForestConfig, forest_fit, forest_predict
from .mlp import MlpConfig, mlp_fit, mlp_predict
from .svr import SvrConfig, svr_fit, svr_predict

FAMILIES = ("svr", "rf", "gbr", "mlp")

_CONFIG_TYPES = {
    "svr": SvrConfig,
    "rf": ForestConfig,
    "gbr": GbrConfig,
    "mlp": MlpConfig,
}


@dataclass(frozen=True)
class RegressorSpec:
    family: str
    config: object
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        expected = _CONFIG_TYPES[self.family]
        if not isinstance(self.config, expected):
            raise ValueError(f"family {self.family!r} needs a {expected.__name__}")

    @classmethod
    def default(cls, family: str, seed: int = 0) -> "RegressorSpec":
        if family not in FAMILIES:
            raise ValueError(f"unknown family {family!r}")
        return cls(family=family, config=_CONFIG_TYPES[family](), seed=seed)


@dataclass
class FittedModel:
    family: str
    config: object
    standardizer: Standardizer
    inner: object
    seed: int = 0
    features: tuple | None = None  # channel names, when fitted from a Dataset


def fit_regressor(spec: RegressorSpec, X, y, features=None) -> FittedModel:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    standardizer = standardize_fit(X)
    Z = standardizer.apply(X)
    try:
        if spec.family == "svr":
            inner = svr_fit(Z, y, spec.config, spec.seed)
        elif spec.family == "rf":
            inner = forest_fit(Z, y, spec.config, spec.seed)
        elif spec.family == "gbr":
            inner = gbr_fit(Z, y, spec.config)
        else:
            inner = mlp_fit(Z, y, spec.config, spec.seed)
    except NotConverged as exc:
        partial = FittedModel(
            family=spec.family,
            config=spec.config,
            standardizer=standardizer,
            inner=exc.model,
            seed=spec.seed,
            features=tuple(features) if features else None,
        )
        raise NotConverged(partial, exc.violation) from None
    return FittedModel(
        family=spec.family,
        config=spec.config,
        standardizer=standardizer,
        inner=inner,
        seed=spec.seed,
        features=tuple(features) if features else None,
    )


def predict(model: FittedModel, X):
    X = np.asarray(X, dtype=float)
    Z = model.standardizer.apply(X)
    if model.family == "svr":
        return svr_predict(model.inner, Z)
    if model.family == "rf":
        return forest_predict(model.inner, Z)
    if model.family == "gbr":
        return gbr_predict(model.inner, Z)
    if model.family == "mlp":
        return mlp_predict(model.inner, Z)
    raise FamilyMismatch(model.family)


@dataclass
class CrossValResult:
    fold_reports: list
    pooled: EvaluationReport
    predictions: np.ndarray  # held-out prediction per record, record order


def cross_validate(spec: RegressorSpec, X, y, plan: FoldPlan) -> CrossValResult:
    """Fit on each fold complement, predict the held-out fold, pool in record
    order. Standardizers are re-fit per fold on training rows only."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    if plan.n != len(y):
        raise ValueError(f"fold plan covers {plan.n} records, data has {len(y)}")
    predictions = np.empty(len(y))
    fold_reports = []
    for fold in range(plan.k):
        held = plan.fold_indices(fold)
        train = np.nonzero(plan.assignment != fold)[0]
        model = fit_regressor(spec, X[train], y[train])
        pred = predict(model, X[held])
        predictions[held] = pred
        fold_reports.append(EvaluationReport.from_pairs(y[held], pred))
    pooled = EvaluationReport.from_pairs(y, predictions)
    return CrossValResult(fold_reports=fold_reports, pooled=pooled, predictions=predictions)
