"""Model container serialization.

Format: a single JSON document, `{"format": "soilvwc-model", "version": 1,
"family": ..., "seed": ..., "config": {...}, "standardizer": {...},
"inner": {...}}`. Floats are emitted with Python's shortest round-trip repr,
so save -> load -> predict is bit-exact.
"""

from __future__ import annotations

import dataclasses
import json

import numpy as np

from ..dataset import Standardizer
from .boosting import GbrConfig, GbrModel
from .crossval import FittedModel
from .forest import ForestConfig, ForestModel
from .mlp import MlpConfig, MlpModel
from .svr import SvrConfig, SvrModel
from .tree import Tree

FORMAT_NAME = "soilvwc-model"
FORMAT_VERSION = 1

_CONFIG_TYPES = {
    "svr": SvrConfig,
    "rf": ForestConfig,
    "gbr": GbrConfig,
    "mlp": MlpConfig,
}


def _arr(a):
    return np.asarray(a).tolist()


def _tree_doc(t: Tree):
    return {
        "feature": _arr(t.feature),
        "threshold": _arr(t.threshold),
        "left": _arr(t.left),
        "right": _arr(t.right),
        "value": _arr(t.value),
        "n_leaves": t.n_leaves,
        "depth": t.depth,
    }


def _tree_from_doc(d):
    return Tree(
        feature=np.array(d["feature"], dtype=np.int64),
        threshold=np.array(d["threshold"], dtype=float),
        left=np.array(d["left"], dtype=np.int64),
        right=np.array(d["right"], dtype=np.int64),
        value=np.array(d["value"], dtype=float),
        n_leaves=d["n_leaves"],
        depth=d["depth"],
    )


def _inner_doc(model: FittedModel):
    inner = model.inner
    if model.family == "svr":
        return {
            "support_vectors": _arr(inner.support_vectors),
            "beta": _arr(inner.beta),
            "bias": inner.bias,
            "n_features": inner.n_features,
            "converged": inner.converged,
            "kkt_violation": inner.kkt_violation,
        }
    if model.family == "rf":
        return {"seed": inner.seed, "trees": [_tree_doc(t) for t in inner.trees]}
    if model.family == "gbr":
        return {
            "base_value": inner.base_value,
            "trees": [_tree_doc(t) for t in inner.trees],
            "train_mse": list(inner.train_mse),
        }
    return {
        "n_features": inner.n_features,
        "params": {k: _arr(v) for k, v in inner.params.items()},
        "run_mean": [_arr(v) for v in inner.run_mean],
        "run_var": [_arr(v) for v in inner.run_var],
        "loss_history": list(inner.loss_history),
    }


def model_to_json(model: FittedModel) -> str:
    doc = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "family": model.family,
        "seed": model.seed,
        "features": list(model.features) if model.features else None,
        "config": dataclasses.asdict(model.config),
        "standardizer": {
            "mean": _arr(model.standardizer.mean),
            "std": _arr(model.standardizer.std),
        },
        "inner": _inner_doc(model),
    }
    return json.dumps(doc, indent=1) + "\n"


def model_from_json(text: str) -> FittedModel:
    doc = json.loads(text)
    if doc.get("format") != FORMAT_NAME or doc.get("version") != FORMAT_VERSION:
        raise ValueError("not a soilvwc model container (or unsupported version)")
    family = doc["family"]
    config = _CONFIG_TYPES[family](**doc["config"])
    std = Standardizer(
        mean=np.array(doc["standardizer"]["mean"], dtype=float),
        std=np.array(doc["standardizer"]["std"], dtype=float),
    )
    d = doc["inner"]
    if family == "svr":
        sv = np.array(d["support_vectors"], dtype=float)
        if sv.size == 0:
            sv = sv.reshape(0, d["n_features"])
        inner = SvrModel(
            config=config,
            support_vectors=sv,
            beta=np.array(d["beta"], dtype=float),
            bias=d["bias"],
            n_features=d["n_features"],
            converged=d["converged"],
            kkt_violation=d["kkt_violation"],
        )
    elif family == "rf":
        inner = ForestModel(
            config=config, seed=d["seed"], trees=[_tree_from_doc(t) for t in d["trees"]]
        )
    elif family == "gbr":
        inner = GbrModel(
            config=config,
            base_value=d["base_value"],
            trees=[_tree_from_doc(t) for t in d["trees"]],
            train_mse=d["train_mse"],
        )
    else:
        inner = MlpModel(
            config=config,
            n_features=d["n_features"],
            params={k: np.array(v, dtype=float) for k, v in d["params"].items()},
            run_mean=[np.array(v, dtype=float) for v in d["run_mean"]],
            run_var=[np.array(v, dtype=float) for v in d["run_var"]],
            loss_history=list(d["loss_history"]),
        )
    feats = doc.get("features")
    return FittedModel(
        family=family,
        config=config,
        standardizer=std,
        inner=inner,
        seed=doc["seed"],
        features=tuple(feats) if feats else None,
    )


def save_model(model: FittedModel, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(model_to_json(model))


def load_model(path) -> FittedModel:
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_json(fh.read())
