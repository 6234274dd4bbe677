"""Fully connected regression network trained from scratch with numpy.

Architecture per hidden layer: dense -> batch norm -> ELU(alpha=1); the
output layer is a single dense unit with no normalization or activation.
Weights use truncated He-normal init (resampled outside +-2 sigma), biases
start at zero. Training minimizes batch MSE plus an L2 penalty on weight
matrices only, via backprop and Adam.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import BatchTooSmall, DimensionMismatch, TooFewRows


@dataclass(frozen=True)
class MlpConfig:
    hidden_layers: int = 9
    hidden_width: int = 32
    l2_lambda: float = 1e-4
    epochs: int = 150
    batch_size: int = 128
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    bn_eps: float = 1e-5
    bn_momentum: float = 0.9

    def __post_init__(self):
        if self.hidden_layers < 1 or self.hidden_width < 1:
            raise ValueError("invalid network shape")
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError("invalid training schedule")


@dataclass
class MlpModel:
    config: MlpConfig
    n_features: int
    params: dict  # name -> ndarray; see mlp_init for the layout
    run_mean: list  # per hidden layer, running batch-norm mean
    run_var: list
    loss_history: list = field(default_factory=list)


def elu(x):
    return np.where(x >= 0, x, np.expm1(x))


def _elu_grad(x):
    return np.where(x >= 0, 1.0, np.exp(x))


def _truncated_normal(rng, shape, sigma):
    """Normal(0, sigma) truncated at +-2 sigma by resampling."""
    z = rng.standard_normal(shape)
    bad = np.abs(z) > 2.0
    while bad.any():
        z[bad] = rng.standard_normal(int(bad.sum()))
        bad = np.abs(z) > 2.0
    return z * sigma


def mlp_init(cfg: MlpConfig, n_features: int, seed: int = 0) -> MlpModel:
    if n_features < 1:
        raise ValueError("n_features must be >= 1")
    rng = np.random.default_rng([seed, 0])
    params = {}
    run_mean, run_var = [], []
    fan_in = n_features
    for layer in range(cfg.hidden_layers):
        sigma = np.sqrt(2.0 / fan_in)
        params[f"W{layer}"] = _truncated_normal(rng, (fan_in, cfg.hidden_width), sigma)
        params[f"b{layer}"] = np.zeros(cfg.hidden_width)
        params[f"gamma{layer}"] = np.ones(cfg.hidden_width)
        params[f"beta{layer}"] = np.zeros(cfg.hidden_width)
        run_mean.append(np.zeros(cfg.hidden_width))
        run_var.append(np.ones(cfg.hidden_width))
        fan_in = cfg.hidden_width
    sigma = np.sqrt(2.0 / fan_in)
    params["W_out"] = _truncated_normal(rng, (fan_in, 1), sigma)
    params["b_out"] = np.zeros(1)
    return MlpModel(
        config=cfg, n_features=n_features, params=params, run_mean=run_mean, run_var=run_var
    )


def mlp_forward(model: MlpModel, X, train: bool):
    """Run the network; returns (predictions, cache).

    In train mode batch statistics normalize each layer and the cache holds
    everything backprop needs (including the batch stats, so the caller can
    fold them into the running averages). In infer mode the frozen running
    statistics are used and the cache is None.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.shape[0] == 0:
        raise BatchTooSmall("empty batch")
    if train and X.shape[0] < 2:
        raise BatchTooSmall("train-mode forward needs a batch of >= 2 rows")
    cfg = model.config
    p = model.params
    a = X
    cache = {"X": X, "layers": []} if train else None
    for layer in range(cfg.hidden_layers):
        h = a @ p[f"W{layer}"] + p[f"b{layer}"]
        if train:
            mu = h.mean(axis=0)
            var = h.var(axis=0)  # biased, matching the normalization
        else:
            mu = model.run_mean[layer]
            var = model.run_var[layer]
        inv_std = 1.0 / np.sqrt(var + cfg.bn_eps)
        xhat = (h - mu) * inv_std
        z = p[f"gamma{layer}"] * xhat + p[f"beta{layer}"]
        out = elu(z)
        if train:
            cache["layers"].append(
                {"a_in": a, "inv_std": inv_std, "xhat": xhat, "z": z,
                 "batch_mean": mu, "batch_var": var}
            )
        a = out
    pred = (a @ p["W_out"]).ravel() + p["b_out"][0]
    if train:
        cache["a_last"] = a
    return pred, cache


def mlp_predict(model: MlpModel, X):
    pred, _ = mlp_forward(model, X, train=False)
    return pred


def mlp_loss_and_grad(model: MlpModel, X, y):
    """Train-mode loss (batch MSE + L2 on weight matrices) and its gradient
    with respect to every trainable parameter. Also returns the cache so the
    caller can update running batch-norm statistics."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    if X.ndim == 1:
        X = X[None, :]
    m = X.shape[0]
    if m < 2:
        raise BatchTooSmall("gradient computation needs a batch of >= 2 rows")
    cfg = model.config
    p = model.params
    pred, cache = mlp_forward(model, X, train=True)

    lam = cfg.l2_lambda
    resid = pred - y
    weight_keys = [f"W{l}" for l in range(cfg.hidden_layers)] + ["W_out"]
    loss = float(np.mean(resid**2)) + lam * sum(float((p[k] ** 2).sum()) for k in weight_keys)

    grads = {}
    dpred = 2.0 * resid / m
    a_last = cache["a_last"]
    grads["W_out"] = a_last.T @ dpred[:, None] + 2.0 * lam * p["W_out"]
    grads["b_out"] = np.array([dpred.sum()])
    da = dpred[:, None] * p["W_out"].ravel()[None, :]

    for layer in reversed(range(cfg.hidden_layers)):
        c = cache["layers"][layer]
        dz = da * _elu_grad(c["z"])
        grads[f"gamma{layer}"] = (dz * c["xhat"]).sum(axis=0)
        grads[f"beta{layer}"] = dz.sum(axis=0)
        dxhat = dz * p[f"gamma{layer}"]
        xhat = c["xhat"]
        dh = (c["inv_std"] / m) * (
            m * dxhat - dxhat.sum(axis=0) - xhat * (dxhat * xhat).sum(axis=0)
        )
        grads[f"W{layer}"] = c["a_in"].T @ dh + 2.0 * lam * p[f"W{layer}"]
        grads[f"b{layer}"] = dh.sum(axis=0)
        da = dh @ p[f"W{layer}"].T

    return loss, grads, cache


def mlp_grad(model: MlpModel, X, y):
    _, grads, _ = mlp_loss_and_grad(model, X, y)
    return grads


@dataclass
class AdamState:
    t: int = 0
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)


def adam_step(state: AdamState, params: dict, grads: dict, cfg: MlpConfig):
    """One bias-corrected Adam update, in place; increments the step count once."""
    state.t += 1
    t = state.t
    for key, g in grads.items():
        if key not in params or params[key].shape != np.asarray(g).shape:
            raise DimensionMismatch(f"gradient/parameter mismatch for {key!r}")
        if key not in state.m:
            state.m[key] = np.zeros_like(params[key])
            state.v[key] = np.zeros_like(params[key])
        state.m[key] = cfg.beta1 * state.m[key] + (1 - cfg.beta1) * g
        state.v[key] = cfg.beta2 * state.v[key] + (1 - cfg.beta2) * g * g
        m_hat = state.m[key] / (1 - cfg.beta1**t)
        v_hat = state.v[key] / (1 - cfg.beta2**t)
        params[key] -= cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.adam_eps)
    return state, params


def _epoch_batches(order, batch_size):
    """Consecutive batches of the permuted row order; a final batch of a
    single row is folded into the previous one (batch norm needs >= 2)."""
    n = len(order)
    bounds = list(range(0, n, batch_size))
    batches = [order[b : b + batch_size] for b in bounds]
    if len(batches) > 1 and len(batches[-1]) < 2:
        batches[-2] = np.concatenate([batches[-2], batches[-1]])
        batches.pop()
    return batches


def mlp_fit(X, y, cfg: MlpConfig, seed: int = 0) -> MlpModel:
    """Train the network; returns the model with its per-epoch loss history.

    Epoch e shuffles row order with the RNG stream (seed, 1, e); running
    batch-norm statistics are updated during training and frozen afterwards.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    if X.ndim == 1:
        X = X[:, None]
    n = X.shape[0]
    if n < 2:
        raise TooFewRows("mlp_fit needs at least 2 rows")

    model = mlp_init(cfg, X.shape[1], seed)
    state = AdamState()
    mom = cfg.bn_momentum
    for epoch in range(cfg.epochs):
        rng = np.random.default_rng([seed, 1, epoch])
        order = rng.permutation(n)
        epoch_loss = 0.0
        for batch in _epoch_batches(order, cfg.batch_size):
            loss, grads, cache = mlp_loss_and_grad(model, X[batch], y[batch])
            for layer, c in enumerate(cache["layers"]):
                model.run_mean[layer] = mom * model.run_mean[layer] + (1 - mom) * c["batch_mean"]
                model.run_var[layer] = mom * model.run_var[layer] + (1 - mom) * c["batch_var"]
            adam_step(state, model.params, grads, cfg)
            epoch_loss += loss * len(batch)
        model.loss_history.append(epoch_loss / n)
    return model
