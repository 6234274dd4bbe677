from .tree import Tree, tree_fit
from .forest import ForestConfig, forest_fit, forest_predict
from .boosting import GbrConfig, gbr_fit, gbr_predict
from .svr import SvrConfig, SvrModel, rbf_kernel, svr_fit, svr_predict
from .mlp import MlpConfig, AdamState, adam_step, mlp_init, mlp_forward, mlp_grad, mlp_fit, mlp_predict
from .crossval import RegressorSpec, FittedModel, fit_regressor, predict, cross_validate
from .serialize import save_model, load_model

__all__ = [
    "Tree",
    "tree_fit",
    "ForestConfig",
    "forest_fit",
    "forest_predict",
    "GbrConfig",
    "gbr_fit",
    "gbr_predict",
    "SvrConfig",
    "SvrModel",
    "rbf_kernel",
    "svr_fit",
    "svr_predict",
    "MlpConfig",
    "AdamState",
    "adam_step",
    "mlp_init",
    "mlp_forward",
    "mlp_grad",
    "mlp_fit",
    "mlp_predict",
    "RegressorSpec",
    "FittedModel",
    "fit_regressor",
    "predict",
    "cross_validate",
    "save_model",
    "load_model",
]
