"""Soil volumetric water content and field capacity estimation from
low-cost sensor channels: data handling, four from-scratch regressors,
a physics-based simulator, and the evaluation pipeline around them.
"""

from . import dataset, metrics, models, simulate, soilphys
from .config import RunConfig, load_run_config

__version__ = "0.1.0"

__all__ = [
    "dataset",
    "metrics",
    "models",
    "simulate",
    "soilphys",
    "RunConfig",
    "load_run_config",
    "__version__",
]
