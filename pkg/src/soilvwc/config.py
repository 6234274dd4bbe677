"""Run configuration: line-oriented ``section.key = value`` files plus
``--set section.key=value`` command-line overrides.

Every key has a documented default below; unknown keys are rejected.
``#`` starts a comment; blank lines are ignored; UTF-8 throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigError
from .models import ForestConfig, GbrConfig, MlpConfig, SvrConfig
from .models.crossval import RegressorSpec
from .simulate import RainSchedule, SensorNoiseParams, SimConfig, SoilParams
from .soilphys import FcConfig, RainEvent

_TRUE = {"true", "1", "yes", "on"}
_FALSE = {"false", "0", "no", "off"}


def _parse_bool(token):
    t = token.strip().lower()
    if t in _TRUE:
        return True
    if t in _FALSE:
        return False
    raise ConfigError(f"expected a boolean, got {token!r}")


# key -> (default, type, description)
DEFAULTS = {
    "sim.duration_days": (11.0, float, "simulated span in days"),
    "sim.dt_seconds": (120.0, float, "sampling interval"),
    "sim.seed": (0, int, "simulator noise seed"),
    "soil.theta_fc": (0.055, float, "field capacity (VWC fraction)"),
    "soil.theta_sat": (0.35, float, "saturation VWC"),
    "soil.theta_r": (0.02, float, "residual VWC"),
    "soil.drainage_rate": (3e-5, float, "gravity drainage rate above fc, 1/s"),
    "soil.et_rate": (1e-8, float, "evapotranspiration loss above theta_r, VWC/s"),
    "soil.infiltration_depth": (0.30, float, "soil column receiving rain, m"),
    "soil.theta0": ("auto", str, "initial VWC, or 'auto' for field capacity"),
    "rain.schedule": ("paper", str, "'paper' or 'start:end:depth_mm;...' in seconds/mm"),
    "noise.yl69_a": (260.0, float, "YL-69 transfer numerator"),
    "noise.yl69_b": (0.26, float, "YL-69 transfer offset"),
    "noise.yl69_temp_coeff": (2.0, float, "YL-69 counts per degC from 20C"),
    "noise.yl69_std": (2.0, float, "YL-69 noise std, counts"),
    "noise.sen13322_a": (180.0, float, "SEN13322 transfer numerator"),
    "noise.sen13322_b": (0.18, float, "SEN13322 transfer offset"),
    "noise.sen13322_temp_coeff": (-1.5, float, "SEN13322 counts per degC from 20C"),
    "noise.sen13322_std": (2.0, float, "SEN13322 noise std, counts"),
    "noise.humidity_half": (0.08, float, "theta giving 50% humidity"),
    "noise.humidity_std": (1.0, float, "humidity noise std, %"),
    "noise.ds18s20_std": (0.1, float, "DS18S20 noise std, degC"),
    "noise.sht10_temp_std": (0.1, float, "SHT10 temperature noise std, degC"),
    "noise.temp_mean_c": (17.0, float, "mean soil temperature"),
    "noise.temp_amplitude_c": (1.5, float, "diurnal amplitude at depth"),
    "noise.temp_lag_seconds": (28800.0, float, "diurnal phase lag at depth"),
    "fc.settle_seconds": (172800.0, float, "drainage settle time after rain"),
    "fc.slope_tol": (1e-8, float, "max |dVWC/dt| of a quiescent window, 1/s"),
    "fc.min_samples": (360, int, "minimum samples in a quiescent window"),
    "svr.c_penalty": (1.0, float, "SVR box constraint C"),
    "svr.epsilon_tube": (0.01, float, "SVR insensitive tube, VWC units"),
    "svr.gamma": (0.5, float, "RBF gamma = 1/(2 sigma^2)"),
    "svr.max_passes": (200000, int, "SMO pairwise update budget"),
    "svr.kkt_tol": (1e-3, float, "KKT violation tolerance"),
    "forest.n_estimators": (24, int, "number of trees"),
    "forest.max_leaf_nodes": (30, int, "per-tree leaf cap"),
    "forest.max_depth": (7, int, "per-tree depth cap"),
    "forest.bootstrap": (True, bool, "bootstrap resampling per tree"),
    "forest.min_samples_leaf": (1, int, "minimum rows per leaf"),
    "gbr.n_estimators": (100, int, "boosting stages"),
    "gbr.max_leaf_nodes": (25, int, "per-stage leaf cap"),
    "gbr.max_depth": (3, int, "per-stage depth cap"),
    "gbr.random_state": (0, int, "deterministic tie-breaking stream seed"),
    "gbr.learning_rate": (0.1, float, "stage shrinkage in (0, 1]"),
    "mlp.hidden_layers": (9, int, "hidden layer count"),
    "mlp.hidden_width": (32, int, "hidden layer width"),
    "mlp.l2_lambda": (1e-4, float, "L2 penalty on weight matrices"),
    "mlp.epochs": (150, int, "training epochs"),
    "mlp.batch_size": (128, int, "mini-batch size"),
    "mlp.learning_rate": (1e-3, float, "Adam step size"),
    "mlp.beta1": (0.9, float, "Adam first-moment decay"),
    "mlp.beta2": (0.999, float, "Adam second-moment decay"),
    "mlp.adam_eps": (1e-8, float, "Adam denominator epsilon"),
    "mlp.bn_eps": (1e-5, float, "batch-norm variance epsilon"),
    "mlp.bn_momentum": (0.9, float, "running-statistics momentum"),
    "cv.folds": (5, int, "cross-validation fold count"),
    "cv.mode": ("contiguous", str, "'contiguous' or 'shuffled'"),
    "cv.seed": (0, int, "shuffle seed for shuffled mode"),
    "train.seed": (0, int, "model fitting seed"),
    "compare.dispersion_max": (0.005, float, "max window std for a usable FC estimate"),
}


@dataclass
class RunConfig:
    values: dict

    @classmethod
    def defaults(cls) -> "RunConfig":
        return cls({k: v for k, (v, _, _) in DEFAULTS.items()})

    def get(self, key):
        return self.values[key]

    def set(self, key, raw):
        if key not in DEFAULTS:
            raise ConfigError(f"unknown configuration key {key!r}")
        _, typ, _ = DEFAULTS[key]
        raw = str(raw).strip()
        try:
            if typ is bool:
                value = _parse_bool(raw)
            else:
                value = typ(raw)
        except (ValueError, ConfigError) as exc:
            raise ConfigError(f"bad value for {key}: {exc}") from None
        self.values[key] = value

    def apply_file(self, text):
        for line_no, line in enumerate(text.split("\n"), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"config line {line_no}: expected 'section.key = value'")
            key, _, raw = line.partition("=")
            self.set(key.strip(), raw)

    def apply_overrides(self, pairs):
        for pair in pairs:
            if "=" not in pair:
                raise ConfigError(f"--set expects section.key=value, got {pair!r}")
            key, _, raw = pair.partition("=")
            self.set(key.strip(), raw)

    # --- typed views -------------------------------------------------------

    def rain_schedule(self) -> RainSchedule | None:
        spec = self.get("rain.schedule").strip()
        if spec == "paper":
            return None
        events = []
        for part in spec.split(";"):
            part = part.strip()
            if not part:
                continue
            bits = part.split(":")
            if len(bits) != 3:
                raise ConfigError(f"bad rain event {part!r}, expected start:end:depth_mm")
            try:
                events.append(RainEvent(float(bits[0]), float(bits[1]), float(bits[2])))
            except ValueError as exc:
                raise ConfigError(f"bad rain event {part!r}: {exc}") from None
        if not events:
            raise ConfigError("rain.schedule contains no events")
        return RainSchedule(tuple(events))

    def soil_params(self) -> SoilParams:
        theta0_raw = self.get("soil.theta0")
        theta0 = None if theta0_raw == "auto" else float(theta0_raw)
        try:
            return SoilParams(
                theta_fc=self.get("soil.theta_fc"),
                theta_sat=self.get("soil.theta_sat"),
                theta_r=self.get("soil.theta_r"),
                drainage_rate=self.get("soil.drainage_rate"),
                et_rate=self.get("soil.et_rate"),
                infiltration_depth=self.get("soil.infiltration_depth"),
                theta0=theta0,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def noise_params(self) -> SensorNoiseParams:
        return SensorNoiseParams(
            yl69_a=self.get("noise.yl69_a"),
            yl69_b=self.get("noise.yl69_b"),
            yl69_temp_coeff=self.get("noise.yl69_temp_coeff"),
            yl69_std=self.get("noise.yl69_std"),
            sen13322_a=self.get("noise.sen13322_a"),
            sen13322_b=self.get("noise.sen13322_b"),
            sen13322_temp_coeff=self.get("noise.sen13322_temp_coeff"),
            sen13322_std=self.get("noise.sen13322_std"),
            humidity_half=self.get("noise.humidity_half"),
            humidity_std=self.get("noise.humidity_std"),
            ds18s20_std=self.get("noise.ds18s20_std"),
            sht10_temp_std=self.get("noise.sht10_temp_std"),
            temp_mean_c=self.get("noise.temp_mean_c"),
            temp_amplitude_c=self.get("noise.temp_amplitude_c"),
            temp_lag_seconds=self.get("noise.temp_lag_seconds"),
        )

    def sim_config(self) -> SimConfig:
        try:
            return SimConfig(
                duration_seconds=self.get("sim.duration_days") * 86400.0,
                dt_seconds=self.get("sim.dt_seconds"),
                seed=self.get("sim.seed"),
                soil=self.soil_params(),
                noise=self.noise_params(),
                schedule=self.rain_schedule(),
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def fc_config(self) -> FcConfig:
        return FcConfig(
            settle_seconds=self.get("fc.settle_seconds"),
            slope_tol=self.get("fc.slope_tol"),
            min_samples=self.get("fc.min_samples"),
        )

    def model_config(self, family: str):
        try:
            if family == "svr":
                return SvrConfig(
                    c_penalty=self.get("svr.c_penalty"),
                    epsilon_tube=self.get("svr.epsilon_tube"),
                    gamma=self.get("svr.gamma"),
                    max_passes=self.get("svr.max_passes"),
                    kkt_tol=self.get("svr.kkt_tol"),
                )
            if family == "rf":
                return ForestConfig(
                    n_estimators=self.get("forest.n_estimators"),
                    max_leaf_nodes=self.get("forest.max_leaf_nodes"),
                    max_depth=self.get("forest.max_depth"),
                    bootstrap=self.get("forest.bootstrap"),
                    min_samples_leaf=self.get("forest.min_samples_leaf"),
                )
            if family == "gbr":
                return GbrConfig(
                    n_estimators=self.get("gbr.n_estimators"),
                    max_leaf_nodes=self.get("gbr.max_leaf_nodes"),
                    max_depth=self.get("gbr.max_depth"),
                    random_state=self.get("gbr.random_state"),
                    learning_rate=self.get("gbr.learning_rate"),
                )
            if family == "mlp":
                return MlpConfig(
                    hidden_layers=self.get("mlp.hidden_layers"),
                    hidden_width=self.get("mlp.hidden_width"),
                    l2_lambda=self.get("mlp.l2_lambda"),
                    epochs=self.get("mlp.epochs"),
                    batch_size=self.get("mlp.batch_size"),
                    learning_rate=self.get("mlp.learning_rate"),
                    beta1=self.get("mlp.beta1"),
                    beta2=self.get("mlp.beta2"),
                    adam_eps=self.get("mlp.adam_eps"),
                    bn_eps=self.get("mlp.bn_eps"),
                    bn_momentum=self.get("mlp.bn_momentum"),
                )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        raise ConfigError(f"unknown model family {family!r}")

    def regressor_spec(self, family: str) -> RegressorSpec:
        return RegressorSpec(
            family=family, config=self.model_config(family), seed=self.get("train.seed")
        )


def load_run_config(config_path=None, overrides=(), seed=None) -> RunConfig:
    cfg = RunConfig.defaults()
    if config_path is not None:
        try:
            with open(config_path, "r", encoding="utf-8") as fh:
                cfg.apply_file(fh.read())
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from None
    cfg.apply_overrides(overrides)
    if seed is not None:
        cfg.values["sim.seed"] = seed
        cfg.values["train.seed"] = seed
        cfg.values["cv.seed"] = seed
    return cfg
