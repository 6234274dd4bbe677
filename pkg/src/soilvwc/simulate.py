"""Synthetic ground truth: rainfall-driven soil moisture dynamics at sensor
depth plus noisy low-cost-sensor responses.

The moisture model is a bucket: rain adds water over the infiltration depth,
gravity drains the excess above field capacity with a linear rate, and a
small constant evapotranspiration loss applies above the residual content.
That makes the configured field capacity an exact, recoverable ground truth.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dataset import CHANNEL_ORDER, Dataset, SensorRecord, format_value
from .soilphys import RainEvent


@dataclass(frozen=True)
class SoilParams:
    theta_fc: float = 0.055
    theta_sat: float = 0.35
    theta_r: float = 0.02
    drainage_rate: float = 3e-5  # 1/s, ~9 h e-folding above field capacity
    et_rate: float = 1e-8  # VWC/s lost while theta > theta_r
    infiltration_depth: float = 0.30  # meters of column receiving the rain
    theta0: float | None = None  # initial VWC; None = start at field capacity

    def __post_init__(self):
        if not (self.theta_r < self.theta_fc < self.theta_sat):
            raise ValueError("need theta_r < theta_fc < theta_sat")
        if self.drainage_rate <= 0:
            raise ValueError("drainage_rate must be > 0")


@dataclass(frozen=True)
class RainSchedule:
    events: tuple

    def __post_init__(self):
        evs = tuple(sorted(self.events, key=lambda e: e.start))
        for a, b in zip(evs[:-1], evs[1:]):
            if b.start < a.end:
                raise ValueError("rain events must not overlap")
        object.__setattr__(self, "events", evs)


@dataclass(frozen=True)
class SensorNoiseParams:
    # Moisture transfer curves raw = a/(b + theta) + c*(T - 20) + noise;
    # both are monotone (decreasing) in theta over [theta_r, theta_sat].
    yl69_a: float = 260.0
    yl69_b: float = 0.26
    yl69_temp_coeff: float = 2.0
    yl69_std: float = 2.0
    sen13322_a: float = 180.0
    sen13322_b: float = 0.18
    sen13322_temp_coeff: float = -1.5
    sen13322_std: float = 2.0
    humidity_half: float = 0.08  # theta at which humidity reads 50%
    humidity_std: float = 1.0
    ds18s20_std: float = 0.1
    sht10_temp_std: float = 0.1
    temp_mean_c: float = 17.0
    temp_amplitude_c: float = 1.5
    temp_lag_seconds: float = 28800.0  # phase lag of the diurnal wave at depth

    def __post_init__(self):
        for std in (self.yl69_std, self.sen13322_std, self.humidity_std,
                    self.ds18s20_std, self.sht10_temp_std):
            if std < 0:
                raise ValueError("noise std must be >= 0")


@dataclass(frozen=True)
class SimConfig:
    duration_seconds: float = 11 * 86400.0
    dt_seconds: float = 120.0
    seed: int = 0
    soil: SoilParams = field(default_factory=SoilParams)
    noise: SensorNoiseParams = field(default_factory=SensorNoiseParams)
    schedule: RainSchedule | None = None  # None = default_paper_like_schedule()

    def __post_init__(self):
        if self.dt_seconds <= 0 or self.duration_seconds < self.dt_seconds:
            raise ValueError("need dt > 0 and duration >= dt")

    def n_steps(self) -> int:
        return int(round(self.duration_seconds / self.dt_seconds))

    def rain_events(self):
        sched = self.schedule if self.schedule is not None else default_paper_like_schedule()
        return sched.events


def default_paper_like_schedule() -> RainSchedule:
    """Heavy rain on day 0, a long dry gap, two moderate mid-run events and a
    late event: guarantees at least one quiescent window two days after rain."""
    day = 86400.0
    return RainSchedule(
        events=(
            RainEvent(start=0.0, end=0.25 * day, depth_mm=30.0),
            RainEvent(start=4.0 * day, end=4.25 * day, depth_mm=8.0),
            RainEvent(start=5.5 * day, end=5.75 * day, depth_mm=6.0),
            RainEvent(start=9.0 * day, end=9.25 * day, depth_mm=10.0),
        )
    )


def _rain_depth_in_step(events, t0, t1):
    """Millimeters of rain falling in [t0, t1); event depth is spread
    uniformly over the event duration."""
    total = 0.0
    for e in events:
        overlap = min(t1, e.end) - max(t0, e.start)
        if overlap > 0:
            total += e.depth_mm * overlap / (e.end - e.start)
    return total


def simulate_vwc(cfg: SimConfig):
    """Explicit-Euler bucket dynamics; returns (timestamps, vwc) arrays."""
    soil = cfg.soil
    events = cfg.rain_events()
    n = cfg.n_steps()
    dt = cfg.dt_seconds
    ts = np.arange(n, dtype=np.int64) * int(dt)
    theta = np.empty(n)
    th = soil.theta0 if soil.theta0 is not None else soil.theta_fc
    depth_to_frac = 1.0 / (1000.0 * soil.infiltration_depth)
    for i in range(n):
        theta[i] = th
        t0 = i * dt
        rain = _rain_depth_in_step(events, t0, t0 + dt) * depth_to_frac
        drain = soil.drainage_rate * max(th - soil.theta_fc, 0.0) * dt
        et = soil.et_rate * dt if th > soil.theta_r else 0.0
        th = th + rain - drain - et
        th = min(max(th, soil.theta_r), soil.theta_sat)
    return ts, theta


def _soil_temperature(ts, noise: SensorNoiseParams):
    phase = 2.0 * np.pi * (ts - noise.temp_lag_seconds) / 86400.0
    return noise.temp_mean_c + noise.temp_amplitude_c * np.sin(phase)


def _q9(values):
    """Quantize to 9 significant digits so CSV round trips are exact."""
    return np.array([float(format_value(v)) for v in values])


def synthesize_sensors(ts, vwc, cfg: SimConfig) -> Dataset:
    """Render noisy sensor channels for a VWC series; deterministic per seed.

    Each channel draws from its own RNG stream (seed, channel index), so
    disabling one channel's noise never shifts another's."""
    ts = np.asarray(ts, dtype=np.int64)
    vwc = np.asarray(vwc, dtype=float)
    if len(ts) == 0:
        raise ValueError("empty series")
    nz = cfg.noise
    n = len(ts)
    temp = _soil_temperature(ts.astype(float), nz)

    def stream(idx):
        return np.random.default_rng([cfg.seed, 2, idx])

    def gauss(idx, std):
        if std == 0:
            return np.zeros(n)
        return stream(idx).normal(0.0, std, size=n)

    ds18 = temp + gauss(0, nz.ds18s20_std)
    sht10_t = temp + gauss(1, nz.sht10_temp_std)
    humidity = 100.0 * vwc / (vwc + nz.humidity_half) + gauss(2, nz.humidity_std)
    humidity = np.clip(humidity, 0.0, 100.0)
    yl69 = nz.yl69_a / (nz.yl69_b + vwc) + nz.yl69_temp_coeff * (temp - 20.0)
    yl69 = np.clip(np.round(yl69 + gauss(3, nz.yl69_std)), 0, 1023)
    sen = nz.sen13322_a / (nz.sen13322_b + vwc) + nz.sen13322_temp_coeff * (temp - 20.0)
    sen = np.clip(np.round(sen + gauss(4, nz.sen13322_std)), 0, 1023)

    cols = {
        "ds18s20_temp_c": _q9(ds18),
        "sht10_temp_c": _q9(sht10_t),
        "sht10_humidity_pct": _q9(humidity),
        "yl69_raw": yl69,
        "sen13322_raw": sen,
    }
    vwc_q = _q9(np.clip(vwc, 0.0, 1.0))
    records = tuple(
        SensorRecord(
            timestamp=int(ts[i]),
            values=tuple(cols[c.value][i] for c in CHANNEL_ORDER),
            vwc_true=float(vwc_q[i]),
        )
        for i in range(n)
    )
    interval = int(ts[1] - ts[0]) if n >= 2 else None
    return Dataset(records, source="simulated", interval_seconds=interval)


def simulate_dataset(cfg: SimConfig) -> Dataset:
    ts, vwc = simulate_vwc(cfg)
    return synthesize_sensors(ts, vwc, cfg)


def truth_sidecar(cfg: SimConfig) -> str:
    """key=value ground-truth summary written next to simulated CSVs."""
    soil = cfg.soil
    lines = [
        f"theta_fc={format_value(soil.theta_fc)}",
        f"theta_sat={format_value(soil.theta_sat)}",
        f"k={format_value(soil.drainage_rate)}",
        f"seed={cfg.seed}",
    ]
    return "\n".join(lines) + "\n"
