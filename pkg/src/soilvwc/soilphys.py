"""Soil physics: TDR travel time -> permittivity -> VWC conversions and
algorithmic field-capacity estimation from a VWC time series.

Field capacity is read off the drying curve: after a rain event and a settle
period the VWC plateaus once gravity drainage stops; the estimator finds a
post-rain window whose robust (Theil-Sen) slope is flat enough and reports
the median VWC there.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonPhysical, NoQuiescentWindow, OutOfRange

LIGHT_SPEED = 2.99792458e8  # m/s

# Empirical cubic mapping apparent permittivity -> VWC fraction.
TOPP_COEFFS = (4.3e-6, -5.5e-4, 2.92e-2, -5.3e-2)

PERMITTIVITY_MIN = 1.0
PERMITTIVITY_MAX = 80.0


@dataclass(frozen=True)
class TdrReading:
    travel_time: float  # seconds
    line_length: float  # meters
    light_speed: float = LIGHT_SPEED

    def __post_init__(self):
        if self.travel_time <= 0:
            raise ValueError("travel_time must be > 0")
        if self.line_length <= 0:
            raise ValueError("line_length must be > 0")


def permittivity_from_travel_time(reading: TdrReading) -> float:
    """Apparent permittivity (t*c / 2L)^2 of a two-way pulse."""
    # Grouped as t * (c / 2L) so identity cases like t*c == 2L come out exact.
    kappa = (reading.travel_time * (reading.light_speed / (2.0 * reading.line_length))) ** 2
    if kappa < PERMITTIVITY_MIN:
        raise NonPhysical(f"permittivity {kappa:.6g} below the air/vacuum bound of 1")
    return kappa


def vwc_from_permittivity(epsilon: float) -> float:
    """Cubic permittivity->VWC calibration, unclamped.

    Near epsilon=1 (air) the polynomial is slightly negative; that is a real
    property of the calibration and is deliberately not clipped here.
    """
    if not (PERMITTIVITY_MIN <= epsilon <= PERMITTIVITY_MAX):
        raise OutOfRange(epsilon, PERMITTIVITY_MIN, PERMITTIVITY_MAX, "permittivity")
    a3, a2, a1, a0 = TOPP_COEFFS
    return ((a3 * epsilon + a2) * epsilon + a1) * epsilon + a0


def permittivity_from_vwc(theta: float, tol: float = 1e-10) -> float:
    """Invert the VWC calibration by bisection on [1, 80].

    The cubic is strictly increasing on this interval, so the root is unique.
    """
    lo_v = vwc_from_permittivity(PERMITTIVITY_MIN)
    hi_v = vwc_from_permittivity(PERMITTIVITY_MAX)
    if not (lo_v <= theta <= hi_v):
        raise OutOfRange(theta, lo_v, hi_v, "vwc")
    lo, hi = PERMITTIVITY_MIN, PERMITTIVITY_MAX
    mid = 0.5 * (lo + hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f = vwc_from_permittivity(mid)
        # The cubic is nearly flat around its inflection, so a small value
        # residual alone can leave a large root error; require a tight
        # bracket as well before stopping.
        if abs(f - theta) < tol and hi - lo < 1e-9:
            return mid
        if f < theta:
            lo = mid
        else:
            hi = mid
    return mid


@dataclass(frozen=True)
class RainEvent:
    start: float  # epoch seconds
    end: float
    depth_mm: float

    def __post_init__(self):
        if not self.start < self.end:
            raise ValueError("rain event must have start < end")
        if self.depth_mm < 0:
            raise ValueError("rain depth must be >= 0")


@dataclass(frozen=True)
class FcConfig:
    settle_seconds: float = 172800.0  # 48 h of gravity drainage
    slope_tol: float = 1e-8  # VWC per second, < 0.00086 VWC/day
    min_samples: int = 360  # ~12 h at 2-minute sampling


@dataclass(frozen=True)
class FieldCapacityEstimate:
    theta_fc: float
    window_start: float
    window_end: float
    n_samples: int
    dispersion: float  # std of VWC within the window


_THEIL_SEN_MAX_POINTS = 400
_START_GRID = 64


def _theil_sen_slope(t, v):
    """Median of pairwise slopes; decimated to a fixed grid for large windows."""
    n = len(t)
    if n > _THEIL_SEN_MAX_POINTS:
        idx = np.unique(np.linspace(0, n - 1, _THEIL_SEN_MAX_POINTS).astype(int))
        t = t[idx]
        v = v[idx]
        n = len(t)
    dt = t[:, None] - t[None, :]
    dv = v[:, None] - v[None, :]
    iu = np.triu_indices(n, k=1)
    return float(np.median(dv[iu] / dt[iu]))


def estimate_field_capacity(series, rains, cfg: FcConfig = FcConfig()) -> FieldCapacityEstimate:
    """Estimate field capacity from a (timestamp, VWC) series and rain events.

    Candidate windows open ``settle_seconds`` after each rain event ends and
    close at the next rain start (or the series end). Within each window the
    longest suffix whose Theil-Sen slope magnitude is below ``slope_tol`` and
    which holds at least ``min_samples`` points qualifies; the longest
    qualifying stretch overall supplies the median-VWC estimate.

    Zero-depth rain events are ignored, so padding the schedule with them
    cannot change the result.
    """
    series = [(float(t), float(v)) for t, v in series]
    if not series:
        raise NoQuiescentWindow("empty series")
    ts = np.array([t for t, _ in series])
    vwc = np.array([v for _, v in series])
    if np.any(np.diff(ts) <= 0):
        raise ValueError("series timestamps must be strictly increasing")

    events = sorted((e for e in rains if e.depth_mm > 0), key=lambda e: e.start)
    if not events:
        raise NoQuiescentWindow("no rain events with positive depth")

    best = None  # (n_samples, -window_start, indices)
    for i, event in enumerate(events):
        w_start = event.end + cfg.settle_seconds
        w_end = events[i + 1].start if i + 1 < len(events) else ts[-1] + 1.0
        idx = np.nonzero((ts >= w_start) & (ts < w_end))[0]
        if len(idx) < cfg.min_samples:
            continue
        n = len(idx)
        step = max(1, (n - cfg.min_samples) // _START_GRID)
        for si in range(0, n - cfg.min_samples + 1, step):
            sub = idx[si:]
            slope = _theil_sen_slope(ts[sub], vwc[sub])
            if abs(slope) < cfg.slope_tol:
                key = (len(sub), -ts[sub[0]])
                if best is None or key > best[0]:
                    best = (key, sub)
                break  # earliest qualifying start gives the longest suffix

    if best is None:
        raise NoQuiescentWindow(
            f"no post-rain window of >= {cfg.min_samples} samples with "
            f"|slope| < {cfg.slope_tol:g}"
        )
    sub = best[1]
    window = vwc[sub]
    return FieldCapacityEstimate(
        theta_fc=float(np.median(window)),
        window_start=float(ts[sub[0]]),
        window_end=float(ts[sub[-1]]),
        n_samples=len(sub),
        dispersion=float(np.std(window)),
    )
