"""Sensor dataset handling: CSV ingestion, feature selection, standardization,
k-fold partitioning and sensor-cost accounting.

CSV format
----------
Header (exact): ``timestamp,ds18s20_temp_c,sht10_temp_c,sht10_humidity_pct,yl69_raw,sen13322_raw,vwc_true``
``timestamp`` is integer epoch seconds; every other field is a decimal number.
Only ``vwc_true`` may be empty. Values are printed at 9 significant digits,
UTF-8, LF line endings.
"""

from __future__ import annotations

import enum
import io
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadK,
    EmptyMatrix,
    MalformedRow,
    MissingTarget,
    NonMonotoneTimestamp,
    RangeViolation,
    UnknownColumn,
)


class SensorChannel(enum.Enum):
    """The five low-cost input channels, in canonical column order."""

    DS18S20_TEMP_C = "ds18s20_temp_c"
    SHT10_TEMP_C = "sht10_temp_c"
    SHT10_HUMIDITY_PCT = "sht10_humidity_pct"
    YL69_RAW = "yl69_raw"
    SEN13322_RAW = "sen13322_raw"


CHANNEL_ORDER = tuple(SensorChannel)

# Physical device behind each channel; the SHT10 exposes two channels but is
# bought (and priced) once.
_CHANNEL_DEVICE = {
    SensorChannel.DS18S20_TEMP_C: "DS18S20",
    SensorChannel.SHT10_TEMP_C: "SHT10",
    SensorChannel.SHT10_HUMIDITY_PCT: "SHT10",
    SensorChannel.YL69_RAW: "YL69",
    SensorChannel.SEN13322_RAW: "SEN13322",
}

# Unit prices in euro cents; integer arithmetic keeps sums exact.
_DEVICE_PRICE_CENTS = {
    "DS18S20": 1550,
    "SHT10": 5400,
    "YL69": 130,
    "SEN13322": 490,
}

CSV_HEADER = "timestamp," + ",".join(c.value for c in CHANNEL_ORDER) + ",vwc_true"

# Per-column closed value ranges (None bound = unconstrained).
_RANGES = {
    SensorChannel.SHT10_HUMIDITY_PCT: (0.0, 100.0),
    SensorChannel.YL69_RAW: (0.0, 1023.0),
    SensorChannel.SEN13322_RAW: (0.0, 1023.0),
}


@dataclass(frozen=True)
class SensorRecord:
    timestamp: int
    values: tuple  # one float per channel, canonical order
    vwc_true: float | None = None

    def value(self, channel: SensorChannel) -> float:
        return self.values[CHANNEL_ORDER.index(channel)]


@dataclass(frozen=True)
class Dataset:
    records: tuple
    source: str = ""
    interval_seconds: int | None = None

    def __len__(self):
        return len(self.records)

    @property
    def timestamps(self):
        return np.array([r.timestamp for r in self.records], dtype=np.int64)

    @property
    def vwc_true(self):
        return np.array(
            [np.nan if r.vwc_true is None else r.vwc_true for r in self.records]
        )


@dataclass(frozen=True)
class FeatureSet:
    """Nonempty, duplicate-free channel subset; iterates in canonical order."""

    channels: tuple

    def __post_init__(self):
        chans = tuple(c for c in CHANNEL_ORDER if c in set(self.channels))
        if not chans:
            raise ValueError("feature set must be nonempty")
        if len(set(self.channels)) != len(tuple(self.channels)):
            raise ValueError("duplicate channels in feature set")
        object.__setattr__(self, "channels", chans)

    @classmethod
    def all(cls):
        return cls(CHANNEL_ORDER)

    @classmethod
    def from_names(cls, names):
        if isinstance(names, str):
            names = [t.strip() for t in names.split(",") if t.strip()]
        by_name = {c.value: c for c in CHANNEL_ORDER}
        chans = []
        for name in names:
            if name not in by_name:
                raise UnknownColumn(name)
            chans.append(by_name[name])
        return cls(tuple(chans))

    def names(self):
        return [c.value for c in self.channels]

    def __len__(self):
        return len(self.channels)

    def __contains__(self, channel):
        return channel in self.channels


def sensor_cost(fs: FeatureSet) -> float:
    """Total price in euros of the distinct physical sensors covering fs."""
    devices = {_CHANNEL_DEVICE[c] for c in fs.channels}
    cents = sum(_DEVICE_PRICE_CENTS[d] for d in sorted(devices))
    return cents / 100.0


def _parse_float(token, column, line_number):
    try:
        return float(token)
    except ValueError:
        raise MalformedRow(line_number, f"bad number {token!r} in {column}") from None


def parse_csv(text) -> Dataset:
    """Parse the dataset CSV format; accepts a string or a text stream."""
    if hasattr(text, "read"):
        text = text.read()
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise MalformedRow(1, "empty input")
    header = lines[0].rstrip("\r")
    expected = CSV_HEADER.split(",")
    got = header.split(",")
    for name in got:
        if name not in expected:
            raise UnknownColumn(name)
    if got != expected:
        raise MalformedRow(1, f"header must be exactly {CSV_HEADER!r}")

    records = []
    prev_ts = None
    for line_no, line in enumerate(lines[1:], start=2):
        line = line.rstrip("\r")
        if line == "":
            raise MalformedRow(line_no, "blank line")
        tokens = line.split(",")
        if len(tokens) != len(expected):
            raise MalformedRow(line_no, f"expected {len(expected)} fields, got {len(tokens)}")
        try:
            ts = int(tokens[0])
        except ValueError:
            raise MalformedRow(line_no, f"bad timestamp {tokens[0]!r}") from None
        if prev_ts is not None and ts <= prev_ts:
            raise NonMonotoneTimestamp(line_no)
        prev_ts = ts
        values = []
        for channel, token in zip(CHANNEL_ORDER, tokens[1:6]):
            if token == "":
                raise MalformedRow(line_no, f"empty {channel.value}")
            v = _parse_float(token, channel.value, line_no)
            bounds = _RANGES.get(channel)
            if bounds is not None and not (bounds[0] <= v <= bounds[1]):
                raise RangeViolation(channel.value, v)
            values.append(v)
        vwc_tok = tokens[6]
        vwc = None
        if vwc_tok != "":
            vwc = _parse_float(vwc_tok, "vwc_true", line_no)
            if not (0.0 <= vwc <= 1.0):
                raise RangeViolation("vwc_true", vwc)
        records.append(SensorRecord(ts, tuple(values), vwc))

    interval = None
    if len(records) >= 2:
        interval = records[1].timestamp - records[0].timestamp
    return Dataset(tuple(records), interval_seconds=interval)


def format_value(x: float) -> str:
    """Render a value at 9 significant digits (round-trip contract)."""
    return format(float(x), ".9g")


def write_csv(ds: Dataset) -> str:
    out = io.StringIO()
    out.write(CSV_HEADER + "\n")
    for r in ds.records:
        fields = [str(int(r.timestamp))]
        fields += [format_value(v) for v in r.values]
        fields.append("" if r.vwc_true is None else format_value(r.vwc_true))
        out.write(",".join(fields) + "\n")
    return out.getvalue()


def select_features(ds: Dataset, fs: FeatureSet):
    """Extract the (rows x |fs|) feature matrix and the vwc_true target vector.

    Columns follow the canonical channel order restricted to fs. Every record
    must carry a target.
    """
    for i, r in enumerate(ds.records):
        if r.vwc_true is None:
            raise MissingTarget(i)
    cols = [CHANNEL_ORDER.index(c) for c in fs.channels]
    X = np.array([[r.values[j] for j in cols] for r in ds.records], dtype=float)
    y = np.array([r.vwc_true for r in ds.records], dtype=float)
    return X, y


def feature_matrix(ds: Dataset, fs: FeatureSet):
    """Feature matrix only; does not require targets."""
    cols = [CHANNEL_ORDER.index(c) for c in fs.channels]
    return np.array([[r.values[j] for j in cols] for r in ds.records], dtype=float)


@dataclass(frozen=True)
class Standardizer:
    mean: np.ndarray
    std: np.ndarray  # population std; constant columns clamped to 1

    def apply(self, X):
        X = np.asarray(X, dtype=float)
        return (X - self.mean) / self.std

    def invert(self, Z):
        Z = np.asarray(Z, dtype=float)
        return Z * self.std + self.mean


def standardize_fit(X) -> Standardizer:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2:
        raise EmptyMatrix("standardize_fit needs a 2-D matrix with >= 2 rows")
    mean = X.mean(axis=0)
    std = X.std(axis=0)  # population convention (divide by n)
    std = np.where(std == 0.0, 1.0, std)
    return Standardizer(mean=mean, std=std)


def standardize_apply(s: Standardizer, X):
    return s.apply(X)


def standardize_invert(s: Standardizer, Z):
    return s.invert(Z)


@dataclass(frozen=True)
class FoldPlan:
    k: int
    assignment: np.ndarray  # fold index per record index
    mode: str  # "contiguous" or "shuffled"
    seed: int | None = None

    @property
    def n(self):
        return len(self.assignment)

    def fold_indices(self, fold):
        return np.nonzero(self.assignment == fold)[0]


def kfold_split(n: int, k: int, mode: str = "contiguous", seed: int | None = None) -> FoldPlan:
    """Partition n record indices into k folds with sizes differing by <= 1.

    Contiguous mode assigns consecutive index blocks (the default: the data is
    a time series and blocks avoid temporal leakage). Shuffled mode permutes
    indices with the given seed first.
    """
    if not (2 <= k <= n):
        raise BadK(k, n)
    base, extra = divmod(n, k)
    sizes = [base + 1 if f < extra else base for f in range(k)]
    assignment = np.empty(n, dtype=np.int64)
    pos = 0
    order = np.arange(n)
    if mode == "shuffled":
        rng = np.random.default_rng(seed)
        order = rng.permutation(n)
    elif mode != "contiguous":
        raise ValueError(f"unknown fold mode {mode!r}")
    for f, size in enumerate(sizes):
        assignment[order[pos : pos + size]] = f
        pos += size
    return FoldPlan(k=k, assignment=assignment, mode=mode, seed=seed)
