"""Command-line surface: simulate | train | predict | crossval | fieldcap | compare.

Exit codes are a stable contract: 0 success, 2 configuration/input error,
3 I/O error, 4 training failure, 5 estimation failure. Every command is
deterministic given its configuration and seeds.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from dataclasses import dataclass

import numpy as np

from . import dataset as ds_mod
from .config import load_run_config
from .dataset import (
    CHANNEL_ORDER,
    Dataset,
    FeatureSet,
    feature_matrix,
    format_value,
    kfold_split,
    parse_csv,
    select_features,
    sensor_cost,
    write_csv,
)
from .errors import (
    ConfigError,
    DataError,
    NoQuiescentWindow,
    NotConverged,
    SoilVwcError,
    TrainingError,
)
from .metrics import EvaluationReport
from .models import cross_validate, fit_regressor, load_model, predict, save_model
from .simulate import default_paper_like_schedule, simulate_dataset, truth_sidecar
from .soilphys import estimate_field_capacity

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_TRAINING = 4
EXIT_ESTIMATION = 5

FAMILY_LABELS = {
    "svr": "Support Vector Regression (SVR)",
    "rf": "Random Forests Algorithm",
    "gbr": "Gradient Boosting Regression",
    "mlp": "Artificial Neural Network (ANN)",
}

DEFAULT_SUITE = (
    "svr;all",
    "rf;all",
    "gbr;all",
    "mlp;all",
    "mlp;sht10_temp_c,sht10_humidity_pct,yl69_raw,sen13322_raw",
    "mlp;yl69_raw,sen13322_raw",
)


def _echo(args, text=""):
    if not args.quiet:
        print(text)


def _config_echo(config) -> str:
    pairs = dataclasses.asdict(config)
    return " ".join(f"{k}={v}" for k, v in pairs.items())


def _load_dataset(path) -> Dataset:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_csv(fh.read())


def _feature_set(args, model=None) -> FeatureSet:
    if model is not None and model.features:
        return FeatureSet.from_names(list(model.features))
    names = getattr(args, "features", None)
    if not names or names == "all":
        return FeatureSet.all()
    return FeatureSet.from_names(names)


def _rain_events(cfg):
    sched = cfg.rain_schedule()
    if sched is None:
        sched = default_paper_like_schedule()
    return sched.events


def cmd_simulate(cfg, args) -> int:
    sim = cfg.sim_config()
    data = simulate_dataset(sim)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(write_csv(data))
    with open(args.out + ".truth", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(truth_sidecar(sim))
    _echo(args, f"rows={len(data)}")
    _echo(args, f"rain_events={len(sim.rain_events())}")
    _echo(args, f"theta_fc={format_value(sim.soil.theta_fc)}")
    _echo(args, f"wrote {args.out} and {args.out}.truth")
    return EXIT_OK


def cmd_train(cfg, args) -> int:
    data = _load_dataset(args.data)
    fs = _feature_set(args)
    X, y = select_features(data, fs)
    spec = cfg.regressor_spec(args.model)
    try:
        model = fit_regressor(spec, X, y, features=fs.names())
    except NotConverged as exc:
        if not args.allow_partial:
            raise
        model = exc.model
        _echo(args, f"warning: accepted partial fit (KKT violation {exc.violation:.3e})")
    if args.out:
        save_model(model, args.out)
    report = EvaluationReport.from_pairs(y, predict(model, X))
    _echo(args, f"model={args.model} features={','.join(fs.names())}")
    _echo(args, f"config: {_config_echo(spec.config)}")
    _echo(args, f"sensor_cost_eur={sensor_cost(fs)}")
    for line in report.to_lines("train"):
        _echo(args, line)
    if args.out:
        _echo(args, f"wrote {args.out}")
    return EXIT_OK


def cmd_predict(cfg, args) -> int:
    model = load_model(args.model_file)
    if not model.features:
        raise ConfigError("model container does not record its feature set")
    data = _load_dataset(args.data)
    fs = _feature_set(args, model)
    X = feature_matrix(data, fs)
    preds = predict(model, X)
    lines = ["timestamp,predicted_vwc"]
    for rec, p in zip(data.records, preds):
        lines.append(f"{rec.timestamp},{format_value(p)}")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        _echo(args, f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_crossval(cfg, args) -> int:
    data = _load_dataset(args.data)
    fs = _feature_set(args)
    X, y = select_features(data, fs)
    folds = args.folds if args.folds else cfg.get("cv.folds")
    plan = kfold_split(len(y), folds, mode=cfg.get("cv.mode"), seed=cfg.get("cv.seed"))
    spec = cfg.regressor_spec(args.model)
    result = cross_validate(spec, X, y, plan)

    _echo(args, f"model={args.model} features={','.join(fs.names())} folds={folds}")
    _echo(args, f"config: {_config_echo(spec.config)}")
    _echo(args, f"sensor_cost_eur={sensor_cost(fs)}")
    _echo(args, f"{'fold':>6} {'n':>6} {'rmse':>12} {'mae':>12} {'pearson_r':>12}")
    for i, rep in enumerate(result.fold_reports):
        _echo(args, f"{i:>6} {rep.n:>6} {rep.rmse:>12.8f} {rep.mae:>12.8f} {rep.format_r():>12}")
    p = result.pooled
    _echo(args, f"{'pooled':>6} {p.n:>6} {p.rmse:>12.8f} {p.mae:>12.8f} {p.format_r():>12}")
    print(f"crossval.sensor_cost_eur={sensor_cost(fs)}")
    for i, rep in enumerate(result.fold_reports):
        for line in rep.to_lines(f"crossval.fold{i}"):
            print(line)
    for line in p.to_lines("crossval.pooled"):
        print(line)
    if args.pred_out:
        lines = ["timestamp,actual,predicted"]
        for rec, a, pr in zip(data.records, y, result.predictions):
            lines.append(f"{rec.timestamp},{format_value(a)},{format_value(pr)}")
        with open(args.pred_out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
        _echo(args, f"wrote {args.pred_out}")
    return EXIT_OK


def _vwc_series(cfg, args, data: Dataset):
    """(timestamps, vwc) either from the truth column or model predictions."""
    if args.model_file:
        model = load_model(args.model_file)
        if not model.features:
            raise ConfigError("model container does not record its feature set")
        fs = _feature_set(args, model)
        vwc = predict(model, feature_matrix(data, fs))
    else:
        vwc = data.vwc_true
        if np.isnan(vwc).any():
            raise DataError("dataset has missing vwc_true values; supply --model-file")
    return data.timestamps, np.asarray(vwc, dtype=float)


def cmd_fieldcap(cfg, args) -> int:
    data = _load_dataset(args.data)
    ts, vwc = _vwc_series(cfg, args, data)
    est = estimate_field_capacity(list(zip(ts, vwc)), _rain_events(cfg), cfg.fc_config())
    _echo(args, f"theta_fc={est.theta_fc:.8f}")
    _echo(args, f"window=[{est.window_start:.0f}, {est.window_end:.0f}]")
    _echo(args, f"n_samples={est.n_samples}")
    _echo(args, f"dispersion={est.dispersion:.8f}")
    print(f"fieldcap.theta_fc={est.theta_fc:.8f}")
    print(f"fieldcap.window_start={est.window_start:.0f}")
    print(f"fieldcap.window_end={est.window_end:.0f}")
    print(f"fieldcap.n_samples={est.n_samples}")
    print(f"fieldcap.dispersion={est.dispersion:.8f}")
    return EXIT_OK


@dataclass
class ComparisonRow:
    label: str
    feature_set: FeatureSet
    cost: float
    report: EvaluationReport | None
    fc_actual: str
    fc_estimated: str
    error: str | None = None


def _parse_suite(text):
    rows = []
    for line_no, line in enumerate(text.split("\n"), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if ";" not in line:
            raise ConfigError(f"suite line {line_no}: expected 'algorithm;feature,list'")
        family, _, feats = line.partition(";")
        family = family.strip()
        if family not in FAMILY_LABELS:
            raise ConfigError(f"suite line {line_no}: unknown algorithm {family!r}")
        rows.append((family, feats.strip()))
    if not rows:
        raise ConfigError("suite file lists no rows")
    return rows


def _truth_theta_fc(data_path):
    try:
        with open(data_path + ".truth", "r", encoding="utf-8") as fh:
            for line in fh:
                key, _, value = line.strip().partition("=")
                if key == "theta_fc":
                    return float(value)
    except OSError:
        return None
    return None


def cmd_compare(cfg, args) -> int:
    data = _load_dataset(args.data)
    if args.suite:
        with open(args.suite, "r", encoding="utf-8") as fh:
            suite = _parse_suite(fh.read())
    else:
        suite = _parse_suite("\n".join(DEFAULT_SUITE))

    folds = cfg.get("cv.folds")
    fc_cfg = cfg.fc_config()
    rains = _rain_events(cfg)
    dispersion_max = cfg.get("compare.dispersion_max")
    ts = data.timestamps

    truth_fc = _truth_theta_fc(args.data)
    if truth_fc is not None:
        fc_actual = f"{100.0 * truth_fc:.1f}%"
    else:
        try:
            est = estimate_field_capacity(
                list(zip(ts, data.vwc_true)), rains, fc_cfg
            )
            fc_actual = f"{100.0 * est.theta_fc:.1f}%"
        except SoilVwcError:
            fc_actual = "n/a"

    rows = []
    tidy = ["label,timestamp,actual,predicted"]
    for family, feats in suite:
        label = FAMILY_LABELS[family]
        fs = FeatureSet.all() if feats == "all" else FeatureSet.from_names(feats)
        cost = sensor_cost(fs)
        try:
            X, y = select_features(data, fs)
            plan = kfold_split(len(y), folds, mode=cfg.get("cv.mode"), seed=cfg.get("cv.seed"))
            result = cross_validate(cfg.regressor_spec(family), X, y, plan)
            try:
                est = estimate_field_capacity(
                    list(zip(ts, result.predictions)), rains, fc_cfg
                )
                if est.dispersion > dispersion_max:
                    fc_est = "Not Possible"
                else:
                    fc_est = f"{100.0 * est.theta_fc:.1f}%"
            except NoQuiescentWindow:
                fc_est = "Not Possible"
            rows.append(ComparisonRow(label, fs, cost, result.pooled, fc_actual, fc_est))
            tag = f"{family}:{','.join(fs.names())}"
            for t, a, p in zip(ts, y, result.predictions):
                tidy.append(f"{tag},{t},{format_value(a)},{format_value(p)}")
        except SoilVwcError as exc:
            rows.append(
                ComparisonRow(label, fs, cost, None, fc_actual, "", error=str(exc))
            )

    flag_names = [c.value for c in CHANNEL_ORDER]
    header = (
        f"{'algorithm':<36} " + " ".join(f"{n[:8]:>8}" for n in flag_names)
        + f" {'cost_eur':>8} {'rmse':>12} {'mae':>12} {'pearson_r':>12} {'fc_actual/est':>18}"
    )
    _echo(args, header)
    for row in rows:
        flags = " ".join(f"{'+' if c in row.feature_set else '-':>8}" for c in CHANNEL_ORDER)
        if row.error is not None:
            _echo(args, f"{row.label:<36} {flags} {row.cost:>8} failed: {row.error}")
            continue
        rep = row.report
        _echo(
            args,
            f"{row.label:<36} {flags} {row.cost:>8} {rep.rmse:>12.8f} {rep.mae:>12.8f}"
            f" {rep.format_r():>12} {row.fc_actual + ' / ' + row.fc_estimated:>18}",
        )
    for i, row in enumerate(rows):
        prefix = f"compare.row{i}"
        print(f"{prefix}.algorithm={row.label}")
        print(f"{prefix}.features={','.join(row.feature_set.names())}")
        print(f"{prefix}.cost_eur={row.cost}")
        if row.error is not None:
            print(f"{prefix}.failed={row.error}")
            continue
        for line in row.report.to_lines(prefix):
            print(line)
        print(f"{prefix}.fc_actual={row.fc_actual}")
        print(f"{prefix}.fc_estimated={row.fc_estimated}")

    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(tidy) + "\n")
        _echo(args, f"wrote {args.out}")
    if args.plot_script:
        with open(args.plot_script, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(_plot_script(args.out or "predictions.csv"))
        _echo(args, f"wrote {args.plot_script}")

    if all(row.error is not None for row in rows):
        return EXIT_TRAINING
    return EXIT_OK


def _plot_script(tidy_path):
    return f'''"""Plot actual vs predicted VWC for every compared configuration."""
import matplotlib.pyplot as plt
import pandas as pd

df = pd.read_csv({tidy_path!r})
for label, group in df.groupby("label"):
    fig, ax = plt.subplots(figsize=(10, 4))
    ax.plot(group["timestamp"], group["actual"], label="actual")
    ax.plot(group["timestamp"], group["predicted"], label="predicted", alpha=0.7)
    ax.set_title(label)
    ax.set_xlabel("time (s)")
    ax.set_ylabel("VWC")
    ax.legend()
    fig.tight_layout()
plt.show()
'''


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="configuration file (section.key = value lines)")
    common.add_argument(
        "--set", dest="overrides", action="append", default=[], metavar="K=V",
        help="override a configuration key (repeatable)",
    )
    common.add_argument("--seed", type=int, help="override sim/train/cv seeds at once")
    common.add_argument("--quiet", action="store_true", help="suppress human-readable output")

    parser = argparse.ArgumentParser(prog="soilvwc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="generate a synthetic dataset")
    p.add_argument("--out", required=True, help="output CSV path (truth sidecar: <out>.truth)")

    p = sub.add_parser("train", parents=[common], help="fit one model on a full dataset")
    p.add_argument("--data", required=True)
    p.add_argument("--model", required=True, choices=sorted(FAMILY_LABELS))
    p.add_argument("--features", default="all", help="comma-separated channel names or 'all'")
    p.add_argument("--out", help="model container output path")
    p.add_argument("--allow-partial", action="store_true",
                   help="accept an SVR fit that hit its iteration budget")

    p = sub.add_parser("predict", parents=[common], help="predict VWC with a saved model")
    p.add_argument("--data", required=True)
    p.add_argument("--model-file", required=True)
    p.add_argument("--out", help="output CSV (default: stdout)")

    p = sub.add_parser("crossval", parents=[common], help="k-fold cross validation")
    p.add_argument("--data", required=True)
    p.add_argument("--model", required=True, choices=sorted(FAMILY_LABELS))
    p.add_argument("--features", default="all")
    p.add_argument("--folds", type=int, default=0, help="fold count (default: cv.folds)")
    p.add_argument("--pred-out", help="write per-record held-out predictions CSV")

    p = sub.add_parser("fieldcap", parents=[common], help="estimate field capacity")
    p.add_argument("--data", required=True)
    p.add_argument("--model-file", help="predict VWC from sensors instead of vwc_true")

    p = sub.add_parser("compare", parents=[common], help="run a comparison suite")
    p.add_argument("--data", required=True)
    p.add_argument("--suite", help="suite file: one 'algorithm;feature,list' per line")
    p.add_argument("--out", help="tidy predictions CSV for plotting")
    p.add_argument("--plot-script", help="write a matplotlib plotting script")

    return parser


_COMMANDS = {
    "simulate": cmd_simulate,
    "train": cmd_train,
    "predict": cmd_predict,
    "crossval": cmd_crossval,
    "fieldcap": cmd_fieldcap,
    "compare": cmd_compare,
}


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = load_run_config(args.config, args.overrides, args.seed)
    return _COMMANDS[args.command](cfg, args)


def main(argv=None) -> int:
    try:
        return run(argv)
    except (ConfigError, DataError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NoQuiescentWindow as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ESTIMATION
    except TrainingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TRAINING
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
