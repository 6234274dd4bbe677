import numpy as np
import pytest

from soilvwc.cli import main
from soilvwc.dataset import FeatureSet, kfold_split, parse_csv, select_features
from soilvwc.metrics import EvaluationReport
from soilvwc.models import RegressorSpec, cross_validate
from soilvwc.config import load_run_config

FAST_MLP = [
    "--set", "mlp.hidden_layers=2",
    "--set", "mlp.hidden_width=8",
    "--set", "mlp.epochs=10",
    "--set", "mlp.batch_size=64",
]


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture(scope="module")
def sim_csv(tmp_path_factory):
    """A small simulated dataset shared by the training-side tests."""
    path = tmp_path_factory.mktemp("data") / "sim.csv"
    code = main(["simulate", "--out", str(path),
                 "--set", "sim.duration_days=1.0", "--quiet"])
    assert code == 0
    return str(path)


class TestSimulate:
    def test_default_row_count(self, tmp_path, capsys):
        out = tmp_path / "full.csv"
        code, stdout, _ = run_cli(capsys, "simulate", "--out", str(out))
        assert code == 0
        assert "rows=7920" in stdout
        assert "theta_fc=0.055" in stdout
        text = out.read_text()
        assert text.count("\n") == 7921  # header + rows
        assert (tmp_path / "full.csv.truth").exists()

    def test_paper_row_count(self, tmp_path, capsys):
        out = tmp_path / "paper.csv"
        code, stdout, _ = run_cli(
            capsys, "simulate", "--out", str(out),
            "--set", "sim.duration_days=10.086111")
        assert code == 0
        assert "rows=7262" in stdout

    def test_same_seed_byte_identical(self, tmp_path, capsys):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        for out in (a, b):
            code, _, _ = run_cli(capsys, "simulate", "--out", str(out),
                                 "--seed", "5", "--set", "sim.duration_days=1.0")
            assert code == 0
        assert a.read_bytes() == b.read_bytes()
        assert (tmp_path / "a.csv.truth").read_bytes() == \
            (tmp_path / "b.csv.truth").read_bytes()

    def test_unknown_config_key(self, tmp_path, capsys):
        code, _, err = run_cli(capsys, "simulate", "--out", str(tmp_path / "x.csv"),
                               "--set", "sim.bogus=1")
        assert code == 2
        assert "sim.bogus" in err

    def test_unwritable_path(self, capsys):
        code, _, err = run_cli(capsys, "simulate",
                               "--out", "/nonexistent-dir/x.csv",
                               "--set", "sim.duration_days=1.0")
        assert code == 3


class TestTrain:
    def test_train_and_save(self, sim_csv, tmp_path, capsys):
        out = tmp_path / "model.json"
        code, stdout, _ = run_cli(
            capsys, "train", "--data", sim_csv, "--model", "gbr",
            "--features", "yl69_raw,sen13322_raw", "--out", str(out))
        assert code == 0
        assert out.exists()
        assert "sensor_cost_eur=6.2" in stdout
        assert "train.rmse=" in stdout

    def test_rf_config_echoed(self, sim_csv, capsys):
        code, stdout, _ = run_cli(capsys, "train", "--data", sim_csv, "--model", "rf")
        assert code == 0
        assert "n_estimators=24" in stdout
        assert "max_leaf_nodes=30" in stdout
        assert "max_depth=7" in stdout

    def test_unknown_feature_token(self, sim_csv, capsys):
        code, _, err = run_cli(capsys, "train", "--data", sim_csv,
                               "--model", "gbr", "--features", "yl69_raw,sht99")
        assert code == 2
        assert "sht99" in err

    def test_svr_budget_exhausted(self, sim_csv, capsys):
        argv = ["train", "--data", sim_csv, "--model", "svr",
                "--set", "svr.max_passes=1", "--set", "svr.kkt_tol=1e-10"]
        code, _, err = run_cli(capsys, *argv)
        assert code == 4
        assert "KKT" in err or "converge" in err
        code, stdout, _ = run_cli(capsys, *argv, "--allow-partial")
        assert code == 0
        assert "partial" in stdout

    def test_missing_data_file(self, capsys):
        code, _, _ = run_cli(capsys, "train", "--data", "/no/such.csv",
                             "--model", "gbr")
        assert code == 3


class TestPredict:
    def test_roundtrip(self, sim_csv, tmp_path, capsys):
        model_path = tmp_path / "m.json"
        pred_path = tmp_path / "pred.csv"
        code, _, _ = run_cli(capsys, "train", "--data", sim_csv, "--model", "gbr",
                             "--features", "yl69_raw,sen13322_raw",
                             "--out", str(model_path), "--quiet")
        assert code == 0
        code, _, _ = run_cli(capsys, "predict", "--data", sim_csv,
                             "--model-file", str(model_path),
                             "--out", str(pred_path))
        assert code == 0
        lines = pred_path.read_text().strip().split("\n")
        assert lines[0] == "timestamp,predicted_vwc"
        assert len(lines) == 721  # header + 1 day at 120 s

    def test_stdout_when_no_out(self, sim_csv, tmp_path, capsys):
        model_path = tmp_path / "m.json"
        run_cli(capsys, "train", "--data", sim_csv, "--model", "gbr",
                "--out", str(model_path), "--quiet")
        code, stdout, _ = run_cli(capsys, "predict", "--data", sim_csv,
                                  "--model-file", str(model_path))
        assert code == 0
        assert stdout.startswith("timestamp,predicted_vwc")


class TestCrossval:
    def test_report_matches_library(self, sim_csv, tmp_path, capsys):
        pred_out = tmp_path / "preds.csv"
        code, stdout, _ = run_cli(
            capsys, "crossval", "--data", sim_csv, "--model", "gbr",
            "--features", "yl69_raw,sen13322_raw",
            "--pred-out", str(pred_out))
        assert code == 0

        data = parse_csv(open(sim_csv).read())
        X, y = select_features(data, FeatureSet.from_names("yl69_raw,sen13322_raw"))
        cfg = load_run_config()
        result = cross_validate(cfg.regressor_spec("gbr"), X, y,
                                kfold_split(len(y), 5))
        pooled = result.pooled
        assert f"crossval.pooled.rmse={pooled.rmse:.8f}" in stdout
        assert f"crossval.pooled.mae={pooled.mae:.8f}" in stdout
        assert f"crossval.pooled.pearson_r={pooled.format_r()}" in stdout

        # emitted per-record predictions reproduce the pooled report
        rows = pred_out.read_text().strip().split("\n")[1:]
        actual = np.array([float(r.split(",")[1]) for r in rows])
        predicted = np.array([float(r.split(",")[2]) for r in rows])
        rep = EvaluationReport.from_pairs(actual, predicted)
        assert rep.rmse == pytest.approx(pooled.rmse, abs=5e-9)
        assert rep.mae == pytest.approx(pooled.mae, abs=5e-9)
        assert rep.pearson_r == pytest.approx(pooled.pearson_r, abs=5e-7)

    def test_fold_sizes_for_paper_count(self, capsys):
        plan = kfold_split(7262, 5)
        sizes = sorted((len(plan.fold_indices(f)) for f in range(5)), reverse=True)
        assert sizes == [1453, 1453, 1452, 1452, 1452]

    def test_identical_bytes_across_runs(self, sim_csv, capsys):
        argv = ["crossval", "--data", sim_csv, "--model", "rf", "--folds", "3"]
        code1, out1, _ = run_cli(capsys, *argv)
        code2, out2, _ = run_cli(capsys, *argv)
        assert code1 == code2 == 0
        assert out1 == out2

    def test_bad_fold_count(self, sim_csv, capsys):
        code, _, _ = run_cli(capsys, "crossval", "--data", sim_csv,
                             "--model", "gbr", "--folds", "100000")
        assert code == 2


class TestFieldcap:
    def test_truth_column_default_config(self, tmp_path, capsys):
        data = tmp_path / "full.csv"
        run_cli(capsys, "simulate", "--out", str(data), "--quiet")
        code, stdout, _ = run_cli(capsys, "fieldcap", "--data", str(data))
        assert code == 0
        line = [l for l in stdout.split("\n") if l.startswith("fieldcap.theta_fc=")][0]
        theta = float(line.split("=")[1])
        assert theta == pytest.approx(0.055, rel=0, abs=0.002)

    def test_all_rain_exits_5(self, tmp_path, capsys):
        data = tmp_path / "wet.csv"
        sched = "0:260000:5"
        run_cli(capsys, "simulate", "--out", str(data),
                "--set", "sim.duration_days=3.0",
                "--set", f"rain.schedule={sched}", "--quiet")
        code, _, err = run_cli(capsys, "fieldcap", "--data", str(data),
                               "--set", f"rain.schedule={sched}")
        assert code == 5

    def test_model_based_estimate(self, tmp_path, capsys):
        data = tmp_path / "full.csv"
        run_cli(capsys, "simulate", "--out", str(data), "--quiet")
        model_path = tmp_path / "m.json"
        run_cli(capsys, "train", "--data", str(data), "--model", "gbr",
                "--features", "yl69_raw,sen13322_raw",
                "--out", str(model_path), "--quiet")
        code, stdout, _ = run_cli(capsys, "fieldcap", "--data", str(data),
                                  "--model-file", str(model_path))
        assert code == 0
        line = [l for l in stdout.split("\n") if l.startswith("fieldcap.theta_fc=")][0]
        assert float(line.split("=")[1]) == pytest.approx(0.055, rel=0, abs=0.01)


class TestCompare:
    def test_custom_suite(self, sim_csv, tmp_path, capsys):
        suite = tmp_path / "suite.txt"
        suite.write_text("gbr;yl69_raw,sen13322_raw\nrf;all\n")
        tidy = tmp_path / "tidy.csv"
        plot = tmp_path / "plot.py"
        code, stdout, _ = run_cli(
            capsys, "compare", "--data", sim_csv, "--suite", str(suite),
            "--out", str(tidy), "--plot-script", str(plot))
        assert code == 0
        assert "compare.row0.cost_eur=6.2" in stdout
        assert "compare.row1.cost_eur=75.7" in stdout
        assert "compare.row0.rmse=" in stdout
        assert tidy.read_text().startswith("label,timestamp,actual,predicted")
        assert "matplotlib" in plot.read_text()

    def test_default_suite_structure_and_costs(self, sim_csv, capsys):
        code, stdout, _ = run_cli(
            capsys, "compare", "--data", sim_csv, "--quiet", *FAST_MLP,
            "--set", "svr.kkt_tol=0.01")
        assert code == 0
        for i in range(6):
            assert f"compare.row{i}.algorithm=" in stdout
        assert "compare.row3.cost_eur=75.7" in stdout
        assert "compare.row4.cost_eur=60.2" in stdout
        assert "compare.row5.cost_eur=6.2" in stdout

    def test_empty_suite(self, sim_csv, tmp_path, capsys):
        suite = tmp_path / "empty.txt"
        suite.write_text("# nothing here\n")
        code, _, _ = run_cli(capsys, "compare", "--data", sim_csv,
                             "--suite", str(suite))
        assert code == 2

    def test_unknown_algorithm_in_suite(self, sim_csv, tmp_path, capsys):
        suite = tmp_path / "bad.txt"
        suite.write_text("ridge;all\n")
        code, _, err = run_cli(capsys, "compare", "--data", sim_csv,
                               "--suite", str(suite))
        assert code == 2
        assert "ridge" in err
