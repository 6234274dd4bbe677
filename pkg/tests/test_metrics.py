import math

import numpy as np
import pytest

from _oracles import mae_fsum, pearson_fsum, rmse_fsum
from soilvwc.errors import EmptyInput, LengthMismatch
from soilvwc.metrics import EvaluationReport, mae, pearson_r, rmse


class TestRmse:
    def test_identity(self):
        assert rmse([0.1, 0.2, 0.3], [0.1, 0.2, 0.3]) == 0.0

    def test_hand_example(self):
        value = rmse([0.05, 0.06, 0.07], [0.06, 0.06, 0.06])
        assert value == pytest.approx(0.008164965809277261, rel=0, abs=1e-15)
        assert f"{value:.7f}" == "0.0081650"

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            rmse([1.0, 2.0], [1.0])

    def test_empty(self):
        with pytest.raises(EmptyInput):
            rmse([], [])


class TestMae:
    def test_identity(self):
        assert mae([0.1, 0.2], [0.1, 0.2]) == 0.0

    def test_hand_example(self):
        value = mae([0.05, 0.06, 0.07], [0.06, 0.06, 0.06])
        assert value == pytest.approx(0.02 / 3.0, rel=0, abs=1e-15)
        assert f"{value:.7f}" == "0.0066667"


class TestPearson:
    def test_positive_affine(self):
        x = np.linspace(0.0, 1.0, 50)
        assert pearson_r(x, 2.0 * x + 3.0) == pytest.approx(1.0, rel=0, abs=1e-12)

    def test_negative_affine(self):
        x = np.linspace(0.0, 1.0, 50)
        assert pearson_r(x, -0.5 * x + 1.0) == pytest.approx(-1.0, rel=0, abs=1e-12)

    def test_hand_example(self):
        value = pearson_r([1, 2, 3, 4], [1.1, 1.9, 3.2, 3.8])
        # cov=4.7, var_x=5, var_y=4.5 by hand
        assert value == pytest.approx(4.7 / math.sqrt(5.0 * 4.5), rel=0, abs=1e-12)
        assert value == pytest.approx(0.99084, rel=0, abs=1e-5)

    def test_zero_variance_is_undefined(self):
        assert pearson_r([1.0, 2.0, 3.0], [5.0, 5.0, 5.0]) is None
        assert pearson_r([5.0, 5.0, 5.0], [1.0, 2.0, 3.0]) is None

    def test_symmetry(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            x = rng.normal(size=30)
            y = rng.normal(size=30)
            assert pearson_r(x, y) == pytest.approx(pearson_r(y, x), rel=0, abs=1e-14)

    def test_near_constant_plateau(self):
        # Raw-sums form alone loses the signal here; the fallback must not.
        x = 0.055 + 1e-9 * np.arange(100)
        y = 0.055 + 2e-9 * np.arange(100)
        assert pearson_r(x, y) == pytest.approx(1.0, rel=0, abs=1e-9)


class TestProperties:
    def test_rmse_ge_mae_randomized(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            n = int(rng.integers(1, 500))
            a = rng.normal(size=n)
            p = a + rng.normal(scale=rng.uniform(0.001, 2.0), size=n)
            assert rmse(a, p) >= mae(a, p) - 1e-15

    def test_translation_invariance(self):
        rng = np.random.default_rng(4)
        a = rng.normal(size=200)
        p = a + rng.normal(scale=0.3, size=200)
        for c in (-7.5, 0.25, 3.0):
            assert rmse(a + c, p + c) == pytest.approx(rmse(a, p), rel=0, abs=1e-12)
            assert mae(a + c, p + c) == pytest.approx(mae(a, p), rel=0, abs=1e-12)

    def test_matches_fsum_oracle(self):
        rng = np.random.default_rng(5)
        for _ in range(30):
            n = int(rng.integers(2, 2000))
            a = rng.normal(loc=rng.uniform(-1, 1), size=n)
            p = a + rng.normal(scale=rng.uniform(0.01, 1.0), size=n)
            assert rmse(a, p) == pytest.approx(rmse_fsum(a, p), rel=1e-12)
            assert mae(a, p) == pytest.approx(mae_fsum(a, p), rel=1e-12)
            assert pearson_r(a, p) == pytest.approx(pearson_fsum(a, p), rel=1e-12)


class TestReport:
    def test_from_pairs(self):
        rep = EvaluationReport.from_pairs([0.05, 0.06, 0.07], [0.06, 0.06, 0.06])
        assert rep.n == 3
        assert rep.rmse == rmse([0.05, 0.06, 0.07], [0.06, 0.06, 0.06])
        assert rep.mae == mae([0.05, 0.06, 0.07], [0.06, 0.06, 0.06])
        assert rep.rmse >= rep.mae

    def test_eight_decimal_rendering(self):
        rep = EvaluationReport(rmse=0.00853104, mae=0.00566044,
                               pearson_r=0.73053613, n=7262)
        lines = rep.to_lines("x")
        assert lines == [
            "x.n=7262",
            "x.rmse=0.00853104",
            "x.mae=0.00566044",
            "x.pearson_r=0.73053613",
        ]

    def test_undefined_r_renders_na(self):
        rep = EvaluationReport.from_pairs([1.0, 2.0], [3.0, 3.0])
        assert rep.pearson_r is None
        assert rep.format_r() == "n/a"
        assert rep.to_lines("p")[-1] == "p.pearson_r=n/a"
