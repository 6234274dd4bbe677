import numpy as np
import pytest

from _oracles import pearson_fsum
from soilvwc.dataset import kfold_split
from soilvwc.models import (
    ForestConfig,
    GbrConfig,
    MlpConfig,
    RegressorSpec,
    SvrConfig,
    cross_validate,
    fit_regressor,
    predict,
)


def toy_problem(n=60, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, 2))
    y = np.sin(X[:, 0]) + 0.5 * X[:, 1] + 0.05 * rng.normal(size=n)
    return X, y


SPECS = [
    RegressorSpec("svr", SvrConfig(kkt_tol=1e-6), seed=0),
    RegressorSpec("rf", ForestConfig(n_estimators=4), seed=0),
    RegressorSpec("gbr", GbrConfig(n_estimators=20), seed=0),
    RegressorSpec("mlp", MlpConfig(hidden_layers=2, hidden_width=4, epochs=5,
                                   batch_size=16), seed=0),
]


class TestRegressorSpec:
    def test_default_configs(self):
        assert isinstance(RegressorSpec.default("svr").config, SvrConfig)
        assert isinstance(RegressorSpec.default("rf").config, ForestConfig)
        assert isinstance(RegressorSpec.default("gbr").config, GbrConfig)
        assert isinstance(RegressorSpec.default("mlp").config, MlpConfig)

    def test_unknown_family(self):
        with pytest.raises(ValueError):
            RegressorSpec.default("ridge")

    def test_config_family_mismatch(self):
        with pytest.raises(ValueError):
            RegressorSpec("svr", ForestConfig())


class TestFitPredict:
    @pytest.mark.parametrize("spec", SPECS, ids=[s.family for s in SPECS])
    def test_fit_and_predict_shapes(self, spec):
        X, y = toy_problem()
        model = fit_regressor(spec, X, y)
        pred = predict(model, X)
        assert pred.shape == (60,)
        assert np.all(np.isfinite(pred))

    def test_standardizer_learned_on_training_rows(self):
        X, y = toy_problem()
        model = fit_regressor(SPECS[2], X, y)
        assert np.allclose(model.standardizer.mean, X.mean(axis=0))
        assert np.allclose(model.standardizer.std, X.std(axis=0))

    def test_features_recorded(self):
        X, y = toy_problem()
        model = fit_regressor(SPECS[2], X, y, features=["yl69_raw", "sen13322_raw"])
        assert model.features == ("yl69_raw", "sen13322_raw")


class TestCrossValidate:
    @pytest.mark.parametrize("spec", SPECS, ids=[s.family for s in SPECS])
    def test_every_record_predicted_once(self, spec):
        X, y = toy_problem()
        plan = kfold_split(len(y), 5)
        result = cross_validate(spec, X, y, plan)
        assert result.predictions.shape == (60,)
        assert np.all(np.isfinite(result.predictions))
        assert len(result.fold_reports) == 5
        assert sum(r.n for r in result.fold_reports) == 60

    def test_pooled_matches_recomputation(self):
        X, y = toy_problem()
        plan = kfold_split(len(y), 5)
        result = cross_validate(SPECS[2], X, y, plan)
        r = pearson_fsum(y, result.predictions)
        assert result.pooled.pearson_r == pytest.approx(r, rel=0, abs=1e-12)
        assert result.pooled.n == 60

    def test_deterministic(self):
        X, y = toy_problem()
        plan = kfold_split(len(y), 4)
        a = cross_validate(SPECS[1], X, y, plan)
        b = cross_validate(SPECS[1], X, y, plan)
        assert np.array_equal(a.predictions, b.predictions)

    def test_plan_size_checked(self):
        X, y = toy_problem()
        plan = kfold_split(50, 5)
        with pytest.raises(ValueError):
            cross_validate(SPECS[1], X, y, plan)

    def test_fold_models_trained_on_complement(self):
        # With contiguous folds and a memorizing model, a duplicated-row
        # dataset is predicted well from the complement.
        rng = np.random.default_rng(1)
        Xb = rng.normal(size=(20, 1))
        yb = np.sin(Xb[:, 0])
        X = np.tile(Xb, (5, 1))
        y = np.tile(yb, 5)
        order = rng.permutation(len(y))
        X, y = X[order], y[order]
        plan = kfold_split(len(y), 5)
        result = cross_validate(SPECS[2], X, y, plan)
        assert result.pooled.rmse < 0.1
