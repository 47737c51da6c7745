import numpy as np
import pytest

from hxai.errors import TooFewRows
from hxai.rating import SuperLearnerConfig, fit_super_learner


def test_linear_target_prefers_ridge():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(400, 3))
    y = 2 * X[:, 0] - X[:, 1] + 0.5 * X[:, 2] + rng.normal(size=400) * 0.05
    sl = fit_super_learner(X, y, SuperLearnerConfig(seed=1))
    weights = sl.weight_map()
    assert weights["ridge"] >= 0.8
    assert abs(sum(weights.values()) - 1.0) < 1e-9


def test_piecewise_constant_prefers_trees():
    rng = np.random.default_rng(2)
    x = rng.uniform(-3, 3, size=500)
    y = np.where(x < -1, 5.0, np.where(x < 1, -2.0, 9.0)) + rng.normal(size=500) * 0.05
    sl = fit_super_learner(x[:, None], y, SuperLearnerConfig(seed=3))
    assert sl.weight_map()["tree"] >= 0.5


def test_constant_target_predicts_constant():
    rng = np.random.default_rng(4)
    X = rng.normal(size=(100, 2))
    y = np.full(100, 3.25)
    sl = fit_super_learner(X, y, SuperLearnerConfig(seed=5))
    preds = sl.predict(rng.normal(size=(20, 2)))
    np.testing.assert_allclose(preds, 3.25, atol=1e-9)


def test_too_few_rows():
    with pytest.raises(TooFewRows):
        fit_super_learner(np.zeros((7, 1)), np.zeros(7), SuperLearnerConfig(folds=5))


def test_stack_weights_reported_and_deterministic():
    rng = np.random.default_rng(6)
    X = rng.normal(size=(200, 2))
    y = X[:, 0] ** 2 + rng.normal(size=200) * 0.1
    a = fit_super_learner(X, y, SuperLearnerConfig(seed=7)).weight_map()
    b = fit_super_learner(X, y, SuperLearnerConfig(seed=7)).weight_map()
    assert a == b
    assert set(a) == {"ridge", "tree", "knn"}
