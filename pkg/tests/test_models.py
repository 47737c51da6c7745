import json

import numpy as np
import pytest

from hxai.errors import DegenerateOutcome, InvalidConfig, SeriesTooShort
from hxai.models import (
    ARForecaster,
    LogisticModel,
    TreeConfig,
    TreeEnsembleModel,
    load_model,
    train_forecaster,
    train_logistic,
    train_tree_ensemble,
)
from hxai.tabular import FeatureSchema, dataset_from_rows

from tests.conftest import make_numeric_dataset


# --- logistic -----------------------------------------------------------------

def test_logistic_separable_1d():
    rng = np.random.default_rng(0)
    x = rng.normal(size=200) * 2
    y = (x > 0).astype(float)
    ds = make_numeric_dataset(x, y)
    model = train_logistic(ds, "y")
    acc = float(((model.predict(ds) > 0.5) == (y > 0.5)).mean())
    assert acc >= 0.99


def test_logistic_degenerate_outcome():
    ds = make_numeric_dataset(np.arange(10.0), np.ones(10))
    with pytest.raises(DegenerateOutcome):
        train_logistic(ds, "y")


def test_logistic_closed_form(german_with_sex, german_lr):
    z = german_lr.encoder.transform(german_with_sex) @ german_lr.weights + german_lr.intercept
    expected = 1.0 / (1.0 + np.exp(-np.clip(z, -35, 35)))
    np.testing.assert_allclose(german_lr.predict(german_with_sex), expected, atol=1e-12)


def test_logistic_golden_holdout_accuracy(german_with_sex):
    # fixed 80/20 split; the band is the acceptance contract
    rng = np.random.default_rng(42)
    idx = rng.permutation(german_with_sex.n_rows)
    train, test = idx[:800], idx[800:]
    model = train_logistic(german_with_sex.take(train), "Cost Matrix(Risk)")
    y = german_with_sex.take(test).numeric("Cost Matrix(Risk)")
    acc = float(((model.predict(german_with_sex.take(test)) > 0.5) == (y > 0.5)).mean())
    assert 0.65 <= acc <= 0.85, f"holdout accuracy {acc}"


def test_logistic_serialization_round_trip(german_with_sex, german_lr):
    back = load_model(json.loads(json.dumps(german_lr.to_json())))
    assert isinstance(back, LogisticModel)
    np.testing.assert_allclose(back.predict(german_with_sex),
                               german_lr.predict(german_with_sex), atol=0)


# --- tree ensembles --------------------------------------------------------------

def _xor_dataset(n=400, seed=1):
    rng = np.random.default_rng(seed)
    a = rng.integers(0, 2, size=n)
    b = rng.integers(0, 2, size=n)
    y = (a ^ b).astype(float)
    X = np.column_stack([a, b]).astype(float)
    return make_numeric_dataset(X, y)


def test_tree_xor():
    ds = _xor_dataset()
    model = train_tree_ensemble(ds, "y", TreeConfig(n_trees=50, max_depth=3,
                                                    learning_rate=0.3, min_leaf=5))
    y = ds.numeric("y")
    acc = float(((model.predict(ds) > 0.5) == (y > 0.5)).mean())
    assert acc >= 0.95


def test_tree_constant_outcome_stump():
    ds = make_numeric_dataset(np.arange(20.0), np.full(20, 5.0))
    model = train_tree_ensemble(ds, "y", TreeConfig(n_trees=1, max_depth=1))
    np.testing.assert_allclose(model.predict(ds), np.full(20, 5.0), atol=1e-9)
    assert model.n_trees == 1


def test_tree_monotone_regression():
    x = np.linspace(0, 1, 200)
    ds = make_numeric_dataset(x, 2 * x)
    model = train_tree_ensemble(ds, "y", TreeConfig(n_trees=300, max_depth=3,
                                                    learning_rate=0.1, min_leaf=2))
    preds = model.predict(ds)
    assert np.abs(preds - 2 * x).max() <= 0.1


def test_tree_invalid_config():
    ds = _xor_dataset(50)
    with pytest.raises(InvalidConfig):
        train_tree_ensemble(ds, "y", TreeConfig(n_trees=0))
    with pytest.raises(InvalidConfig):
        train_tree_ensemble(ds, "y", TreeConfig(max_depth=0))
    schema = [FeatureSchema("x", "numeric"), FeatureSchema("y", "binary")]
    all_one = dataset_from_rows(schema, [[float(i), 1.0] for i in range(10)], "y")
    with pytest.raises(DegenerateOutcome):
        train_tree_ensemble(all_one, "y", TreeConfig(n_trees=2))


def _walk_tree_oracle(model: TreeEnsembleModel, X: np.ndarray) -> np.ndarray:
    """Independent python walk of the tree structures."""
    out = np.full(X.shape[0], model.base_score)
    for tree in model.trees:
        for i in range(X.shape[0]):
            node = 0
            while tree.feature[node] >= 0:
                f = int(tree.feature[node])
                v = X[i, f]
                if tree.is_cat[node]:
                    go_left = v == tree.threshold[node]
                else:
                    go_left = v <= tree.threshold[node]
                node = int(tree.left[node]) if go_left else int(tree.right[node])
            out[i] += model.learning_rate * tree.value[node]
    return out


def test_tree_prediction_matches_walk_oracle(german_with_sex, german_rf):
    rng = np.random.default_rng(11)
    rows = rng.choice(german_with_sex.n_rows, size=100, replace=False)
    sub = german_with_sex.take(rows)
    X = german_rf.features.matrix(sub)
    oracle = _walk_tree_oracle(german_rf, X)
    np.testing.assert_allclose(german_rf.raw_margin(sub), oracle, atol=1e-12)


def test_boosting_loss_non_increasing():
    rng = np.random.default_rng(5)
    X = rng.normal(size=(300, 3))
    y = ((X[:, 0] + 0.5 * X[:, 1] + rng.normal(size=300) * 0.3) > 0).astype(float)
    ds = make_numeric_dataset(X, y)
    losses = []
    for t in (1, 5, 20, 60):
        model = train_tree_ensemble(ds, "y", TreeConfig(n_trees=t, max_depth=3,
                                                        learning_rate=0.2))
        p = np.clip(model.predict(ds), 1e-12, 1 - 1e-12)
        losses.append(float(-np.mean(y * np.log(p) + (1 - y) * np.log(1 - p))))
    assert all(b <= a + 1e-9 for a, b in zip(losses, losses[1:]))


def test_tree_depth_and_leaf_limits(german_with_sex, german_rf):
    assert german_rf.max_depth() <= 4
    assert german_rf.max_leaves() <= 2 ** 4


def test_tree_determinism(german_with_sex):
    cfg = TreeConfig(n_trees=20, max_depth=3, seed=5)
    a = train_tree_ensemble(german_with_sex, "Cost Matrix(Risk)", cfg)
    b = train_tree_ensemble(german_with_sex, "Cost Matrix(Risk)",
                            TreeConfig(n_trees=20, max_depth=3, seed=5))
    np.testing.assert_array_equal(a.predict(german_with_sex), b.predict(german_with_sex))


def test_tree_serialization_round_trip(german_with_sex, german_rf):
    back = load_model(json.loads(json.dumps(german_rf.to_json())))
    np.testing.assert_allclose(back.predict(german_with_sex),
                               german_rf.predict(german_with_sex), atol=0)


def test_bagging_outputs_are_probabilities(german_with_sex, german_rf):
    p = german_rf.predict(german_with_sex)
    assert p.min() >= 0.0 and p.max() <= 1.0


# --- forecaster -------------------------------------------------------------------

def test_forecaster_constant_series():
    model = train_forecaster(np.full(50, 5.0), order=3)
    fc = model.forecast(np.full(10, 5.0), 7)
    np.testing.assert_allclose(fc, np.full(7, 5.0), atol=1e-9)


def test_forecaster_linear_ramp():
    s = np.arange(1.0, 101.0)
    model = train_forecaster(s, order=2)
    fc = model.forecast(s, 5)
    np.testing.assert_allclose(fc, [101, 102, 103, 104, 105], atol=0.5)
    assert model.ridge_fallback  # ramp design is collinear with the intercept


def test_forecaster_too_short():
    with pytest.raises(SeriesTooShort):
        train_forecaster(np.arange(3.0), order=2)


def test_forecaster_serialization():
    model = train_forecaster(np.sin(np.arange(100.0) / 5), order=4)
    back = load_model(json.loads(json.dumps(model.to_json())))
    assert isinstance(back, ARForecaster)
    h = np.sin(np.arange(30.0) / 5)
    np.testing.assert_allclose(back.forecast(h, 5), model.forecast(h, 5), atol=0)


def test_predict_determinism(german_with_sex, german_rf, german_lr):
    for model in (german_rf, german_lr):
        a = model.predict(german_with_sex)
        b = model.predict(german_with_sex)
        np.testing.assert_array_equal(a, b)
