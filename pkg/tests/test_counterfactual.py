import numpy as np
import pytest

from hxai.errors import AlreadyTargetClass, NoMutableFeatures
from hxai.explain import CfConfig, find_counterfactual
from hxai.tabular import FeatureSchema, dataset_from_rows
from tests.conftest import make_numeric_dataset


class ThresholdModel:
    """1[x > cut] as a probability output."""

    task = "binary_classification"
    name = "threshold"
    provenance = "builtin"

    def __init__(self, cut=5.0, feature="f0"):
        self.cut = cut
        self.feature = feature

    def predict(self, dataset):
        return (dataset.numeric(self.feature) > self.cut).astype(float)


class LogitModel:
    task = "binary_classification"
    name = "logit2d"
    provenance = "builtin"

    def __init__(self, w, b):
        self.w = np.asarray(w, dtype=float)
        self.b = float(b)

    def predict(self, dataset):
        X = np.column_stack([dataset.numeric(f"f{j}") for j in range(len(self.w))])
        return 1 / (1 + np.exp(-(X @ self.w + self.b)))


def test_1d_threshold_crossing():
    xs = np.linspace(0.0, 10.0, 101)
    ds = make_numeric_dataset(xs, np.zeros(101))
    model = ThresholdModel(5.0)
    row = int(np.argwhere(xs == 4.0)[0][0])
    res = find_counterfactual(model, ds, row, 1)
    assert res.found
    assert res.changed_features == ["f0"]
    x_cf = res.x_cf["f0"]
    assert 5.0 < x_cf <= 5.3  # just over the boundary after the shrink


def _grid_oracle(model, ds, row, target, resolution=0.01):
    """Brute-force minimal MAD-weighted L1 distance over a 2D grid."""
    x0 = np.array([ds.value(row, "f0"), ds.value(row, "f1")])
    f0 = ds.numeric("f0")
    f1 = ds.numeric("f1")
    mads = []
    for vals in (f0, f1):
        med = np.median(vals)
        mad = np.median(np.abs(vals - med))
        mads.append(mad if mad > 0 else vals.std())
    g0 = np.arange(f0.min(), f0.max() + resolution, resolution)
    g1 = np.arange(f1.min(), f1.max() + resolution, resolution)
    A, B = np.meshgrid(g0, g1, indexing="ij")
    X = np.column_stack([A.ravel(), B.ravel()])
    p = 1 / (1 + np.exp(-(X @ model.w + model.b)))
    flipped = (p >= 0.5) if target == 1 else (p < 0.5)
    if not flipped.any():
        return None
    d = np.abs(X - x0) @ (1.0 / np.array(mads))
    return float(d[flipped].min())


def test_2d_linear_near_optimal():
    rng = np.random.default_rng(3)
    X = rng.uniform(-3, 3, size=(200, 2))
    ds = make_numeric_dataset(X, np.zeros(200))
    model = LogitModel([2.0, 1.0], -1.0)
    preds = model.predict(ds)
    row = int(np.argwhere(preds < 0.4)[0][0])
    res = find_counterfactual(model, ds, row, 1, CfConfig(step_frac=0.02))
    assert res.found
    oracle = _grid_oracle(model, ds, row, 1)
    assert res.distance <= oracle * 1.10 + 1e-9


def test_validity_of_found_counterfactuals(german_with_sex, german_rf):
    preds = german_rf.predict(german_with_sex)
    bad_rows = np.nonzero(preds < 0.5)[0][:10]
    from hxai.tabular import Column

    for row in bad_rows:
        res = find_counterfactual(german_rf, german_with_sex, int(row), 1)
        if not res.found:
            continue
        ds = german_with_sex.take([int(row)])
        for name, value in res.x_cf.items():
            f = ds.feature(name)
            if f.kind == "categorical":
                code = f.categories.index(value)
                ds = ds.with_column(name, Column(np.array([code], dtype=np.int64),
                                                 np.zeros(1, bool)))
            elif name != ds.outcome_name:
                ds = ds.with_column(name, Column(np.array([float(value)]),
                                                 np.zeros(1, bool)))
        assert german_rf.predict(ds)[0] >= 0.5


def test_local_minimality_on_linear_model():
    rng = np.random.default_rng(4)
    X = rng.uniform(-3, 3, size=(150, 2))
    ds = make_numeric_dataset(X, np.zeros(150))
    model = LogitModel([1.5, -0.8], 0.2)
    preds = model.predict(ds)
    row = int(np.argwhere(preds < 0.35)[0][0])
    res = find_counterfactual(model, ds, row, 1)
    assert res.found
    from hxai.tabular import Column

    for name in res.changed_features:
        orig = ds.value(row, name)
        moved = dict(res.x_cf)
        # pull the single feature 5% back toward its original value
        moved[name] = res.x_cf[name] + 0.05 * (orig - res.x_cf[name])
        one = ds.take([row])
        for k, v in moved.items():
            if k == ds.outcome_name:
                continue
            one = one.with_column(k, Column(np.array([float(v)]), np.zeros(1, bool)))
        assert model.predict(one)[0] < 0.5, f"shrinking {name} kept the flip"


def test_categorical_swap():
    schema = [FeatureSchema("color", "categorical", ("blue", "green", "red")),
              FeatureSchema("y", "numeric")]
    rows = [["blue", 0.0], ["green", 0.0], ["red", 0.0]] * 5
    ds = dataset_from_rows(schema, rows, "y")

    class ColorModel:
        task = "binary_classification"
        name = "color"
        provenance = "builtin"

        def predict(self, dataset):
            codes = dataset.codes("color")
            cats = dataset.feature("color").categories
            return (np.array([cats[c] for c in codes]) == "red").astype(float)

    res = find_counterfactual(ColorModel(), ds, 0, 1)
    assert res.found
    assert res.x_cf["color"] == "red"
    assert res.distance == pytest.approx(1.0)


def test_already_target_class():
    ds = make_numeric_dataset(np.linspace(0, 10, 20), np.zeros(20))
    with pytest.raises(AlreadyTargetClass):
        find_counterfactual(ThresholdModel(5.0), ds, 19, 1)


def test_no_mutable_features():
    schema = [FeatureSchema("x", "numeric", mutable=False),
              FeatureSchema("y", "numeric")]
    ds = dataset_from_rows(schema, [[1.0, 0.0], [2.0, 0.0]], "y")
    with pytest.raises(NoMutableFeatures):
        find_counterfactual(ThresholdModel(5.0, "x"), ds, 0, 1)


def test_mutable_only_restriction(german_with_sex, german_rf):
    preds = german_rf.predict(german_with_sex)
    row = int(np.nonzero(preds < 0.5)[0][0])
    res = find_counterfactual(german_rf, german_with_sex, row, 1,
                              CfConfig(mutable_only=["Duration in month"]))
    assert set(res.changed_features) <= {"Duration in month"}


def test_immutable_schema_flags_respected(german_with_sex, german_rf):
    preds = german_rf.predict(german_with_sex)
    rows = np.nonzero(preds < 0.5)[0][:5]
    for row in rows:
        res = find_counterfactual(german_rf, german_with_sex, int(row), 1)
        assert "Age in years" not in res.changed_features
        assert "Personal status and sex" not in res.changed_features
