import numpy as np
import pytest

from hxai.io import derive_sex_column, load_german_credit
from hxai.models import TreeConfig, train_logistic, train_tree_ensemble
from hxai.tabular import FeatureSchema, dataset_from_rows


@pytest.fixture(scope="session")
def german():
    return load_german_credit()


@pytest.fixture(scope="session")
def german_with_sex(german):
    return derive_sex_column(german)


@pytest.fixture(scope="session")
def german_rf(german_with_sex):
    return train_tree_ensemble(
        german_with_sex, "Cost Matrix(Risk)",
        TreeConfig(n_trees=150, max_depth=4, mode="bagging", seed=3))


@pytest.fixture(scope="session")
def german_lr(german_with_sex):
    return train_logistic(german_with_sex, "Cost Matrix(Risk)")


def make_numeric_dataset(X, y, outcome="y", feature_prefix="f"):
    """Rows from a feature matrix + outcome vector, all numeric."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    schema = [FeatureSchema(f"{feature_prefix}{j}", "numeric") for j in range(X.shape[1])]
    schema.append(FeatureSchema(outcome, "numeric"))
    rows = [list(map(float, X[i])) + [float(y[i])] for i in range(len(X))]
    return dataset_from_rows(schema, rows, outcome)


class LinearProbModel:
    """Deterministic classifier sigma-free: p = clip(w.x + b) for oracles."""

    task = "binary_classification"
    name = "linear_prob"
    provenance = "builtin"

    def __init__(self, weights, intercept=0.0, feature_names=None):
        self.weights = np.asarray(weights, dtype=float)
        self.intercept = float(intercept)
        self.feature_names = feature_names

    def predict(self, dataset):
        names = self.feature_names or dataset.feature_names
        X = np.column_stack([dataset.numeric(n) for n in names])
        return np.clip(X @ self.weights + self.intercept, 0.0, 1.0)


class RawLinearModel:
    """Unclipped linear regressor f = w.x + b."""

    task = "regression"
    name = "raw_linear"
    provenance = "builtin"

    def __init__(self, weights, intercept=0.0, feature_names=None):
        self.weights = np.asarray(weights, dtype=float)
        self.intercept = float(intercept)
        self.feature_names = feature_names

    def predict(self, dataset):
        names = self.feature_names or dataset.feature_names
        X = np.column_stack([dataset.numeric(n) for n in names])
        return X @ self.weights + self.intercept


class ConstantModel:
    task = "binary_classification"
    name = "constant"
    provenance = "builtin"

    def __init__(self, value=0.5, task="binary_classification"):
        self.value = float(value)
        self.task = task

    def predict(self, dataset):
        return np.full(dataset.n_rows, self.value)
