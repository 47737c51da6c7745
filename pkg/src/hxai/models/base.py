"""Uniform scoring contract over built-in, baseline, and external models."""

from __future__ import annotations

import abc

import numpy as np

from ..errors import NonFiniteFeature, UnknownAttribute
from ..tabular import Dataset

TASKS = ("binary_classification", "regression", "forecasting")


class Predictor(abc.ABC):
    """Anything that scores rows: task + deterministic predict().

    binary_classification emits class-1 probabilities in [0, 1]; regression
    emits values; forecasting emits the first-step-ahead forecast per window
    row (multi-step forecasts go through ``forecast_windows``).
    """

    task: str = "binary_classification"
    name: str = "model"
    provenance: str = "builtin"  # builtin | baseline | external

    @abc.abstractmethod
    def predict(self, dataset: Dataset) -> np.ndarray:
        ...

    def metadata(self) -> dict:
        return {"name": self.name, "task": self.task, "provenance": self.provenance}

    def to_json(self) -> dict:  # pragma: no cover - overridden by persistable models
        raise NotImplementedError(f"{type(self).__name__} does not serialize")


class FeatureMatrix:
    """Dataset -> model-input matrix: numerics as floats, categoricals as codes.

    Trees consume this directly (they split on category membership); the
    logistic model expands it to one-hot via ``OneHotEncoder``.
    """

    def __init__(self, dataset: Dataset, feature_names: list[str] | None = None):
        names = feature_names if feature_names is not None else dataset.feature_names
        self.feature_names = list(names)
        self.is_cat = np.array(
            [dataset.feature(n).kind == "categorical" for n in names], dtype=bool
        )
        self.n_categories = np.array(
            [len(dataset.feature(n).categories) if dataset.feature(n).kind == "categorical" else 0
             for n in names], dtype=np.int64
        )

    def matrix(self, dataset: Dataset, allow_missing: bool = False) -> np.ndarray:
        cols = []
        for name in self.feature_names:
            if not dataset.has_column(name):
                raise UnknownAttribute(f"dataset lacks model feature {name!r}")
            col = dataset.columns[name]
            vals = col.values.astype(np.float64).copy()
            if col.missing.any():
                if not allow_missing:
                    raise NonFiniteFeature(f"missing values in feature {name!r}")
                vals[col.missing] = np.nan
            cols.append(vals)
        X = np.column_stack(cols) if cols else np.empty((dataset.n_rows, 0))
        if not allow_missing and not np.isfinite(X).all():
            bad = int(np.argwhere(~np.isfinite(X))[0][1])
            raise NonFiniteFeature(f"non-finite value in feature {self.feature_names[bad]!r}")
        return X


class OneHotEncoder:
    """One-hot expansion of categoricals plus z-scaling of numerics.

    Scale parameters are frozen at fit time so prediction is closed-form
    reproducible: column order is feature order, with each categorical
    expanded into one indicator per declared category.
    """

    def __init__(self, dataset: Dataset, feature_names: list[str] | None = None):
        names = feature_names if feature_names is not None else dataset.feature_names
        self.feature_names = list(names)
        self.blocks: list[tuple[str, str, int]] = []  # (name, kind, width)
        for n in names:
            f = dataset.feature(n)
            if f.kind == "categorical":
                self.blocks.append((n, "categorical", len(f.categories)))
            else:
                self.blocks.append((n, "numeric", 1))
        self.width = sum(w for _, _, w in self.blocks)
        self.mean = np.zeros(self.width)
        self.scale = np.ones(self.width)
        self.encoded_names: list[str] = []
        for (n, kind, w) in self.blocks:
            if kind == "categorical":
                cats = dataset.feature(n).categories
                self.encoded_names.extend(f"{n}={c}" for c in cats)
            else:
                self.encoded_names.append(n)

    def raw(self, dataset: Dataset) -> np.ndarray:
        out = np.zeros((dataset.n_rows, self.width))
        pos = 0
        for (n, kind, w) in self.blocks:
            col = dataset.columns[n]
            if col.missing.any():
                raise NonFiniteFeature(f"missing values in feature {n!r}")
            if kind == "categorical":
                codes = col.values.astype(np.int64)
                out[np.arange(dataset.n_rows), pos + codes] = 1.0
            else:
                vals = col.values.astype(np.float64)
                if not np.isfinite(vals).all():
                    raise NonFiniteFeature(f"non-finite value in feature {n!r}")
                out[:, pos] = vals
            pos += w
        return out

    def fit_scale(self, X: np.ndarray) -> None:
        self.mean = X.mean(axis=0)
        sd = X.std(axis=0)
        sd[sd == 0] = 1.0
        self.scale = sd

    def transform(self, dataset: Dataset) -> np.ndarray:
        return (self.raw(dataset) - self.mean) / self.scale

    def slice_of(self, feature: str) -> slice:
        pos = 0
        for (n, _, w) in self.blocks:
            if n == feature:
                return slice(pos, pos + w)
            pos += w
        raise UnknownAttribute(f"encoder does not carry feature {feature!r}")

    def to_json(self) -> dict:
        return {
            "feature_names": self.feature_names,
            "blocks": [list(b) for b in self.blocks],
            "mean": self.mean.tolist(),
            "scale": self.scale.tolist(),
            "encoded_names": self.encoded_names,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "OneHotEncoder":
        enc = object.__new__(cls)
        enc.feature_names = list(obj["feature_names"])
        enc.blocks = [tuple(b) for b in obj["blocks"]]
        enc.width = sum(w for _, _, w in enc.blocks)
        enc.mean = np.array(obj["mean"], dtype=float)
        enc.scale = np.array(obj["scale"], dtype=float)
        enc.encoded_names = list(obj["encoded_names"])
        return enc


def infer_task(dataset: Dataset, outcome: str) -> str:
    f = dataset.feature(outcome)
    if f.kind == "binary":
        return "binary_classification"
    if f.kind == "categorical":
        if len(f.categories) == 2:
            return "binary_classification"
        raise NonFiniteFeature(f"outcome {outcome!r} has more than two classes")
    vals = dataset.numeric(outcome)
    uniq = np.unique(vals[~np.isnan(vals)])
    if uniq.size <= 2 and set(uniq.tolist()) <= {0.0, 1.0}:
        return "binary_classification"
    return "regression"
