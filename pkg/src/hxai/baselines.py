"""Automatic random and biased reference models that ground every rating.

The random baseline predicts blindly (coin flips for classification, uniform
draws over a configured range otherwise). The biased baseline reads nothing
but the protected attribute: constant output per group for classification,
or a per-group additive offset on top of a base forecaster for forecasting.
Both are deterministic given their seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import MissingRange, SchemaError, UncoveredGroup
from .models.base import Predictor
from .models.forecast import ForecastPredictor
from .tabular import Dataset, GroupPartition


@dataclass
class BaselineConfig:
    kind: str = "random"  # random | biased
    seed: int = 0
    protected: str | None = None           # biased only
    group_outputs: dict = field(default_factory=dict)  # biased: label -> output
    regression_range: tuple[float, float] | None = None  # random regression/forecasting
    bin_thresholds: list[float] | None = None  # biased on a numeric protected attribute

    def validate(self):
        if self.kind not in ("random", "biased"):
            raise SchemaError(f"unknown baseline kind {self.kind!r}")
        if self.regression_range is not None:
            lo, hi = self.regression_range
            if not lo < hi:
                raise MissingRange(f"regression_range must satisfy lo < hi, got {self.regression_range}")

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "seed": self.seed,
            "protected": self.protected,
            "group_outputs": dict(self.group_outputs),
            "regression_range": list(self.regression_range) if self.regression_range else None,
            "bin_thresholds": self.bin_thresholds,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "BaselineConfig":
        rr = obj.get("regression_range")
        return cls(
            kind=obj.get("kind", "random"),
            seed=int(obj.get("seed", 0)),
            protected=obj.get("protected"),
            group_outputs=dict(obj.get("group_outputs", {})),
            regression_range=tuple(rr) if rr else None,
            bin_thresholds=obj.get("bin_thresholds"),
        )


# --- random ------------------------------------------------------------------

class RandomClassifier(Predictor):
    task = "binary_classification"
    provenance = "baseline"

    def __init__(self, seed: int, name: str = "random_baseline"):
        self.seed = int(seed)
        self.name = name

    def predict(self, dataset: Dataset) -> np.ndarray:
        rng = np.random.default_rng(self.seed)
        return rng.integers(0, 2, size=dataset.n_rows).astype(float)

    def to_json(self) -> dict:
        return {"kind": "random_baseline", "task": self.task, "seed": self.seed,
                "name": self.name}


class RandomRegressor(Predictor):
    task = "regression"
    provenance = "baseline"

    def __init__(self, seed: int, low: float, high: float, name: str = "random_baseline"):
        self.seed = int(seed)
        self.low = float(low)
        self.high = float(high)
        self.name = name

    def predict(self, dataset: Dataset) -> np.ndarray:
        rng = np.random.default_rng(self.seed)
        return rng.uniform(self.low, self.high, size=dataset.n_rows)

    def to_json(self) -> dict:
        return {"kind": "random_baseline", "task": self.task, "seed": self.seed,
                "low": self.low, "high": self.high, "name": self.name}


class RandomForecast(ForecastPredictor):
    provenance = "baseline"

    def __init__(self, seed: int, low: float, high: float, name: str = "random_baseline"):
        self.seed = int(seed)
        self.low = float(low)
        self.high = float(high)
        self.name = name

    def forecast_windows(self, X, horizon, company=None):
        X = np.asarray(X, dtype=float)
        rng = np.random.default_rng(self.seed)
        return rng.uniform(self.low, self.high, size=(X.shape[0], horizon))

    def to_json(self) -> dict:
        return {"kind": "random_baseline", "task": self.task, "seed": self.seed,
                "low": self.low, "high": self.high, "name": self.name}


def make_random_baseline(task: str, config: BaselineConfig,
                         name: str = "random_baseline") -> Predictor:
    config.validate()
    if task == "binary_classification":
        return RandomClassifier(config.seed, name=name)
    if config.regression_range is None:
        raise MissingRange(
            "random baseline for regression/forecasting needs a regression_range "
            "(default it to the observed outcome min/max)"
        )
    lo, hi = config.regression_range
    if task == "regression":
        return RandomRegressor(config.seed, lo, hi, name=name)
    if task == "forecasting":
        return RandomForecast(config.seed, lo, hi, name=name)
    raise SchemaError(f"unknown task {task!r}")


# --- biased --------------------------------------------------------------------

class BiasedClassifier(Predictor):
    """Prediction depends only on the row's protected-attribute group.

    Doubles as a group-constant regressor when task="regression".
    """

    provenance = "baseline"

    def __init__(self, attribute: str, group_outputs: dict, bin_thresholds=None,
                 name: str = "biased_baseline", task: str = "binary_classification"):
        self.attribute = attribute
        self.group_outputs = {str(k): float(v) for k, v in group_outputs.items()}
        self.bin_thresholds = list(bin_thresholds) if bin_thresholds else None
        self.name = name
        self.task = task

    def _labels(self, dataset: Dataset) -> list[str]:
        return _row_group_labels(dataset, self.attribute, self.bin_thresholds)

    def predict(self, dataset: Dataset) -> np.ndarray:
        out = np.empty(dataset.n_rows)
        for i, label in enumerate(self._labels(dataset)):
            if label is None or label not in self.group_outputs:
                raise UncoveredGroup(
                    f"row {i} has group {label!r} with no configured output"
                )
            out[i] = self.group_outputs[label]
        return out

    def to_json(self) -> dict:
        return {"kind": "biased_baseline", "task": self.task, "attribute": self.attribute,
                "group_outputs": dict(self.group_outputs),
                "bin_thresholds": self.bin_thresholds, "name": self.name}


class BiasedForecast(ForecastPredictor):
    """Base forecaster plus a per-group constant offset (regression analogue
    of group-constant classification bias)."""

    provenance = "baseline"

    def __init__(self, base: ForecastPredictor, group_offsets: dict,
                 name: str = "biased_baseline"):
        self.base = base
        self.group_offsets = {str(k): float(v) for k, v in group_offsets.items()}
        self.name = name

    def forecast_windows(self, X, horizon, company=None):
        preds = self.base.forecast_windows(X, horizon, company=company)
        if company is None:
            raise UncoveredGroup("biased forecast baseline needs the window's company label")
        if company not in self.group_offsets:
            raise UncoveredGroup(f"no configured offset for group {company!r}")
        return preds + self.group_offsets[company]

    def to_json(self) -> dict:
        return {"kind": "biased_forecast_baseline", "task": self.task,
                "group_offsets": dict(self.group_offsets), "name": self.name,
                "base": self.base.to_json()}


def _row_group_labels(dataset: Dataset, attribute: str, bin_thresholds=None):
    f = dataset.feature(attribute)
    col = dataset.columns[attribute]
    labels: list[str | None] = []
    if f.kind == "categorical":
        for i in range(dataset.n_rows):
            labels.append(None if col.missing[i] else f.categories[int(col.values[i])])
    elif bin_thresholds:
        ts = sorted(bin_thresholds)
        for i in range(dataset.n_rows):
            if col.missing[i]:
                labels.append(None)
            else:
                k = int(np.searchsorted(np.asarray(ts), col.values[i], side="left"))
                labels.append(f"bin{k}")
    else:
        for i in range(dataset.n_rows):
            if col.missing[i]:
                labels.append(None)
            else:
                v = float(col.values[i])
                labels.append(str(int(v)) if v.is_integer() else str(v))
    return labels


def default_biased_outputs(labels: list[str]) -> dict:
    """Lexicographically first group scores 1.0, every other group 0.0."""
    ordered = sorted(labels)
    return {lab: (1.0 if lab == ordered[0] else 0.0) for lab in ordered}


def make_biased_baseline(partition: GroupPartition, config: BaselineConfig,
                         name: str = "biased_baseline",
                         task: str = "binary_classification") -> BiasedClassifier:
    config.validate()
    labels = partition.labels
    outputs = {str(k): float(v) for k, v in (config.group_outputs or {}).items()}
    if not outputs:
        outputs = default_biased_outputs(labels)
    uncovered = [lab for lab in labels if lab not in outputs]
    if uncovered:
        raise UncoveredGroup(f"biased config misses groups: {uncovered}")
    return BiasedClassifier(partition.attribute, outputs,
                            bin_thresholds=config.bin_thresholds, name=name, task=task)


def make_biased_forecast_baseline(base: ForecastPredictor, group_offsets: dict,
                                  name: str = "biased_baseline") -> BiasedForecast:
    return BiasedForecast(base, group_offsets, name=name)


def baseline_from_json(obj: dict):
    kind = obj.get("kind")
    if kind == "random_baseline":
        task = obj["task"]
        if task == "binary_classification":
            return RandomClassifier(obj["seed"], name=obj.get("name", "random_baseline"))
        if task == "regression":
            return RandomRegressor(obj["seed"], obj["low"], obj["high"],
                                   name=obj.get("name", "random_baseline"))
        return RandomForecast(obj["seed"], obj["low"], obj["high"],
                              name=obj.get("name", "random_baseline"))
    if kind == "biased_baseline":
        return BiasedClassifier(obj["attribute"], obj["group_outputs"],
                                obj.get("bin_thresholds"),
                                name=obj.get("name", "biased_baseline"),
                                task=obj.get("task", "binary_classification"))
    if kind == "biased_forecast_baseline":
        from .models import load_model

        return BiasedForecast(load_model(obj["base"]), obj["group_offsets"],
                              name=obj.get("name", "biased_baseline"))
    return None
