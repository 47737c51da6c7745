"""Partial dependence: average prediction as one feature sweeps a grid."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import UnknownAttribute, UnknownFeature
from ..tabular import Column, Dataset


@dataclass
class PdpCurve:
    feature: str
    grid: list            # floats (numeric) or category labels
    averages: list[float]
    n_background: int
    kind: str = "numeric"

    def to_json(self) -> dict:
        return {
            "feature": self.feature,
            "kind": self.kind,
            "grid": list(self.grid),
            "averages": [float(a) for a in self.averages],
            "n_background": self.n_background,
        }


def compute_pdp(model, dataset: Dataset, feature: str, grid_size: int = 20,
                grid=None) -> PdpCurve:
    """Numeric grids default to quantile points; categorical grids are the
    declared categories. Every grid value is forced onto all rows and the
    predictions averaged."""
    try:
        f = dataset.feature(feature)
    except UnknownAttribute as exc:
        raise UnknownFeature(str(exc)) from exc
    col = dataset.columns[feature]
    if f.kind == "categorical":
        values = list(grid) if grid is not None else list(f.categories)
        averages = []
        for cat in values:
            if cat not in f.categories:
                raise UnknownFeature(f"{cat!r} is not a category of {feature!r}")
            code = f.categories.index(cat)
            forced = dataset.with_column(
                feature, Column(np.full(dataset.n_rows, code, dtype=np.int64),
                                np.zeros(dataset.n_rows, bool)))
            averages.append(float(np.mean(model.predict(forced))))
        return PdpCurve(feature=feature, grid=values, averages=averages,
                        n_background=dataset.n_rows, kind="categorical")
    vals = col.values[~col.missing].astype(float)
    if grid is not None:
        points = np.asarray(sorted(float(g) for g in grid))
    else:
        qs = np.linspace(0.0, 1.0, max(2, grid_size))
        points = np.unique(np.quantile(vals, qs))
    averages = []
    for v in points:
        forced = dataset.with_column(
            feature, Column(np.full(dataset.n_rows, v, dtype=float),
                            np.zeros(dataset.n_rows, bool)))
        averages.append(float(np.mean(model.predict(forced))))
    return PdpCurve(feature=feature, grid=[float(p) for p in points],
                    averages=averages, n_background=dataset.n_rows)
