"""Order-p linear autoregressive forecaster fit by least squares.

Multi-step forecasts come from recursive one-step application. A rank
deficient design falls back to ridge with a fixed 1e-6 jitter, flagged in
the model metadata.
"""

from __future__ import annotations

import numpy as np

from ..errors import SeriesTooShort
from ..tabular import Dataset
from .base import Predictor


class ForecastPredictor(Predictor):
    """Forecasting contract: first-step scores via predict(), full horizons
    via forecast_windows(X, horizon)."""

    task = "forecasting"

    def forecast_windows(self, X: np.ndarray, horizon: int, company: str | None = None) -> np.ndarray:
        raise NotImplementedError

    def predict(self, dataset: Dataset) -> np.ndarray:
        X = _lag_matrix(dataset)
        return self.forecast_windows(X, 1)[:, 0]


def _lag_matrix(dataset: Dataset) -> np.ndarray:
    """Window rows -> (n, H) history matrix, oldest lag first.

    Lag columns are every numeric feature named ``t-<k>``; any other columns
    (company tags, targets) are ignored.
    """
    lag_cols = sorted(
        (n for n in dataset.feature_names if n.startswith("t-")),
        key=lambda n: -int(n[2:]),
    )
    if not lag_cols:
        raise SeriesTooShort("window dataset has no t-<k> lag columns")
    cols = [dataset.numeric(n) for n in lag_cols]
    X = np.column_stack(cols)
    if np.isnan(X).any():
        raise SeriesTooShort("window dataset contains missing lags; impute first")
    return X


class ARForecaster(ForecastPredictor):
    def __init__(self, coef: np.ndarray, intercept: float, order: int,
                 ridge_fallback: bool = False, name: str = "ar_forecaster"):
        self.coef = np.asarray(coef, dtype=float)  # weight for lag p .. lag 1
        self.intercept = float(intercept)
        self.order = int(order)
        self.ridge_fallback = ridge_fallback
        self.name = name
        self.provenance = "builtin"

    def metadata(self) -> dict:
        out = super().metadata()
        out["order"] = self.order
        out["ridge_fallback"] = self.ridge_fallback
        return out

    def forecast_windows(self, X: np.ndarray, horizon: int, company: str | None = None) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] < self.order:
            raise SeriesTooShort(f"window history shorter than AR order {self.order}")
        n = X.shape[0]
        out = np.empty((n, horizon))
        hist = X[:, -self.order:].copy()
        for t in range(horizon):
            nxt = hist @ self.coef + self.intercept
            out[:, t] = nxt
            hist = np.column_stack([hist[:, 1:], nxt])
        return out

    def forecast(self, history, horizon: int) -> np.ndarray:
        return self.forecast_windows(np.asarray(history, dtype=float)[None, :], horizon)[0]

    def to_json(self) -> dict:
        return {
            "kind": "ar_forecaster",
            "name": self.name,
            "order": self.order,
            "coef": self.coef.tolist(),
            "intercept": self.intercept,
            "ridge_fallback": self.ridge_fallback,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ARForecaster":
        return cls(np.array(obj["coef"], dtype=float), obj["intercept"], obj["order"],
                   obj.get("ridge_fallback", False), name=obj.get("name", "ar_forecaster"))


def train_forecaster_multi(series_list, order: int = 8,
                           name: str = "ar_forecaster") -> ARForecaster:
    """One AR(p) fit on the pooled lag rows of several series."""
    designs, targets = [], []
    for series in series_list:
        s = np.asarray(series, dtype=float)
        if np.isnan(s).any():
            raise SeriesTooShort("series contains missing values; impute before fitting")
        if len(s) <= order + 1:
            raise SeriesTooShort(f"series of length {len(s)} cannot fit AR({order})")
        rows = len(s) - order
        X = np.empty((rows, order))
        for k in range(order):
            X[:, k] = s[k:k + rows]
        designs.append(X)
        targets.append(s[order:])
    if not designs:
        raise SeriesTooShort("no series provided")
    A = np.hstack([np.vstack(designs), np.ones((sum(len(t) for t in targets), 1))])
    y = np.concatenate(targets)
    ridge_fallback = False
    sol, _, rank, _ = np.linalg.lstsq(A, y, rcond=None)
    if rank < A.shape[1]:
        ridge_fallback = True
        G = A.T @ A + 1e-6 * np.eye(A.shape[1])
        sol = np.linalg.solve(G, A.T @ y)
    return ARForecaster(coef=sol[:-1], intercept=float(sol[-1]), order=order,
                        ridge_fallback=ridge_fallback, name=name)


def train_forecaster(series, order: int = 8, name: str = "ar_forecaster") -> ARForecaster:
    s = np.asarray(series, dtype=float)
    if np.isnan(s).any():
        raise SeriesTooShort("series contains missing values; impute before fitting")
    if len(s) <= order + 1:
        raise SeriesTooShort(f"series of length {len(s)} cannot fit AR({order})")
    rows = len(s) - order
    X = np.empty((rows, order))
    for k in range(order):
        X[:, k] = s[k:k + rows]  # column k = lag (order - k)
    y = s[order:]
    A = np.hstack([X, np.ones((rows, 1))])
    ridge_fallback = False
    sol, _, rank, _ = np.linalg.lstsq(A, y, rcond=None)
    if rank < A.shape[1]:
        ridge_fallback = True
        G = A.T @ A + 1e-6 * np.eye(A.shape[1])
        sol = np.linalg.solve(G, A.T @ y)
    return ARForecaster(coef=sol[:-1], intercept=float(sol[-1]), order=order,
                        ridge_fallback=ridge_fallback, name=name)
