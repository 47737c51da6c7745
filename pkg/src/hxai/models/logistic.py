"""L2-regularized logistic regression trained by damped Newton iterations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateOutcome
from ..tabular import Dataset
from .base import OneHotEncoder, Predictor


@dataclass
class LogisticConfig:
    l2: float = 1e-4
    max_iter: int = 100
    tol: float = 1e-8


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-np.clip(z, -35.0, 35.0)))


class LogisticModel(Predictor):
    """sigmoid(w . x + b) over one-hot encoded, z-scaled features."""

    task = "binary_classification"

    def __init__(self, weights: np.ndarray, intercept: float, encoder: OneHotEncoder,
                 converged: bool, name: str = "logistic"):
        self.weights = np.asarray(weights, dtype=float)
        self.intercept = float(intercept)
        self.encoder = encoder
        self.converged = converged
        self.name = name
        self.provenance = "builtin"
        if len(self.weights) != encoder.width:
            raise DegenerateOutcome("weight vector does not match encoded feature count")

    @property
    def feature_order(self) -> list[str]:
        return self.encoder.feature_names

    def decision_values(self, dataset: Dataset) -> np.ndarray:
        return self.encoder.transform(dataset) @ self.weights + self.intercept

    def predict(self, dataset: Dataset) -> np.ndarray:
        return _sigmoid(self.decision_values(dataset))

    def metadata(self) -> dict:
        out = super().metadata()
        out["converged"] = self.converged
        return out

    def to_json(self) -> dict:
        return {
            "kind": "logistic",
            "name": self.name,
            "weights": self.weights.tolist(),
            "intercept": self.intercept,
            "converged": self.converged,
            "encoder": self.encoder.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "LogisticModel":
        return cls(
            weights=np.array(obj["weights"], dtype=float),
            intercept=obj["intercept"],
            encoder=OneHotEncoder.from_json(obj["encoder"]),
            converged=bool(obj["converged"]),
            name=obj.get("name", "logistic"),
        )


def train_logistic(dataset: Dataset, outcome: str, config: LogisticConfig | None = None,
                   name: str = "logistic") -> LogisticModel:
    """Newton-Raphson fit; converged when the gradient norm drops below tol."""
    config = config or LogisticConfig()
    f = dataset.feature(outcome)
    if f.kind == "categorical":
        y = dataset.codes(outcome).astype(float)
    else:
        y = dataset.numeric(outcome)
    if np.isnan(y).any():
        raise DegenerateOutcome("outcome contains missing values")
    classes = np.unique(y)
    if classes.size < 2:
        raise DegenerateOutcome("outcome has a single class")
    if not set(classes.tolist()) <= {0.0, 1.0}:
        raise DegenerateOutcome("logistic outcome must be 0/1")

    encoder = OneHotEncoder(dataset, list(dataset.feature_names))
    raw = encoder.raw(dataset)
    encoder.fit_scale(raw)
    X = (raw - encoder.mean) / encoder.scale
    n, d = X.shape
    w = np.zeros(d)
    b = float(np.log(np.clip(y.mean(), 1e-9, 1 - 1e-9) / np.clip(1 - y.mean(), 1e-9, 1)))
    lam = config.l2
    converged = False
    for _ in range(config.max_iter):
        z = X @ w + b
        p = _sigmoid(z)
        grad_w = X.T @ (p - y) / n + lam * w
        grad_b = float(np.mean(p - y))
        gnorm = float(np.sqrt(grad_w @ grad_w + grad_b * grad_b))
        if gnorm <= config.tol:
            converged = True
            break
        s = np.maximum(p * (1 - p), 1e-9)
        Xa = np.hstack([X, np.ones((n, 1))])
        H = (Xa * s[:, None]).T @ Xa / n
        H[:d, :d] += lam * np.eye(d)
        g = np.concatenate([grad_w, [grad_b]])
        try:
            step = np.linalg.solve(H, g)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(H, g, rcond=None)[0]
        # damped update: halve until the penalized loss does not increase
        loss0 = _penalized_loss(X, y, w, b, lam)
        scale = 1.0
        for _attempt in range(30):
            w2 = w - scale * step[:d]
            b2 = b - scale * step[d]
            if _penalized_loss(X, y, w2, b2, lam) <= loss0 + 1e-12:
                break
            scale *= 0.5
        w, b = w - scale * step[:d], b - scale * step[d]
    return LogisticModel(w, b, encoder, converged, name=name)


def _penalized_loss(X, y, w, b, lam):
    p = _sigmoid(X @ w + b)
    p = np.clip(p, 1e-12, 1 - 1e-12)
    nll = -float(np.mean(y * np.log(p) + (1 - y) * np.log(1 - p)))
    return nll + 0.5 * lam * float(w @ w)
