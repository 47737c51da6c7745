"""G-computation with a stacked super-learner outcome model.

The outcome model O ~ (T, Z) is a convex stack of a ridge regression, a
gradient-boosted tree ensemble, and k-NN, weighted by non-negative least
squares on out-of-fold predictions. Interventional means come from the
standardization formula: force T, keep each row's Z, average.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import nnls

from ..errors import EnsembleFitFailure, TooFewRows
from ..models.trees import TreeConfig, _TreeBuilder, _tree_values

COMPONENTS = ("ridge", "tree", "knn")


@dataclass
class SuperLearnerConfig:
    components: tuple = COMPONENTS
    folds: int = 5
    seed: int = 0
    knn_k: int = 5
    ridge_l2: float = 1e-3
    tree: TreeConfig = field(default_factory=lambda: TreeConfig(
        n_trees=60, max_depth=3, learning_rate=0.1, min_leaf=10))


class _Ridge:
    def fit(self, X, y, cfg):
        mu = X.mean(axis=0)
        sd = X.std(axis=0)
        sd[sd == 0] = 1.0
        Z = (X - mu) / sd
        A = np.hstack([Z, np.ones((len(y), 1))])
        G = A.T @ A + cfg.ridge_l2 * np.eye(A.shape[1])
        G[-1, -1] -= cfg.ridge_l2  # do not penalize the intercept
        self.sol = np.linalg.solve(G, A.T @ y)
        self.mu, self.sd = mu, sd
        return self

    def predict(self, X):
        Z = (X - self.mu) / self.sd
        return np.hstack([Z, np.ones((len(X), 1))]) @ self.sol


class _Trees:
    def fit(self, X, y, cfg):
        is_cat = np.zeros(X.shape[1], dtype=bool)
        base = float(y.mean())
        raw = np.full(len(y), base)
        trees = []
        tc = cfg.tree
        rows = np.arange(len(y))
        for _ in range(tc.n_trees):
            grad = raw - y
            hess = np.ones(len(y))
            tree = _TreeBuilder(X, is_cat, tc.min_leaf, tc.max_depth).build(rows, grad, hess)
            contrib = _tree_values(tree, X)
            raw = raw + tc.learning_rate * contrib
            trees.append(tree)
            if tree.n_nodes == 1 and abs(tree.value[0]) < 1e-12:
                break
        self.trees, self.base, self.lr = trees, base, tc.learning_rate
        return self

    def predict(self, X):
        out = np.full(X.shape[0], self.base)
        for tree in self.trees:
            out += self.lr * _tree_values(tree, X)
        return out


class _Knn:
    def fit(self, X, y, cfg):
        mu = X.mean(axis=0)
        sd = X.std(axis=0)
        sd[sd == 0] = 1.0
        self.X = (X - mu) / sd
        self.y = y
        self.k = min(cfg.knn_k, len(y))
        self.mu, self.sd = mu, sd
        return self

    def predict(self, X):
        Z = (X - self.mu) / self.sd
        d2 = ((Z[:, None, :] - self.X[None, :, :]) ** 2).sum(axis=2)
        idx = np.argpartition(d2, self.k - 1, axis=1)[:, :self.k]
        return self.y[idx].mean(axis=1)


_FITTERS = {"ridge": _Ridge, "tree": _Trees, "knn": _Knn}


class SuperLearner:
    def __init__(self, models: list, weights: np.ndarray, names: list[str]):
        self.models = models
        self.weights = weights
        self.names = names

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        preds = np.column_stack([m.predict(X) for m in self.models])
        return preds @ self.weights

    def weight_map(self) -> dict:
        return {n: float(w) for n, w in zip(self.names, self.weights)}


def fit_super_learner(features, target, config: SuperLearnerConfig | None = None) -> SuperLearner:
    """Stack components by NNLS on out-of-fold predictions (weights sum to 1)."""
    config = config or SuperLearnerConfig()
    X = np.asarray(features, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(target, dtype=float)
    n = len(y)
    if n < 2 * config.folds:
        raise TooFewRows(f"need >= {2 * config.folds} rows for {config.folds}-fold stacking")
    rng = np.random.default_rng(config.seed)
    perm = rng.permutation(n)
    folds = np.array_split(perm, config.folds)
    names = [c for c in config.components if c in _FITTERS]
    if not names:
        raise EnsembleFitFailure(f"no usable components in {config.components}")
    oof = np.zeros((n, len(names)))
    for holdout in folds:
        mask = np.ones(n, dtype=bool)
        mask[holdout] = False
        for j, name in enumerate(names):
            model = _FITTERS[name]().fit(X[mask], y[mask], config)
            oof[holdout, j] = model.predict(X[holdout])
    if not np.isfinite(oof).all():
        raise EnsembleFitFailure("a component produced non-finite out-of-fold predictions")
    weights, _ = nnls(oof, y)
    total = weights.sum()
    if total <= 0:
        weights = np.full(len(names), 1.0 / len(names))
    else:
        weights = weights / total
    models = [_FITTERS[name]().fit(X, y, config) for name in names]
    return SuperLearner(models, weights, names)


@dataclass
class GcompResult:
    ate: float
    weights: dict
    warning: str | None = None


def g_compute_effect(features, target, treated_features, control_features,
                     config: SuperLearnerConfig | None = None) -> GcompResult:
    """Standardization: mean over rows of o(treated row) - o(control row)."""
    sl = fit_super_learner(features, target, config)
    treated = sl.predict(np.asarray(treated_features, dtype=float))
    control = sl.predict(np.asarray(control_features, dtype=float))
    return GcompResult(ate=float(np.mean(treated - control)), weights=sl.weight_map())
