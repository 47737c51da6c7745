"""Gradient-boosted (and optionally bagged) binary decision tree ensembles.

Trees split numerics at midpoints (x <= thr goes left) and categoricals on
single-category membership (x == code goes left), so attribution stays per
original feature. Training runs through the split kernel selected in
``hxai.kernels``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..errors import DegenerateOutcome, InvalidConfig
from ..tabular import Dataset
from .base import FeatureMatrix, Predictor


@dataclass
class TreeConfig:
    n_trees: int = 100
    max_depth: int = 3
    learning_rate: float = 0.1
    min_leaf: int = 5
    mode: str = "boosting"  # boosting | bagging
    feature_fraction: float | None = None  # bagging only; None -> sqrt(m)/m
    seed: int = 0

    def validate(self):
        if self.n_trees < 1 or self.max_depth < 1:
            raise InvalidConfig("n_trees and max_depth must be >= 1")
        if self.min_leaf < 1:
            raise InvalidConfig("min_leaf must be >= 1")
        if self.mode not in ("boosting", "bagging"):
            raise InvalidConfig(f"unknown ensemble mode {self.mode!r}")


@dataclass
class Tree:
    feature: np.ndarray   # int64, -1 at leaves
    threshold: np.ndarray  # float64; category code for categorical splits
    is_cat: np.ndarray    # bool
    left: np.ndarray      # int64 child indices
    right: np.ndarray
    value: np.ndarray     # float64 leaf values (0 at internal nodes)

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def depth(self) -> int:
        def walk(node, d):
            if self.feature[node] < 0:
                return d
            return max(walk(self.left[node], d + 1), walk(self.right[node], d + 1))
        return walk(0, 0)

    def n_leaves(self) -> int:
        return int((self.feature < 0).sum())

    def to_json(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "is_cat": self.is_cat.astype(int).tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Tree":
        return cls(
            feature=np.array(obj["feature"], dtype=np.int64),
            threshold=np.array(obj["threshold"], dtype=np.float64),
            is_cat=np.array(obj["is_cat"], dtype=bool),
            left=np.array(obj["left"], dtype=np.int64),
            right=np.array(obj["right"], dtype=np.int64),
            value=np.array(obj["value"], dtype=np.float64),
        )


class _TreeBuilder:
    def __init__(self, X, is_cat, min_leaf, max_depth):
        self.X = X
        self.is_cat = is_cat
        self.min_leaf = min_leaf
        self.max_depth = max_depth
        self.feature = []
        self.threshold = []
        self.cat = []
        self.left = []
        self.right = []
        self.value = []

    def _new_node(self):
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.cat.append(False)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(0.0)
        return len(self.feature) - 1

    def build(self, rows, grad, hess) -> Tree:
        self._grow(self._new_node(), rows, grad, hess, 0)
        return Tree(
            feature=np.array(self.feature, dtype=np.int64),
            threshold=np.array(self.threshold, dtype=np.float64),
            is_cat=np.array(self.cat, dtype=bool),
            left=np.array(self.left, dtype=np.int64),
            right=np.array(self.right, dtype=np.int64),
            value=np.array(self.value, dtype=np.float64),
        )

    def _grow(self, node, rows, grad, hess, depth):
        g = grad[rows]
        h = hess[rows]
        if depth >= self.max_depth or len(rows) < 2 * self.min_leaf:
            self.value[node] = _leaf_value(g, h)
            return
        feat, thr, cat_split, gain = kernels.find_best_split(
            np.ascontiguousarray(self.X[rows]), self.is_cat, g, h, self.min_leaf
        )
        if feat < 0 or gain <= 1e-12:
            self.value[node] = _leaf_value(g, h)
            return
        col = self.X[rows, feat]
        mask = (col == thr) if cat_split else (col <= thr)
        self.feature[node] = int(feat)
        self.threshold[node] = float(thr)
        self.cat[node] = bool(cat_split)
        left = self._new_node()
        right = self._new_node()
        self.left[node] = left
        self.right[node] = right
        self._grow(left, rows[mask], grad, hess, depth + 1)
        self._grow(right, rows[~mask], grad, hess, depth + 1)


def _leaf_value(g, h):
    return float(-g.sum() / (h.sum() + 1e-12))


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-np.clip(z, -35.0, 35.0)))


class TreeEnsembleModel(Predictor):
    """Additive tree ensemble: link(base_score + lr * sum of reached leaves)."""

    def __init__(self, trees: list[Tree], features: FeatureMatrix, learning_rate: float,
                 base_score: float, link: str, task: str, name: str = "tree_ensemble",
                 config: TreeConfig | None = None):
        self.trees = trees
        self.features = features
        self.learning_rate = float(learning_rate)
        self.base_score = float(base_score)
        self.link = link  # identity | sigmoid
        self.task = task
        self.name = name
        self.provenance = "builtin"
        self.config = config
        self._packed = None

    # --- structure counts (T, L, D) ---------------------------------------

    @property
    def n_trees(self) -> int:
        return len(self.trees)

    def max_leaves(self) -> int:
        return max(t.n_leaves() for t in self.trees)

    def max_depth(self) -> int:
        return max(t.depth() for t in self.trees)

    # --- prediction --------------------------------------------------------

    def _pack(self):
        if self._packed is None:
            n = max(t.n_nodes for t in self.trees)
            T = len(self.trees)
            feat = np.full((T, n), -1, dtype=np.int64)
            thr = np.zeros((T, n), dtype=np.float64)
            cat = np.zeros((T, n), dtype=bool)
            left = np.zeros((T, n), dtype=np.int64)
            right = np.zeros((T, n), dtype=np.int64)
            value = np.zeros((T, n), dtype=np.float64)
            for t, tree in enumerate(self.trees):
                k = tree.n_nodes
                feat[t, :k] = tree.feature
                thr[t, :k] = tree.threshold
                cat[t, :k] = tree.is_cat
                left[t, :k] = tree.left
                right[t, :k] = tree.right
                value[t, :k] = tree.value
            self._packed = (feat, thr, cat, left, right, value)
        return self._packed

    def raw_margin_matrix(self, X: np.ndarray) -> np.ndarray:
        feat, thr, cat, left, right, value = self._pack()
        return kernels.predict_forest(
            np.ascontiguousarray(X, dtype=np.float64),
            feat, thr, cat, left, right, value,
            self.learning_rate, self.base_score,
        )

    def raw_margin(self, dataset: Dataset) -> np.ndarray:
        return self.raw_margin_matrix(self.features.matrix(dataset))

    def predict_matrix(self, X: np.ndarray) -> np.ndarray:
        raw = self.raw_margin_matrix(X)
        return _sigmoid(raw) if self.link == "sigmoid" else raw

    def predict(self, dataset: Dataset) -> np.ndarray:
        return self.predict_matrix(self.features.matrix(dataset))

    # --- flattening for the Shapley kernel ---------------------------------

    def shap_paths(self):
        """Flattened per-leaf path constraints across the whole forest.

        Leaf values are pre-scaled by the learning rate so the kernel's
        output attributes base_score + lr * sum(tree) directly.
        """
        leaf_value = []
        path_feat, path_thr, path_cat, path_req = [], [], [], []
        path_off = [0]
        for tree in self.trees:
            stack = [(0, [])]
            while stack:
                node, path = stack.pop()
                if tree.feature[node] < 0:
                    leaf_value.append(self.learning_rate * tree.value[node])
                    for (f, t, c, req) in path:
                        path_feat.append(f)
                        path_thr.append(t)
                        path_cat.append(c)
                        path_req.append(req)
                    path_off.append(len(path_feat))
                else:
                    f = int(tree.feature[node])
                    t = float(tree.threshold[node])
                    c = bool(tree.is_cat[node])
                    stack.append((int(tree.right[node]), path + [(f, t, c, 1)]))
                    stack.append((int(tree.left[node]), path + [(f, t, c, 0)]))
        return (
            np.array(leaf_value, dtype=np.float64),
            np.array(path_off, dtype=np.int64),
            np.array(path_feat, dtype=np.int64),
            np.array(path_thr, dtype=np.float64),
            np.array(path_cat, dtype=bool),
            np.array(path_req, dtype=np.int8),
        )

    # --- serialization -------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "kind": "tree_ensemble",
            "name": self.name,
            "task": self.task,
            "link": self.link,
            "learning_rate": self.learning_rate,
            "base_score": self.base_score,
            "feature_names": self.features.feature_names,
            "is_cat": self.features.is_cat.astype(int).tolist(),
            "n_categories": self.features.n_categories.tolist(),
            "trees": [t.to_json() for t in self.trees],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "TreeEnsembleModel":
        fm = object.__new__(FeatureMatrix)
        fm.feature_names = list(obj["feature_names"])
        fm.is_cat = np.array(obj["is_cat"], dtype=bool)
        fm.n_categories = np.array(obj["n_categories"], dtype=np.int64)
        model = cls(
            trees=[Tree.from_json(t) for t in obj["trees"]],
            features=fm,
            learning_rate=obj["learning_rate"],
            base_score=obj["base_score"],
            link=obj["link"],
            task=obj["task"],
            name=obj.get("name", "tree_ensemble"),
        )
        return model


def _log_loss(y, p):
    p = np.clip(p, 1e-12, 1 - 1e-12)
    return float(-np.mean(y * np.log(p) + (1 - y) * np.log(1 - p)))


def train_tree_ensemble(dataset: Dataset, outcome: str, config: TreeConfig | None = None,
                        name: str = "tree_ensemble") -> TreeEnsembleModel:
    """Fit a boosted (default) or bagged ensemble on the dataset's features.

    Boosting uses Newton steps on log loss (binary outcome) or squared loss
    (numeric outcome); per-round training loss is kept non-increasing by
    damping a round that would regress. Bagging averages trees fit on
    bootstrap samples with optional feature subsampling.
    """
    config = config or TreeConfig()
    config.validate()
    fm = FeatureMatrix(dataset, [n for n in dataset.feature_names])
    X = fm.matrix(dataset)
    f = dataset.feature(outcome)
    if f.kind == "categorical":
        y = dataset.codes(outcome).astype(np.float64)
    else:
        y = dataset.numeric(outcome)
    if np.isnan(y).any():
        raise DegenerateOutcome("outcome contains missing values")
    uniq = np.unique(y)
    classification = f.kind in ("binary", "categorical") or (
        uniq.size == 2 and set(uniq.tolist()) == {0.0, 1.0}
    )
    if classification and uniq.size < 2:
        raise DegenerateOutcome("outcome has a single class")

    n = len(y)
    if config.mode == "bagging":
        return _train_bagging(X, y, fm, config, classification, name)

    if classification:
        p0 = float(np.clip(y.mean(), 1e-6, 1 - 1e-6))
        base = float(np.log(p0 / (1 - p0)))
    else:
        base = float(y.mean())
    raw = np.full(n, base)
    trees: list[Tree] = []
    rows = np.arange(n)

    def loss(r):
        return _log_loss(y, _sigmoid(r)) if classification else float(np.mean((r - y) ** 2))

    prev_loss = loss(raw)
    for _ in range(config.n_trees):
        if classification:
            p = _sigmoid(raw)
            grad = p - y
            hess = np.maximum(p * (1 - p), 1e-6)
        else:
            grad = raw - y
            hess = np.ones(n)
        builder = _TreeBuilder(X, fm.is_cat, config.min_leaf, config.max_depth)
        tree = builder.build(rows, grad, hess)
        contrib = _tree_values(tree, X)
        # damp any round that would increase training loss
        scale = 1.0
        for _attempt in range(12):
            new_loss = loss(raw + config.learning_rate * scale * contrib)
            if new_loss <= prev_loss + 1e-12:
                break
            scale *= 0.5
        else:
            break
        if scale != 1.0:
            tree.value = tree.value * scale
            contrib = contrib * scale
        raw = raw + config.learning_rate * contrib
        prev_loss = loss(raw)
        trees.append(tree)
        if tree.n_nodes == 1 and abs(tree.value[0]) < 1e-12:
            break  # stump with no signal: further rounds cannot progress
    if not trees:
        # degenerate: single stump carrying the base prediction
        trees = [Tree(feature=np.array([-1]), threshold=np.zeros(1), is_cat=np.zeros(1, bool),
                      left=np.array([-1]), right=np.array([-1]), value=np.zeros(1))]
    task = "binary_classification" if classification else "regression"
    link = "sigmoid" if classification else "identity"
    return TreeEnsembleModel(trees, fm, config.learning_rate, base, link, task,
                             name=name, config=config)


def _tree_values(tree: Tree, X: np.ndarray) -> np.ndarray:
    out = np.empty(X.shape[0])
    for i in range(X.shape[0]):
        node = 0
        while tree.feature[node] >= 0:
            f = tree.feature[node]
            v = X[i, f]
            hit = (v == tree.threshold[node]) if tree.is_cat[node] else (v <= tree.threshold[node])
            node = tree.left[node] if hit else tree.right[node]
        out[i] = tree.value[node]
    return out


def _train_bagging(X, y, fm, config, classification, name):
    rng = np.random.default_rng(config.seed)
    n, m = X.shape
    frac = config.feature_fraction
    k = max(1, round((frac if frac else np.sqrt(m) / m) * m))
    trees = []
    for _ in range(config.n_trees):
        boot = rng.integers(0, n, size=n)
        feats = np.sort(rng.choice(m, size=k, replace=False))
        grad = -(y[boot])  # leaf value = mean target in leaf
        hess = np.ones(n)
        builder = _TreeBuilder(_restrict(X[boot], feats), fm.is_cat,
                               config.min_leaf, config.max_depth)
        tree = builder.build(np.arange(n), grad, hess)
        trees.append(tree)
    task = "binary_classification" if classification else "regression"
    return TreeEnsembleModel(trees, fm, 1.0 / len(trees), 0.0, "identity", task,
                             name=name, config=config)


def _restrict(X, feats):
    # constant-fill non-selected columns so no split can use them
    out = np.zeros_like(X)
    out[:, feats] = X[:, feats]
    return out
