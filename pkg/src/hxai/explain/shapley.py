"""Shapley attributions under the background-replacement (interventional)
convention: v(S) is the mean prediction over background rows whose features
in S are overwritten by the explained row's values.

Exact enumeration covers up to ``max_features`` (2^M coalitions); beyond
that a seeded permutation-sampling estimator takes over, reporting its
efficiency-gap residual. Tree ensembles are explained on their raw margin
so attributions stay additive.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial

import numpy as np

from ..errors import TooManyFeatures
from ..models.trees import TreeEnsembleModel
from ..tabular import Column, Dataset


@dataclass
class ShapResult:
    feature_names: list[str]
    phi0: float
    phis: np.ndarray
    method: str  # exact | tree | sampled
    # coalition flags follow the background-replacement convention: a feature
    # "in" a coalition takes the explained row's value, otherwise background
    coalition_convention: str = "background_replacement"
    output_space: str = "prediction"  # prediction | margin
    metadata: dict = field(default_factory=dict)

    @property
    def total(self) -> float:
        return float(self.phi0 + self.phis.sum())

    def by_feature(self) -> dict:
        return {n: float(p) for n, p in zip(self.feature_names, self.phis)}

    def to_json(self) -> dict:
        return {
            "feature_names": self.feature_names,
            "phi0": float(self.phi0),
            "phis": [float(p) for p in self.phis],
            "method": self.method,
            "coalition_convention": self.coalition_convention,
            "output_space": self.output_space,
            "metadata": self.metadata,
        }


def background_sample(dataset: Dataset, size: int = 100, seed: int = 0) -> Dataset:
    if dataset.n_rows <= size:
        return dataset
    rng = np.random.default_rng(seed)
    idx = np.sort(rng.choice(dataset.n_rows, size=size, replace=False))
    return dataset.take(idx)


def explained_function(model):
    """The scalar function being attributed plus its output-space tag.

    Boosted classifiers are explained on the raw margin (log-odds) because
    only the margin is additive across trees; everything else is explained
    on the prediction itself.
    """
    if isinstance(model, TreeEnsembleModel) and model.link == "sigmoid":
        return model.raw_margin, "margin"
    if isinstance(model, TreeEnsembleModel):
        return model.raw_margin, "prediction"
    return model.predict, "prediction"


def _mixed_predict(f, x_dataset: Dataset, row: int, background: Dataset,
                   masks: np.ndarray) -> np.ndarray:
    """Evaluate f on |masks| coalitions x |background| mixed rows.

    masks: (C, M) booleans over original features; True takes the explained
    row's value. Returns (C,) coalition means.
    """
    names = background.feature_names
    B = background.n_rows
    C = masks.shape[0]
    cols = {}
    for j, name in enumerate(names):
        bg_col = background.columns[name]
        x_val = x_dataset.columns[name].values[row]
        x_miss = bool(x_dataset.columns[name].missing[row])
        take_x = np.repeat(masks[:, j], B)
        vals = np.tile(bg_col.values, C).copy()
        miss = np.tile(bg_col.missing, C).copy()
        vals[take_x] = x_val
        miss[take_x] = x_miss
        cols[name] = Column(vals, miss)
    out_name = background.outcome_name
    out_col = background.columns[out_name]
    cols[out_name] = Column(np.tile(out_col.values, C), np.tile(out_col.missing, C))
    mixed = Dataset(background.schema, cols, out_name)
    preds = np.asarray(f(mixed), dtype=float)
    return preds.reshape(C, B).mean(axis=1)


def shapley_exact(model, dataset: Dataset, row: int, background: Dataset | None = None,
                  max_features: int = 14, seed: int = 0,
                  background_size: int = 100) -> ShapResult:
    """Full 2^M enumeration of coalition values."""
    background = background if background is not None else background_sample(
        dataset, background_size, seed)
    names = background.feature_names
    M = len(names)
    if M > max_features:
        raise TooManyFeatures(
            f"{M} features exceed the exact-enumeration cap {max_features}; "
            "use shapley_sampled"
        )
    f, space = explained_function(model)
    n_coal = 1 << M
    masks = np.zeros((n_coal, M), dtype=bool)
    for s in range(n_coal):
        for j in range(M):
            masks[s, j] = bool(s >> j & 1)
    values = np.empty(n_coal)
    chunk = max(1, 65536 // background.n_rows)
    for start in range(0, n_coal, chunk):
        end = min(n_coal, start + chunk)
        values[start:end] = _mixed_predict(f, dataset, row, background,
                                           masks[start:end])
    sizes = masks.sum(axis=1)
    w = np.array([factorial(k) * factorial(M - k - 1) / factorial(M) for k in range(M)])
    phis = np.zeros(M)
    for j in range(M):
        with_j = (np.arange(n_coal) >> j & 1).astype(bool)
        s_without = np.arange(n_coal)[~with_j]
        s_with = s_without | (1 << j)
        k = sizes[s_without]
        phis[j] = float(np.sum(w[k] * (values[s_with] - values[s_without])))
    phi0 = float(values[0])
    return ShapResult(feature_names=list(names), phi0=phi0, phis=phis,
                      method="exact", output_space=space,
                      metadata={"background_size": background.n_rows, "seed": seed})


def shapley_sampled(model, dataset: Dataset, row: int, background: Dataset | None = None,
                    n_permutations: int = 2000, seed: int = 0,
                    background_size: int = 100) -> ShapResult:
    """Seeded permutation-sampling estimator; efficiency gap reported."""
    background = background if background is not None else background_sample(
        dataset, background_size, seed)
    names = background.feature_names
    M = len(names)
    f, space = explained_function(model)
    rng = np.random.default_rng(seed)
    phis = np.zeros(M)
    # evaluate prefix coalitions permutation by permutation, chunked
    per_chunk = max(1, 65536 // max(1, (M + 1) * background.n_rows))
    perms = np.stack([rng.permutation(M) for _ in range(n_permutations)])
    base_val = None
    full_val = None
    for start in range(0, n_permutations, per_chunk):
        end = min(n_permutations, start + per_chunk)
        block = perms[start:end]
        masks = np.zeros(((end - start) * (M + 1), M), dtype=bool)
        for bi, perm in enumerate(block):
            offset = bi * (M + 1)
            for k in range(M):
                masks[offset + k + 1] = masks[offset + k]
                masks[offset + k + 1, perm[k]] = True
        vals = _mixed_predict(f, dataset, row, background, masks)
        for bi, perm in enumerate(block):
            offset = bi * (M + 1)
            diffs = vals[offset + 1:offset + M + 1] - vals[offset:offset + M]
            phis[perm] += diffs
        if base_val is None:
            base_val = float(vals[0])
            full_val = float(vals[M])
    phis /= n_permutations
    gap = float(full_val - (base_val + phis.sum()))
    return ShapResult(feature_names=list(names), phi0=base_val, phis=phis,
                      method="sampled", output_space=space,
                      metadata={"background_size": background.n_rows, "seed": seed,
                                "n_permutations": n_permutations,
                                "efficiency_gap": gap})


def local_attribution(model, dataset: Dataset, row: int, background: Dataset | None = None,
                      max_features: int = 14, seed: int = 0,
                      background_size: int = 100, n_permutations: int = 2000) -> ShapResult:
    """Dispatch: TreeSHAP for tree ensembles, exact enumeration when small,
    permutation sampling otherwise."""
    from .treeshap import tree_shap

    background = background if background is not None else background_sample(
        dataset, background_size, seed)
    if isinstance(model, TreeEnsembleModel):
        return tree_shap(model, dataset, row, background)
    M = len(background.feature_names)
    if M <= max_features:
        return shapley_exact(model, dataset, row, background, max_features, seed)
    return shapley_sampled(model, dataset, row, background, n_permutations, seed)


def global_attribution(model, dataset: Dataset, instances: list[int] | None = None,
                       background: Dataset | None = None, seed: int = 0,
                       background_size: int = 100, max_features: int = 14,
                       n_permutations: int = 2000, sample_instances: int = 25):
    """Mean |phi| per feature over a seeded instance sample."""
    rng = np.random.default_rng(seed)
    if instances is None:
        k = min(sample_instances, dataset.n_rows)
        instances = sorted(rng.choice(dataset.n_rows, size=k, replace=False).tolist())
    background = background if background is not None else background_sample(
        dataset, background_size, seed)
    total = None
    per_instance = []
    for row in instances:
        res = local_attribution(model, dataset, row, background,
                                max_features=max_features, seed=seed,
                                n_permutations=n_permutations)
        per_instance.append(res)
        total = np.abs(res.phis) if total is None else total + np.abs(res.phis)
    mean_abs = total / len(instances)
    return {
        "feature_names": per_instance[0].feature_names,
        "mean_abs_phi": [float(v) for v in mean_abs],
        "instances": [int(i) for i in instances],
        "method": per_instance[0].method,
        "output_space": per_instance[0].output_space,
        "metadata": {"seed": seed, "background_size": background.n_rows},
    }
