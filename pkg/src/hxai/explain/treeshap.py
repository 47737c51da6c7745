"""Polynomial-time exact Shapley attribution for tree ensembles.

For one (explained row, background row) pair, the ensemble's value on a
coalition S follows a unique root-to-leaf path: at each split the branch is
taken by the explained row's value when the split feature is in S, else by
the background row's. Each leaf is therefore reached iff S contains the
leaf's "must come from x" features (U) and avoids its "must come from
background" features (V), and the Shapley value of that conjunction game is
closed-form. Summing leaves and averaging background rows reproduces
``shapley_exact`` under the same background-replacement convention.
"""

from __future__ import annotations

import numpy as np

from ..errors import NonTreeModel
from ..models.trees import TreeEnsembleModel
from ..tabular import Dataset
from .. import kernels
from .shapley import ShapResult, background_sample, explained_function


def tree_shap(model, dataset: Dataset, row: int, background: Dataset | None = None,
              seed: int = 0, background_size: int = 100) -> ShapResult:
    if not isinstance(model, TreeEnsembleModel):
        raise NonTreeModel(f"{type(model).__name__} is not a tree ensemble")
    background = background if background is not None else background_sample(
        dataset, background_size, seed)
    names = background.feature_names
    order = model.features.feature_names
    if order != names:
        raise NonTreeModel("background features do not match the model's features")
    X_bg = model.features.matrix(background)
    x = model.features.matrix(dataset.take([row]))[0]
    leaf_value, path_off, path_feat, path_thr, path_cat, path_req = model.shap_paths()
    phis = kernels.forest_shap(
        np.ascontiguousarray(x), np.ascontiguousarray(X_bg), leaf_value,
        path_off, path_feat, path_thr, path_cat, path_req, len(names),
    )
    f, space = explained_function(model)
    phi0 = float(np.mean(model.raw_margin(background)))
    return ShapResult(feature_names=list(names), phi0=phi0, phis=np.asarray(phis),
                      method="tree", output_space=space,
                      metadata={"background_size": background.n_rows, "seed": seed})
