"""Hot numeric kernels with selectable backends.

Two implementations of the same three kernels:

* ``numba`` — ``@njit``-compiled loops (default when numba imports cleanly)
* ``numpy`` — vectorized / plain-python fallback

Selection: set ``HXAI_NUMBA=0`` to force the numpy path; ``HXAI_NUMBA=1``
insists on numba (ImportError if unavailable). Anything else auto-detects.
``benchmarks/bench_kernels.py`` compares the two.

Kernel contracts (identical across backends, asserted by parity tests):

``find_best_split(X, is_cat, grad, hess, min_leaf)``
    -> (feature, threshold, cat_split, gain); feature == -1 when no valid
    split exists. Numeric splits send ``x <= threshold`` left; categorical
    splits send ``x == threshold`` (a category code) left.

``predict_forest(X, feat, thr, cat, left, right, value, lr, base)``
    -> raw additive score per row: base + lr * sum of reached leaf values.

``forest_shap(x, bg, leaf_value, path_off, path_feat, path_thr, path_cat,
              path_req, n_features)``
    -> per-feature attributions of the raw forest score of ``x`` against a
    background sample, exact under the background-replacement convention.
"""

from __future__ import annotations

import os

from . import numpy_backend

_FORCED = os.environ.get("HXAI_NUMBA", "").strip()


def _load_numba_backend():
    from . import numba_backend  # deferred: importing numba is slow
    return numba_backend


if _FORCED == "0":
    _backend = numpy_backend
    BACKEND = "numpy"
elif _FORCED == "1":
    _backend = _load_numba_backend()
    BACKEND = "numba"
else:
    try:
        _backend = _load_numba_backend()
        BACKEND = "numba"
    except ImportError:
        _backend = numpy_backend
        BACKEND = "numpy"


def backend_name() -> str:
    return BACKEND


def get_backend(name: str):
    """Explicit backend module, independent of the env selection (benchmarks)."""
    if name == "numpy":
        return numpy_backend
    if name == "numba":
        return _load_numba_backend()
    raise ValueError(f"unknown kernel backend {name!r}")


find_best_split = _backend.find_best_split
predict_forest = _backend.predict_forest
forest_shap = _backend.forest_shap
