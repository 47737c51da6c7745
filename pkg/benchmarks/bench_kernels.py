"""Benchmark the numba and numpy kernel backends on the three hot paths.

Usage: python benchmarks/bench_kernels.py [--repeats 5]

Reports per-kernel wall time (best of N) for both backends plus the
speedup. Numba timings exclude the one-off JIT compile (a warmup call runs
first); the compile cost is reported separately.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from hxai.kernels import get_backend
from hxai.models import TreeConfig, train_tree_ensemble
from hxai.tabular import FeatureSchema, dataset_from_rows


def _best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def _make_inputs():
    rng = np.random.default_rng(0)
    n, m = 20_000, 12
    X_split = rng.normal(size=(n, m))
    X_split[:, 3] = rng.integers(0, 6, size=n)
    is_cat = np.zeros(m, dtype=bool)
    is_cat[3] = True
    grad = rng.normal(size=n)
    hess = np.ones(n)

    # a trained ensemble provides realistic packed trees and shap paths
    n_train = 2000
    Xt = rng.normal(size=(n_train, m))
    y = Xt @ rng.normal(size=m) + rng.normal(size=n_train) * 0.2
    schema = [FeatureSchema(f"f{j}", "numeric") for j in range(m)]
    schema.append(FeatureSchema("y", "numeric"))
    rows = [list(map(float, Xt[i])) + [float(y[i])] for i in range(n_train)]
    ds = dataset_from_rows(schema, rows, "y")
    model = train_tree_ensemble(ds, "y", TreeConfig(
        n_trees=100, max_depth=4, learning_rate=0.1, min_leaf=5))
    packed = model._pack()
    paths = model.shap_paths()
    X_pred = rng.normal(size=(200_000, m))
    x_row = Xt[0]
    bg = Xt[:100]
    return {
        "split": (X_split, is_cat, grad, hess, 10),
        "predict": (X_pred, *packed, model.learning_rate, model.base_score),
        "shap": (x_row, bg, *paths, m),
    }


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    inputs = _make_inputs()
    backends = {}
    compile_cost = {}
    for name in ("numpy", "numba"):
        try:
            backend = get_backend(name)
        except ImportError:
            print(f"{name}: unavailable, skipping")
            continue
        t0 = time.perf_counter()
        backend.find_best_split(*inputs["split"])
        backend.predict_forest(*inputs["predict"])
        backend.forest_shap(*inputs["shap"])
        compile_cost[name] = time.perf_counter() - t0
        backends[name] = backend

    rows = []
    for kernel in ("split", "predict", "shap"):
        timings = {}
        for name, backend in backends.items():
            fn = getattr(backend, {"split": "find_best_split",
                                   "predict": "predict_forest",
                                   "shap": "forest_shap"}[kernel])
            timings[name] = _best_of(lambda: fn(*inputs[kernel]), args.repeats)
        rows.append((kernel, timings))

    print(f"{'kernel':<10} {'numpy (s)':>12} {'numba (s)':>12} {'speedup':>9}")
    for kernel, timings in rows:
        np_t = timings.get("numpy", float("nan"))
        nb_t = timings.get("numba", float("nan"))
        speed = np_t / nb_t if nb_t and nb_t == nb_t else float("nan")
        print(f"{kernel:<10} {np_t:>12.4f} {nb_t:>12.4f} {speed:>8.1f}x")
    for name, cost in compile_cost.items():
        print(f"first-call cost ({name}, includes JIT compile for numba): {cost:.2f}s")


if __name__ == "__main__":
    main()
