"""Cross-backend parity: the numba and numpy kernels must agree."""

import numpy as np
import pytest

from hxai.kernels import backend_name, get_backend

numpy_backend = get_backend("numpy")
try:
    numba_backend = get_backend("numba")
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba_backend = None
    HAVE_NUMBA = False

needs_numba = pytest.mark.skipif(not HAVE_NUMBA, reason="numba unavailable")


def _random_node(seed, n=400, m=5):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, m))
    X[:, 1] = rng.integers(0, 5, size=n)
    is_cat = np.zeros(m, dtype=bool)
    is_cat[1] = True
    grad = rng.normal(size=n)
    hess = np.ones(n)
    return X, is_cat, grad, hess


@needs_numba
@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_split_parity(seed):
    X, is_cat, grad, hess = _random_node(seed)
    a = numba_backend.find_best_split(X, is_cat, grad, hess, 5)
    b = numpy_backend.find_best_split(X, is_cat, grad, hess, 5)
    assert a[0] == b[0]
    assert a[1] == pytest.approx(b[1], abs=1e-12)
    assert a[2] == b[2]
    assert a[3] == pytest.approx(b[3], rel=1e-9)


def _packed_forest(seed, n_trees=4, m=5):
    rng = np.random.default_rng(seed)
    nodes = 7
    feat = np.full((n_trees, nodes), -1, dtype=np.int64)
    thr = np.zeros((n_trees, nodes))
    cat = np.zeros((n_trees, nodes), dtype=bool)
    left = np.zeros((n_trees, nodes), dtype=np.int64)
    right = np.zeros((n_trees, nodes), dtype=np.int64)
    value = rng.normal(size=(n_trees, nodes))
    for t in range(n_trees):
        # root -> (internal node 1, leaf 2); node 1 -> (leaf 3, leaf 4)
        feat[t, 0] = rng.integers(0, m)
        thr[t, 0] = rng.normal()
        left[t, 0], right[t, 0] = 1, 2
        feat[t, 1] = rng.integers(0, m)
        thr[t, 1] = rng.normal()
        left[t, 1], right[t, 1] = 3, 4
    return feat, thr, cat, left, right, value


@needs_numba
def test_predict_parity():
    feat, thr, cat, left, right, value = _packed_forest(7)
    rng = np.random.default_rng(9)
    X = rng.normal(size=(300, 5))
    a = numba_backend.predict_forest(X, feat, thr, cat, left, right, value, 0.3, 0.5)
    b = numpy_backend.predict_forest(X, feat, thr, cat, left, right, value, 0.3, 0.5)
    np.testing.assert_allclose(a, b, rtol=0, atol=0)


@needs_numba
def test_forest_shap_parity():
    from hxai.models import TreeConfig, train_tree_ensemble
    from tests.conftest import make_numeric_dataset

    rng = np.random.default_rng(3)
    X = rng.normal(size=(200, 4))
    y = X[:, 0] - 2 * X[:, 2] + rng.normal(size=200) * 0.1
    ds = make_numeric_dataset(X, y)
    model = train_tree_ensemble(ds, "y", TreeConfig(n_trees=10, max_depth=3,
                                                    learning_rate=0.3, min_leaf=5))
    paths = model.shap_paths()
    x = model.features.matrix(ds.take([0]))[0]
    bg = model.features.matrix(ds.take(list(range(30))))
    a = numba_backend.forest_shap(x, bg, *paths, 4)
    b = numpy_backend.forest_shap(x, bg, *paths, 4)
    np.testing.assert_allclose(a, b, atol=1e-12)


def test_weight_tables_match_factorials():
    from math import factorial

    w_plus, w_minus = numpy_backend._weight_tables(12)
    for u in range(1, 8):
        for v in range(0, 8 - u):
            expected = factorial(u - 1) * factorial(v) / factorial(u + v)
            assert w_plus[u, v] == pytest.approx(expected, rel=1e-12)
    for v in range(1, 8):
        for u in range(0, 8 - v):
            expected = factorial(u) * factorial(v - 1) / factorial(u + v)
            assert w_minus[u, v] == pytest.approx(expected, rel=1e-12)


def test_active_backend_is_valid():
    assert backend_name() in ("numpy", "numba")
