"""Numba-jitted kernel implementations (default path).

Same contracts as ``numpy_backend``; the loops here are the njit-compiled
hot paths. Shapley coalition weights are precomputed module-level tables
captured as compile-time constants.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .numpy_backend import _weight_tables

_W_PLUS, _W_MINUS = _weight_tables(64)
_EPS = 1e-12


@njit(cache=False)
def find_best_split(X, is_cat, grad, hess, min_leaf):
    n, m = X.shape
    g_total = 0.0
    h_total = 0.0
    for i in range(n):
        g_total += grad[i]
        h_total += hess[i]
    parent = g_total * g_total / (h_total + _EPS)
    best_gain = 0.0
    best_feat = -1
    best_thr = 0.0
    best_cat = False
    for j in range(m):
        col = X[:, j]
        if is_cat[j]:
            n_codes = 0
            for i in range(n):
                c = int(col[i])
                if c + 1 > n_codes:
                    n_codes = c + 1
            cnt = np.zeros(n_codes, dtype=np.int64)
            gs = np.zeros(n_codes, dtype=np.float64)
            hs = np.zeros(n_codes, dtype=np.float64)
            for i in range(n):
                c = int(col[i])
                cnt[c] += 1
                gs[c] += grad[i]
                hs[c] += hess[i]
            for c in range(n_codes):
                nl = cnt[c]
                if nl < min_leaf or n - nl < min_leaf:
                    continue
                gl = gs[c]
                hl = hs[c]
                gr = g_total - gl
                hr = h_total - hl
                gain = gl * gl / (hl + _EPS) + gr * gr / (hr + _EPS) - parent
                if gain > best_gain + _EPS:
                    best_gain = gain
                    best_feat = j
                    best_thr = float(c)
                    best_cat = True
        else:
            order = np.argsort(col)
            gl = 0.0
            hl = 0.0
            for pos in range(1, n):
                prev = order[pos - 1]
                gl += grad[prev]
                hl += hess[prev]
                if col[order[pos]] == col[prev]:
                    continue
                if pos < min_leaf or n - pos < min_leaf:
                    continue
                gr = g_total - gl
                hr = h_total - hl
                gain = gl * gl / (hl + _EPS) + gr * gr / (hr + _EPS) - parent
                if gain > best_gain + _EPS:
                    best_gain = gain
                    best_feat = j
                    best_thr = 0.5 * (col[prev] + col[order[pos]])
                    best_cat = False
    return best_feat, best_thr, best_cat, best_gain


@njit(cache=False)
def predict_forest(X, feat, thr, cat, left, right, value, lr, base):
    n = X.shape[0]
    n_trees = feat.shape[0]
    out = np.empty(n, dtype=np.float64)
    for i in range(n):
        acc = base
        for t in range(n_trees):
            node = 0
            while feat[t, node] >= 0:
                f = feat[t, node]
                v = X[i, f]
                if cat[t, node]:
                    go_left = v == thr[t, node]
                else:
                    go_left = v <= thr[t, node]
                if go_left:
                    node = left[t, node]
                else:
                    node = right[t, node]
            acc += lr * value[t, node]
        out[i] = acc
    return out


@njit(cache=False)
def forest_shap(x, bg, leaf_value, path_off, path_feat, path_thr, path_cat,
                path_req, n_features):
    n_leaves = len(leaf_value)
    n_bg = bg.shape[0]
    phis = np.zeros(n_features, dtype=np.float64)
    state = np.zeros(n_features, dtype=np.int8)
    touched = np.empty(n_features, dtype=np.int64)
    for b in range(n_bg):
        for li in range(n_leaves):
            lo = path_off[li]
            hi = path_off[li + 1]
            n_touched = 0
            ok = True
            for k in range(lo, hi):
                f = path_feat[k]
                t = path_thr[k]
                if path_cat[k]:
                    x_left = x[f] == t
                    r_left = bg[b, f] == t
                else:
                    x_left = x[f] <= t
                    r_left = bg[b, f] <= t
                req_left = path_req[k] == 0
                x_ok = x_left == req_left
                r_ok = r_left == req_left
                if x_ok and r_ok:
                    continue
                if x_ok:
                    want = 1
                elif r_ok:
                    want = 2
                else:
                    ok = False
                    break
                if state[f] == 0:
                    state[f] = want
                    touched[n_touched] = f
                    n_touched += 1
                elif state[f] != want:
                    ok = False
                    break
            if ok:
                u = 0
                v = 0
                for q in range(n_touched):
                    if state[touched[q]] == 1:
                        u += 1
                    else:
                        v += 1
                if u > 0 or v > 0:
                    lv = leaf_value[li]
                    wp = _W_PLUS[u, v] if u > 0 else 0.0
                    wm = _W_MINUS[u, v] if v > 0 else 0.0
                    for q in range(n_touched):
                        f = touched[q]
                        if state[f] == 1:
                            phis[f] += lv * wp
                        else:
                            phis[f] -= lv * wm
            for q in range(n_touched):
                state[touched[q]] = 0
    return phis / n_bg
