"""Pure-numpy kernel implementations (fallback path, HXAI_NUMBA=0)."""

from __future__ import annotations

import numpy as np

_EPS = 1e-12


def find_best_split(X, is_cat, grad, hess, min_leaf):
    """Best single split of one node by Newton gain.

    X: (n, m) feature values at the node (category codes stored as floats).
    Returns (feature, threshold, cat_split, gain); feature -1 if none valid.
    """
    n, m = X.shape
    g_total = float(grad.sum())
    h_total = float(hess.sum())
    parent = g_total * g_total / (h_total + _EPS)
    best_gain = 0.0
    best = (-1, 0.0, False, 0.0)
    for j in range(m):
        col = X[:, j]
        if is_cat[j]:
            codes = col.astype(np.int64)
            n_codes = int(codes.max()) + 1 if n else 0
            cnt = np.bincount(codes, minlength=n_codes)
            gs = np.bincount(codes, weights=grad, minlength=n_codes)
            hs = np.bincount(codes, weights=hess, minlength=n_codes)
            for c in range(n_codes):
                nl = int(cnt[c])
                if nl < min_leaf or n - nl < min_leaf:
                    continue
                gl, hl = float(gs[c]), float(hs[c])
                gr, hr = g_total - gl, h_total - hl
                gain = gl * gl / (hl + _EPS) + gr * gr / (hr + _EPS) - parent
                if gain > best_gain + _EPS:
                    best_gain = gain
                    best = (j, float(c), True, gain)
        else:
            order = np.argsort(col, kind="mergesort")
            sv = col[order]
            sg = grad[order]
            sh = hess[order]
            cg = np.cumsum(sg)
            ch = np.cumsum(sh)
            # candidate split after position i (1-based prefix), only between
            # distinct values and honoring min_leaf on both sides
            idx = np.arange(1, n)
            valid = (sv[1:] != sv[:-1]) & (idx >= min_leaf) & ((n - idx) >= min_leaf)
            if not valid.any():
                continue
            gl = cg[:-1][valid]
            hl = ch[:-1][valid]
            gr = g_total - gl
            hr = h_total - hl
            gains = gl * gl / (hl + _EPS) + gr * gr / (hr + _EPS) - parent
            k = int(np.argmax(gains))
            if gains[k] > best_gain + _EPS:
                best_gain = float(gains[k])
                pos = idx[valid][k]
                thr = 0.5 * (sv[pos - 1] + sv[pos])
                best = (j, float(thr), False, best_gain)
    return best


def predict_forest(X, feat, thr, cat, left, right, value, lr, base):
    """Raw additive score of a padded forest for every row of X.

    feat/thr/cat/left/right/value: (T, max_nodes) arrays; feat == -1 marks a
    leaf whose value is in ``value``.
    """
    n = X.shape[0]
    out = np.full(n, base, dtype=np.float64)
    n_trees = feat.shape[0]
    rows = np.arange(n)
    for t in range(n_trees):
        node = np.zeros(n, dtype=np.int64)
        active = feat[t, node] >= 0
        while active.any():
            cur = node[active]
            f = feat[t, cur]
            v = X[rows[active], f]
            go_left = np.where(cat[t, cur], v == thr[t, cur], v <= thr[t, cur])
            node[active] = np.where(go_left, left[t, cur], right[t, cur])
            active = feat[t, node] >= 0
        out += lr * value[t, node]
    return out


def forest_shap(x, bg, leaf_value, path_off, path_feat, path_thr, path_cat,
                path_req, n_features):
    """Exact background-replacement attributions of a flattened forest.

    Every leaf contributes through the coalition constraint sets U (features
    that must take the explained row's value to stay on the leaf's path) and
    V (features that must keep the background row's value). ``leaf_value``
    already carries the learning rate.
    """
    n_leaves = len(leaf_value)
    n_bg = bg.shape[0]
    phis = np.zeros(n_features, dtype=np.float64)
    w_plus, w_minus = _WEIGHTS
    state = np.zeros(n_features, dtype=np.int8)  # 0 unseen, 1 in U, 2 in V
    touched = np.empty(n_features, dtype=np.int64)
    for b in range(n_bg):
        r = bg[b]
        for li in range(n_leaves):
            lo, hi = path_off[li], path_off[li + 1]
            n_touched = 0
            ok = True
            for k in range(lo, hi):
                f = path_feat[k]
                t = path_thr[k]
                if path_cat[k]:
                    x_left = x[f] == t
                    r_left = r[f] == t
                else:
                    x_left = x[f] <= t
                    r_left = r[f] <= t
                req_left = path_req[k] == 0
                x_ok = x_left == req_left
                r_ok = r_left == req_left
                if x_ok and r_ok:
                    continue
                if x_ok:
                    want = 1  # f must be in the coalition
                elif r_ok:
                    want = 2  # f must stay out
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
                if u or v:
                    lv = leaf_value[li]
                    wp = w_plus[u, v] if u else 0.0
                    wm = w_minus[u, v] if v else 0.0
                    for q in range(n_touched):
                        f = touched[q]
                        if state[f] == 1:
                            phis[f] += lv * wp
                        else:
                            phis[f] -= lv * wm
            for q in range(n_touched):
                state[touched[q]] = 0
    return phis / n_bg


def _weight_tables(limit):
    """w_plus[u,v] = (u-1)! v! / (u+v)!; w_minus[u,v] = u! (v-1)! / (u+v)!"""
    comb = np.zeros((limit + 1, limit + 1))
    comb[:, 0] = 1.0
    for i in range(1, limit + 1):
        for k in range(1, i + 1):
            comb[i, k] = comb[i - 1, k - 1] + comb[i - 1, k]
    w_plus = np.zeros((limit + 1, limit + 1))
    w_minus = np.zeros((limit + 1, limit + 1))
    for u in range(limit + 1):
        for v in range(limit + 1):
            if u + v > limit:
                continue
            if u > 0:
                w_plus[u, v] = 1.0 / (u * comb[u + v, u])
            if v > 0:
                w_minus[u, v] = 1.0 / (v * comb[u + v, v])
    return w_plus, w_minus


_WEIGHTS = _weight_tables(64)
