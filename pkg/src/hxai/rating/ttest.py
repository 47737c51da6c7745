"""Welch's t-test with its own t-distribution evaluation.

The CDF runs through a continued-fraction regularized incomplete beta
(modified Lentz), so critical-value lookups have no external dependency and
are unit-tested against tabulated quantiles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import SampleTooSmall

_MAX_CF_ITER = 300
_CF_EPS = 1e-15
_TINY = 1e-300


def _betacf(a: float, b: float, x: float) -> float:
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_CF_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            break
    return h


def reg_inc_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log(1.0 - x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def t_cdf(t: float, dof: float) -> float:
    if math.isinf(t):
        return 1.0 if t > 0 else 0.0
    if t == 0.0:
        return 0.5
    x = dof / (dof + t * t)
    half = 0.5 * reg_inc_beta(dof / 2.0, 0.5, x)
    return 1.0 - half if t > 0 else half


def t_two_sided_pvalue(t: float, dof: float) -> float:
    if math.isinf(t):
        return 0.0
    return min(1.0, 2.0 * (1.0 - t_cdf(abs(t), dof)))


def t_critical(confidence: float, dof: float) -> float:
    """Two-sided critical value: the quantile at 1 - (1 - confidence)/2."""
    if not 0.0 < confidence < 1.0:
        raise ValueError(f"confidence must be in (0, 1), got {confidence}")
    if dof <= 0:
        raise ValueError(f"degrees of freedom must be positive, got {dof}")
    q = 1.0 - (1.0 - confidence) / 2.0
    lo, hi = 0.0, 1.0
    while t_cdf(hi, dof) < q:
        hi *= 2.0
        if hi > 1e12:
            return hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if t_cdf(mid, dof) < q:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-13 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


@dataclass
class TTestResult:
    t: float
    pval: float
    dof: float
    flag: str | None = None

    def to_json(self) -> dict:
        return {"t": self.t, "pval": self.pval, "dof": self.dof, "flag": self.flag}


def welch_t_test(a, b) -> TTestResult:
    """Two-sided unequal-variance t-test with Welch-Satterthwaite dof.

    When both samples have zero variance, t is 0 for equal means and an
    infinite sentinel otherwise, flagged rather than raised.
    """
    x = np.asarray(a, dtype=float)
    y = np.asarray(b, dtype=float)
    if len(x) < 2 or len(y) < 2:
        raise SampleTooSmall(f"need >= 2 values per sample, got {len(x)} and {len(y)}")
    if not (np.isfinite(x).all() and np.isfinite(y).all()):
        raise SampleTooSmall("samples must be finite")
    na, nb = len(x), len(y)
    ma, mb = float(x.mean()), float(y.mean())
    va = float(x.var(ddof=1))
    vb = float(y.var(ddof=1))
    if va == 0.0 and vb == 0.0:
        dof = float(na + nb - 2)
        if ma == mb:
            return TTestResult(0.0, 1.0, dof, flag="zero_variance_both_groups")
        t = math.inf if ma > mb else -math.inf
        return TTestResult(t, 0.0, dof, flag="zero_variance_both_groups")
    se2 = va / na + vb / nb
    t = (ma - mb) / math.sqrt(se2)
    dof = se2 * se2 / (
        (va / na) ** 2 / (na - 1) + (vb / nb) ** 2 / (nb - 1)
    )
    return TTestResult(float(t), t_two_sided_pvalue(t, dof), float(dof))
