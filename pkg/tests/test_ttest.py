"""The t machinery is unit-tested against scipy (independent reference) and
hard-coded table values."""

import math

import numpy as np
import pytest
import scipy.stats

from hxai.errors import SampleTooSmall
from hxai.rating import reg_inc_beta, t_cdf, t_critical, welch_t_test

# classic two-sided critical values: (confidence, dof) -> t
TABLE = {
    (0.95, 1): 12.7062,
    (0.95, 10): 2.2281,
    (0.95, 30): 2.0423,
    (0.95, 120): 1.9799,
    (0.75, 10): 1.2213,
    (0.60, 10): 0.8791,
    (0.90, 20): 1.7247,
    (0.99, 5): 4.0321,
}


@pytest.mark.parametrize("key,expected", sorted(TABLE.items()))
def test_tabulated_critical_values(key, expected):
    conf, dof = key
    assert t_critical(conf, dof) == pytest.approx(expected, abs=1e-3)


@pytest.mark.parametrize("conf", [0.6, 0.75, 0.9, 0.95, 0.99])
@pytest.mark.parametrize("dof", [1.5, 3.0, 7.7, 29.0, 240.0])
def test_critical_values_match_scipy(conf, dof):
    q = 1 - (1 - conf) / 2
    assert t_critical(conf, dof) == pytest.approx(scipy.stats.t.ppf(q, dof), rel=1e-9)


@pytest.mark.parametrize("t", [-5.0, -1.2, 0.0, 0.3, 2.7, 9.0])
@pytest.mark.parametrize("dof", [1.0, 4.5, 12.0, 100.0])
def test_cdf_matches_scipy(t, dof):
    assert t_cdf(t, dof) == pytest.approx(scipy.stats.t.cdf(t, dof), abs=1e-12)


@pytest.mark.parametrize("a,b,x", [(0.5, 0.5, 0.3), (2.0, 3.0, 0.7), (10.0, 0.5, 0.99),
                                   (7.3, 2.2, 0.01)])
def test_incomplete_beta_matches_scipy(a, b, x):
    assert reg_inc_beta(a, b, x) == pytest.approx(scipy.stats.beta.cdf(x, a, b), abs=1e-12)


def test_identical_samples():
    res = welch_t_test([1, 2, 3], [1, 2, 3])
    assert res.t == 0.0
    assert res.pval == 1.0


def test_separated_normals_reject():
    rng = np.random.default_rng(0)
    a = rng.normal(0, 1, 50)
    b = rng.normal(1, 1, 50)
    res = welch_t_test(a, b)
    # independent reference for the p-value
    ref = scipy.stats.ttest_ind(a, b, equal_var=False)
    assert res.pval < 0.01
    assert res.t == pytest.approx(ref.statistic, rel=1e-12)
    assert res.pval == pytest.approx(ref.pvalue, rel=1e-9)


def test_welch_dof_formula():
    rng = np.random.default_rng(3)
    a = rng.normal(0, 1, 11)
    b = rng.normal(0, 3, 23)
    res = welch_t_test(a, b)
    va, vb = a.var(ddof=1), b.var(ddof=1)
    na, nb = len(a), len(b)
    expected = (va / na + vb / nb) ** 2 / (
        (va / na) ** 2 / (na - 1) + (vb / nb) ** 2 / (nb - 1))
    assert res.dof == pytest.approx(expected, rel=1e-12)


def test_zero_variance_sentinel():
    res = welch_t_test([0.0, 0.0], [5.0, 5.0])
    assert math.isinf(res.t) and res.t < 0
    assert res.pval == 0.0
    assert res.flag == "zero_variance_both_groups"
    assert res.dof > 0
    eq = welch_t_test([2.0, 2.0], [2.0, 2.0])
    assert eq.t == 0.0 and eq.pval == 1.0


def test_sample_too_small():
    with pytest.raises(SampleTooSmall):
        welch_t_test([1.0], [1.0, 2.0])
    with pytest.raises(SampleTooSmall):
        welch_t_test([1.0, np.inf], [1.0, 2.0])
