import numpy as np
import pytest

from hxai.errors import AllRowsOneArm
from hxai.rating import MatchConfig, fit_propensity_and_match
from tests.conftest import make_numeric_dataset


def test_balanced_covariates_match_rate():
    # treatment assigned by a fair coin independent of X: almost everything matches
    rng = np.random.default_rng(0)
    n = 600
    X = rng.normal(size=(n, 3))
    flag = rng.integers(0, 2, size=n).astype(float)
    ds = make_numeric_dataset(X, np.zeros(n))
    res = fit_propensity_and_match(ds, flag, ["f0", "f1", "f2"])
    assert res.match_rate >= 0.95


def test_deterministic_treatment_breaks_positivity():
    # treatment == 1[x > 0]: the propensity separates and extreme treated rows
    # find no control within the caliper
    rng = np.random.default_rng(1)
    n = 400
    x = rng.normal(size=n)
    flag = (x > 0).astype(float)
    ds = make_numeric_dataset(x, np.zeros(n))
    res = fit_propensity_and_match(ds, flag, ["f0"])
    assert len(res.unmatched_treated) > 0


def test_exact_covariates_match_at_zero_distance():
    X = np.array([[1.0, 2.0], [1.0, 2.0], [1.0, 2.0], [1.0, 2.0]])
    flag = np.array([1.0, 1.0, 0.0, 0.0])
    ds = make_numeric_dataset(X, np.zeros(4))
    res = fit_propensity_and_match(ds, flag, ["f0", "f1"])
    assert len(res.pairs) == 2
    for t, c in res.pairs:
        assert abs(res.logit[t] - res.logit[c]) == 0.0
    # ties broken toward the lowest control row index
    assert res.pairs[0] == (0, 2)
    assert res.pairs[1] == (1, 2)


def test_one_arm_raises():
    ds = make_numeric_dataset(np.arange(6.0), np.zeros(6))
    with pytest.raises(AllRowsOneArm):
        fit_propensity_and_match(ds, np.ones(6), ["f0"])
    with pytest.raises(AllRowsOneArm):
        fit_propensity_and_match(ds, np.zeros(6), ["f0"])
    with pytest.raises(AllRowsOneArm):
        fit_propensity_and_match(ds, np.array([0, 1, 2, 0, 1, 2.0]), ["f0"])


def test_without_replacement_consumes_controls():
    X = np.zeros((6, 1))
    flag = np.array([1.0, 1.0, 1.0, 0.0, 0.0, 0.0])
    ds = make_numeric_dataset(X, np.zeros(6))
    res = fit_propensity_and_match(ds, flag, ["f0"],
                                   MatchConfig(with_replacement=False))
    controls = [c for _, c in res.pairs]
    assert len(set(controls)) == len(controls)
