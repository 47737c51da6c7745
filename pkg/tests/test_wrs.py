import numpy as np
import pytest
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st

from hxai.errors import GroupTooSmall, SchemaError
from hxai.rating import WrsConfig, compute_wrs, welch_t_test
from hxai.tabular import GroupPartition


def _partition(*sizes):
    groups = {}
    pos = 0
    for k, size in enumerate(sizes):
        groups[f"g{k}"] = np.arange(pos, pos + size)
        pos += size
    return GroupPartition(attribute="g", groups=groups)


def test_config_validation():
    with pytest.raises(SchemaError):
        WrsConfig(((0.6, 1.0), (0.95, 0.8)))  # not decreasing
    with pytest.raises(SchemaError):
        WrsConfig(((0.95, 0.5), (0.75, 0.8)))  # weights increase
    with pytest.raises(SchemaError):
        WrsConfig(((1.2, 1.0),))
    cfg = WrsConfig()
    assert cfg.max_per_pair == pytest.approx(2.4)


def test_identical_groups_score_zero():
    outcomes = np.concatenate([np.array([1.0, 2.0, 3.0])] * 3)
    psi = compute_wrs(outcomes, _partition(3, 3, 3))
    assert psi == 0.0


def _two_group_outcomes(n=30, gap=10.0, sd=0.1, seed=0):
    rng = np.random.default_rng(seed)
    a = rng.normal(0.0, sd, n)
    b = rng.normal(gap, sd, n)
    return np.concatenate([a, b]), a, b


def test_two_separated_groups_score_24():
    outcomes, a, b = _two_group_outcomes()
    # oracle: |t| clears even the 95% critical value by orders of magnitude
    res = welch_t_test(a, b)
    crit95 = scipy.stats.t.ppf(0.975, res.dof)
    assert abs(res.t) > 100 * crit95
    psi = compute_wrs(outcomes, _partition(30, 30))
    assert psi == pytest.approx(2.4)


def test_three_separated_groups_score_72():
    rng = np.random.default_rng(1)
    outcomes = np.concatenate([rng.normal(0, 0.1, 30), rng.normal(10, 0.1, 30),
                               rng.normal(20, 0.1, 30)])
    psi = compute_wrs(outcomes, _partition(30, 30, 30))
    assert psi == pytest.approx(7.2)  # 3 pairs x 2.4


def test_group_too_small_names_group():
    outcomes = np.array([1.0, 2.0, 3.0, np.nan])
    part = GroupPartition(attribute="g", groups={"ok": np.array([0, 1]),
                                                 "tiny": np.array([2, 3])})
    with pytest.raises(GroupTooSmall, match="tiny"):
        compute_wrs(outcomes, part)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_symmetry_under_relabeling(seed):
    rng = np.random.default_rng(seed)
    outcomes = rng.normal(size=24)
    base = GroupPartition("g", {"a": np.arange(0, 8), "b": np.arange(8, 16),
                                "c": np.arange(16, 24)})
    relabeled = GroupPartition("g", {"zz": np.arange(0, 8), "m": np.arange(8, 16),
                                     "aa": np.arange(16, 24)})
    assert compute_wrs(outcomes, base) == compute_wrs(outcomes, relabeled)


def test_monotone_in_added_separated_pair():
    rng = np.random.default_rng(2)
    outcomes = np.concatenate([rng.normal(0, 1, 20), rng.normal(0.2, 1, 20)])
    psi_before = compute_wrs(outcomes, _partition(20, 20))
    # add a third group with disjoint support: its two new pairs reject fully
    outcomes3 = np.concatenate([outcomes, rng.normal(100, 0.1, 20)])
    psi_after = compute_wrs(outcomes3, _partition(20, 20, 20))
    assert psi_after >= psi_before
    assert psi_after == pytest.approx(psi_before + 2 * 2.4)


def test_detailed_breakdown():
    outcomes, _, _ = _two_group_outcomes()
    detail = compute_wrs(outcomes, _partition(30, 30), detailed=True)
    assert detail.score == pytest.approx(2.4)
    assert len(detail.pairs) == 1
    (la, lb, t, dof, rejected) = detail.pairs[0]
    assert {la, lb} == {"g0", "g1"}
    assert len(rejected) == 3
