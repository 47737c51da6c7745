"""ATE / DIE behavior, with the confounded synthetics checked against
closed-form regression oracles computed right here."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hxai.errors import EmptyTreatedArm, UnsupportedAdjustment
from hxai.rating import SuperLearnerConfig, TreatmentDef, compute_ate, compute_die, g_compute_ate
from hxai.tabular import CausalSpec, FeatureSchema, dataset_from_rows
from tests.conftest import ConstantModel, LinearProbModel, make_numeric_dataset


def _spec(**kw):
    base = dict(treatment="f0", outcome="y", protected=())
    base.update(kw)
    return CausalSpec(**base)


FAST_LEARNER = SuperLearnerConfig(seed=0)


# --- interventional transforms ---------------------------------------------------

def test_constant_model_zero_ate():
    ds = make_numeric_dataset(np.linspace(1, 9, 40), np.zeros(40))
    res = compute_ate(ds, ConstantModel(0.7), _spec(), TreatmentDef(
        mode="interventional_transform", feature="f0", op="scale", value=0.5))
    assert res.ate_observed == 0.0


def test_linear_model_halving_credit():
    # f = 0.1 * (credit/1000) on rows with credit = 10000: scaling by 0.5
    # moves every prediction from 1.0 to 0.5
    credit = np.full(25, 10_000.0)
    ds = make_numeric_dataset(credit, np.zeros(25))
    model = LinearProbModel([0.1 / 1000])
    res = compute_ate(ds, model, _spec(), TreatmentDef(
        mode="interventional_transform", feature="f0", op="scale", value=0.5))
    assert res.ate_observed == pytest.approx(-0.5, abs=1e-12)


def test_identity_scale_is_exact_zero():
    rng = np.random.default_rng(0)
    ds = make_numeric_dataset(rng.normal(size=(60, 2)), np.zeros(60))
    model = LinearProbModel([0.3, -0.2], 0.4, ["f0", "f1"])
    res = compute_ate(ds, model, _spec(), TreatmentDef(
        mode="interventional_transform", feature="f0", op="scale", value=1.0))
    assert res.ate_observed == 0.0


def test_psm_rejected_for_transforms():
    ds = make_numeric_dataset(np.arange(10.0), np.zeros(10))
    with pytest.raises(UnsupportedAdjustment):
        compute_ate(ds, ConstantModel(), _spec(), TreatmentDef(
            mode="interventional_transform", feature="f0", op="shift", value=1.0),
            adjust="psm")


# --- observational contrasts ------------------------------------------------------

def _binary_arm_dataset(n=400, seed=0, effect=2.0, confounded=True):
    """T ~ Bernoulli(sigmoid(1.5 Z)), O = effect*T + 3Z + noise."""
    rng = np.random.default_rng(seed)
    z = rng.normal(size=n)
    p = 1 / (1 + np.exp(-1.5 * z)) if confounded else np.full(n, 0.5)
    t = (rng.random(n) < p).astype(float)
    o = effect * t + 3 * z + rng.normal(size=n) * 0.1
    schema = [FeatureSchema("t", "binary"), FeatureSchema("z", "numeric"),
              FeatureSchema("o", "numeric")]
    rows = [[float(t[i]), float(z[i]), float(o[i])] for i in range(n)]
    return dataset_from_rows(schema, rows, "o"), t, z, o


def test_arm_contrast_and_sign_flip():
    ds, t, z, o = _binary_arm_dataset(seed=1)
    spec = CausalSpec(treatment="t", outcome="o", protected=("z",))
    tdef = TreatmentDef(mode="observational_contrast", level_p=1.0, level_p0=0.0)
    res = compute_ate(ds, None, spec, tdef, outcomes=o)
    naive = o[t == 1].mean() - o[t == 0].mean()
    assert res.ate_observed == pytest.approx(naive, abs=1e-12)
    flipped = TreatmentDef(mode="observational_contrast", level_p=0.0, level_p0=1.0)
    res2 = compute_ate(ds, None, spec, flipped, outcomes=o)
    assert res2.ate_observed == pytest.approx(-res.ate_observed, abs=1e-12)


def test_empty_arm():
    ds, t, z, o = _binary_arm_dataset(seed=2)
    spec = CausalSpec(treatment="t", outcome="o", protected=("z",))
    with pytest.raises(EmptyTreatedArm):
        compute_ate(ds, None, spec, TreatmentDef(
            mode="observational_contrast", level_p=7.0, level_p0=0.0), outcomes=o)


def test_uniform_treatment_yields_zero():
    schema = [FeatureSchema("t", "binary"), FeatureSchema("o", "numeric")]
    rows = [[1.0, float(i)] for i in range(10)]
    ds = dataset_from_rows(schema, rows, "o")
    spec = CausalSpec(treatment="t", outcome="o")
    res = compute_ate(ds, None, spec, TreatmentDef(
        mode="observational_contrast", level_p=1.0, level_p0=0.0),
        outcomes=ds.numeric("o"))
    assert res.ate_observed == 0.0
    assert res.diagnostics.get("warning") == "uniform_treatment"


def test_psm_recovers_binary_effect():
    ds, t, z, o = _binary_arm_dataset(n=2000, seed=3)
    spec = CausalSpec(treatment="t", outcome="o", protected=("z",))
    tdef = TreatmentDef(mode="observational_contrast", level_p=1.0, level_p0=0.0)
    res = compute_ate(ds, None, spec, tdef, adjust="psm", outcomes=o)
    assert res.ate_observed > 2.5  # confounding inflates the naive contrast
    assert 1.7 <= res.ate_deconfounded <= 2.3
    assert res.diagnostics["matched_pairs"] > 500


def test_gcomp_recovers_binary_effect():
    ds, t, z, o = _binary_arm_dataset(n=2000, seed=4)
    spec = CausalSpec(treatment="t", outcome="o", protected=("z",))
    tdef = TreatmentDef(mode="observational_contrast", level_p=1.0, level_p0=0.0)
    res = compute_ate(ds, None, spec, tdef, adjust="gcomp", outcomes=o,
                      learner=FAST_LEARNER)
    assert 1.8 <= res.ate_deconfounded <= 2.2


# --- continuous treatment via standardization --------------------------------------

def _continuous_dataset(n=2000, seed=5):
    """T = Z + noise, O = 2T + 3Z + noise(0.1)."""
    rng = np.random.default_rng(seed)
    z = rng.normal(size=n)
    t = z + rng.normal(size=n)
    o = 2 * t + 3 * z + rng.normal(size=n) * 0.1
    schema = [FeatureSchema("t", "numeric"), FeatureSchema("z", "numeric"),
              FeatureSchema("o", "numeric")]
    rows = [[float(t[i]), float(z[i]), float(o[i])] for i in range(n)]
    return dataset_from_rows(schema, rows, "o"), t, z, o


def _ols_slope(x, y):
    x1 = np.column_stack([x, np.ones(len(x))])
    return float(np.linalg.lstsq(x1, y, rcond=None)[0][0])


def test_gcomp_continuous_recovers_effect():
    ds, t, z, o = _continuous_dataset()
    spec = CausalSpec(treatment="t", outcome="o", protected=("z",))
    tdef = TreatmentDef(mode="observational_contrast", level_p=1.0, level_p0=0.0)
    ate = g_compute_ate(ds, spec, tdef, FAST_LEARNER)
    assert 1.8 <= ate <= 2.2
    # unadjusted standardization tracks the raw simple-regression slope,
    # which the confounding biases upward
    res = compute_ate(ds, None, spec, tdef, adjust="none", outcomes=o,
                      learner=FAST_LEARNER)
    slope = _ols_slope(t, o)
    assert slope > 3.0
    assert res.ate_observed == pytest.approx(slope, rel=0.15)


def test_die_confounded_matches_regression_oracle():
    ds, t, z, o = _continuous_dataset(seed=6)
    spec = CausalSpec(treatment="t", outcome="o", protected=("z",))
    tdef = TreatmentDef(mode="observational_contrast", level_p=1.0, level_p0=0.0)
    res = compute_die(ds, None, spec, tdef, adjust="gcomp", outcomes=o,
                      learner=FAST_LEARNER)
    # oracle: |ATE_o - 2| * 100 from the closed-form simple regression
    oracle = abs(abs(_ols_slope(t, o)) - 2.0) * 100.0
    assert res.die_percent == pytest.approx(oracle, rel=0.15)
    assert "signed_die" in res.diagnostics


def test_die_unconfounded_small():
    rng = np.random.default_rng(7)
    n = 2000
    z = rng.normal(size=n)
    t = rng.normal(size=n)  # independent of z
    o = 2 * t + 3 * z + rng.normal(size=n) * 0.1
    schema = [FeatureSchema("t", "numeric"), FeatureSchema("z", "numeric"),
              FeatureSchema("o", "numeric")]
    ds = dataset_from_rows(schema, [[float(t[i]), float(z[i]), float(o[i])]
                                    for i in range(n)], "o")
    spec = CausalSpec(treatment="t", outcome="o", protected=("z",))
    tdef = TreatmentDef(mode="observational_contrast", level_p=1.0, level_p0=0.0)
    res = compute_die(ds, None, spec, tdef, adjust="gcomp", outcomes=o,
                      learner=FAST_LEARNER)
    assert res.die_percent < 5.0


def test_die_zero_variance_outcome():
    ds, t, z, o = _binary_arm_dataset(seed=8)
    spec = CausalSpec(treatment="t", outcome="o", protected=("z",))
    tdef = TreatmentDef(mode="observational_contrast", level_p=1.0, level_p0=0.0)
    res = compute_die(ds, None, spec, tdef, adjust="gcomp",
                      outcomes=np.zeros(ds.n_rows), learner=FAST_LEARNER)
    assert res.die_percent == pytest.approx(0.0, abs=1e-9)


def test_treatment_def_validation():
    with pytest.raises(Exception):
        TreatmentDef(mode="interventional_transform", op="scale", value=-1.0)
    with pytest.raises(Exception):
        TreatmentDef(mode="observational_contrast", level_p=None, level_p0=1)
    with pytest.raises(Exception):
        TreatmentDef(mode="nonsense")


@settings(max_examples=20, deadline=None)
@given(st.floats(0.1, 3.0))
def test_scale_identity_property(k):
    ds = make_numeric_dataset(np.linspace(-2, 2, 30), np.zeros(30))
    model = LinearProbModel([0.25], 0.5)
    up = compute_ate(ds, model, _spec(), TreatmentDef(
        mode="interventional_transform", feature="f0", op="scale", value=k))
    if k == 1.0:
        assert up.ate_observed == 0.0
