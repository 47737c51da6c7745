"""Average treatment effect and deconfounded impact estimation.

Two treatment styles:

* interventional transforms (scale/set/shift a numeric feature) are applied
  to copies of every row - a direct do-operator needing no matching;
* observational contrasts compare a treated level against a control level,
  deconfounded by propensity matching (discrete treatments) or
  G-computation (continuous treatments).

Sign convention: treated minus control. DIE% reports the absolute-magnitude
difference convention; the signed variant stays in the diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import (
    EmptyTreatedArm,
    SchemaError,
    UnsupportedAdjustment,
)
from ..models.base import OneHotEncoder, Predictor
from ..tabular import CausalSpec, Column, Dataset, apply_transform
from .gcomp import SuperLearnerConfig, g_compute_effect
from .psm import MatchConfig, fit_propensity_and_match

TRANSFORM_OPS = ("scale", "set", "shift")


@dataclass
class TreatmentDef:
    """Either observational_contrast(level_p, level_p0) or
    interventional_transform(op, value) on a numeric feature."""

    mode: str  # observational_contrast | interventional_transform
    feature: str | None = None  # defaults to the causal spec's treatment
    op: str | None = None
    value: float | None = None
    level_p: object = None
    level_p0: object = None

    def __post_init__(self):
        if self.mode == "interventional_transform":
            if self.op not in TRANSFORM_OPS:
                raise SchemaError(f"unknown transform op {self.op!r}")
            if self.value is None:
                raise SchemaError("interventional transform needs a value")
            if self.op == "scale" and not self.value > 0:
                raise SchemaError("scale factor must be positive")
        elif self.mode == "observational_contrast":
            if self.level_p is None or self.level_p0 is None:
                raise SchemaError("observational contrast needs level_p and level_p0")
        else:
            raise SchemaError(f"unknown treatment mode {self.mode!r}")

    def resolved_feature(self, spec: CausalSpec) -> str:
        return self.feature or spec.treatment

    def describe(self) -> str:
        if self.mode == "interventional_transform":
            sym = {"scale": "x", "set": "=", "shift": "+"}[self.op]
            return f"{self.op} {self.feature or 'treatment'} {sym} {self.value:g}"
        return f"{self.level_p!r} vs {self.level_p0!r}"

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "feature": self.feature,
            "op": self.op,
            "value": self.value,
            "level_p": self.level_p,
            "level_p0": self.level_p0,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "TreatmentDef":
        return cls(
            mode=obj["mode"],
            feature=obj.get("feature"),
            op=obj.get("op"),
            value=obj.get("value"),
            level_p=obj.get("level_p"),
            level_p0=obj.get("level_p0"),
        )


@dataclass
class AteResult:
    ate_observed: float
    ate_deconfounded: float | None = None
    die_percent: float | None = None
    method: str = "none"
    diagnostics: dict = field(default_factory=dict)

    @property
    def ate(self) -> float:
        return self.ate_deconfounded if self.ate_deconfounded is not None else self.ate_observed

    def to_json(self) -> dict:
        return {
            "ate_observed": self.ate_observed,
            "ate_deconfounded": self.ate_deconfounded,
            "die_percent": self.die_percent,
            "abs_ate": abs(self.ate),
            "method": self.method,
            "diagnostics": self.diagnostics,
        }


def transform_feature(dataset: Dataset, feature: str, op: str, value: float) -> Dataset:
    """Copy of the dataset with a numeric feature intervened on every row."""
    f = dataset.feature(feature)
    if f.kind == "categorical":
        if op != "set":
            raise SchemaError(f"transform op {op!r} needs a numeric feature")
        if value not in f.categories:
            raise SchemaError(f"{value!r} is not a category of {feature!r}")
        code = f.categories.index(value)
        old = dataset.columns[feature]
        vals = np.full(len(old.values), code, dtype=np.int64)
        return dataset.with_column(feature, Column(vals, old.missing.copy()))
    old = dataset.columns[feature]
    vals = old.values.astype(float).copy()
    if op == "scale":
        vals = vals * value
    elif op == "shift":
        vals = vals + value
    else:
        vals = np.full_like(vals, float(value))
    return dataset.with_column(feature, Column(vals, old.missing.copy()))


def model_outcomes(dataset: Dataset, model: Predictor, spec: CausalSpec) -> np.ndarray:
    preds = model.predict(dataset)
    if spec.outcome_transform == "identity":
        return preds
    truth = dataset.numeric(spec.outcome)
    return apply_transform(preds, truth, transform=spec.outcome_transform)


def _protected_matrix(dataset: Dataset, protected: tuple[str, ...]):
    if not protected:
        return np.zeros((dataset.n_rows, 0)), None
    enc = OneHotEncoder(dataset, list(protected))
    return enc.raw(dataset), enc


def _treatment_values(dataset: Dataset, feature: str) -> np.ndarray:
    f = dataset.feature(feature)
    if f.kind == "categorical":
        return dataset.codes(feature).astype(float)
    return dataset.numeric(feature)


def _arm_masks(dataset: Dataset, feature: str, level_p, level_p0):
    f = dataset.feature(feature)
    if f.kind == "categorical":
        cats = list(f.categories)
        for lev in (level_p, level_p0):
            if lev not in cats:
                raise EmptyTreatedArm(f"{lev!r} is not a category of {feature!r}")
        vals = dataset.codes(feature)
        return vals == cats.index(level_p), vals == cats.index(level_p0)
    vals = dataset.numeric(feature)
    return vals == float(level_p), vals == float(level_p0)


def compute_ate(dataset: Dataset, model: Predictor, spec: CausalSpec,
                treatment_def: TreatmentDef, adjust: str = "none",
                learner: SuperLearnerConfig | None = None,
                outcomes: np.ndarray | None = None) -> AteResult:
    """ATE of the treatment on the model outcome, optionally deconfounded.

    ``outcomes`` overrides the model scoring step (used by the forecasting
    harness, which precomputes per-window residual outcomes).
    """
    spec.validate_against(dataset)
    if adjust not in ("none", "psm", "gcomp"):
        raise UnsupportedAdjustment(f"unknown adjustment {adjust!r}")
    if outcomes is None:
        outcomes = model_outcomes(dataset, model, spec)
    outcomes = np.asarray(outcomes, dtype=float)
    if len(outcomes) != dataset.n_rows:
        raise SchemaError("outcome series does not match the dataset")

    if treatment_def.mode == "interventional_transform":
        return _ate_interventional(dataset, model, spec, treatment_def, adjust,
                                   learner, outcomes)
    return _ate_observational(dataset, spec, treatment_def, adjust, learner, outcomes)


def _ate_interventional(dataset, model, spec, tdef, adjust, learner, base_outcomes):
    feature = tdef.resolved_feature(spec)
    t_obs = _treatment_values(dataset, feature)
    transformed = transform_feature(dataset, feature, tdef.op, tdef.value)
    t_new = _treatment_values(transformed, feature)
    diagnostics = {"treatment": tdef.describe(), "n": dataset.n_rows}
    if model is not None:
        treated_outcomes = model_outcomes(transformed, model, spec)
        ate_direct = float(np.mean(treated_outcomes) - np.mean(base_outcomes))
    else:
        # no scoreable model: the unadjusted effect is a regression
        # standardization of the outcome column on T alone
        if float(np.nanvar(t_obs)) == 0.0:
            diagnostics["warning"] = "uniform_treatment"
            return AteResult(ate_observed=0.0,
                             ate_deconfounded=0.0 if adjust != "none" else None,
                             method=adjust, diagnostics=diagnostics)
        res_o = g_compute_effect(t_obs[:, None], base_outcomes,
                                 t_new[:, None], t_obs[:, None], learner)
        diagnostics["unadjusted_stack_weights"] = res_o.weights
        ate_direct = res_o.ate
    if adjust == "none":
        return AteResult(ate_observed=ate_direct, method="none", diagnostics=diagnostics)
    if adjust == "psm":
        raise UnsupportedAdjustment(
            "propensity matching needs a binary observational treatment; "
            "interventional transforms are already deconfounded"
        )
    # gcomp: outcome model on (T, Z), contrast transformed vs observed T per row
    Z, _ = _protected_matrix(dataset, spec.protected)
    X = np.column_stack([t_obs, Z])
    if float(np.nanvar(t_obs)) == 0.0:
        diagnostics["warning"] = "uniform_treatment"
        return AteResult(ate_observed=ate_direct, ate_deconfounded=0.0,
                         method="gcomp", diagnostics=diagnostics)
    res = g_compute_effect(X, base_outcomes, np.column_stack([t_new, Z]), X, learner)
    diagnostics["stack_weights"] = res.weights
    return AteResult(ate_observed=ate_direct, ate_deconfounded=res.ate,
                     method="gcomp", diagnostics=diagnostics)


def _ate_observational(dataset, spec, tdef, adjust, learner, outcomes):
    feature = tdef.resolved_feature(spec)
    f = dataset.feature(feature)
    t_vals = _treatment_values(dataset, feature)
    diagnostics = {"treatment": tdef.describe(), "n": dataset.n_rows}
    if float(np.nanvar(t_vals)) == 0.0:
        diagnostics["warning"] = "uniform_treatment"
        return AteResult(ate_observed=0.0,
                         ate_deconfounded=0.0 if adjust != "none" else None,
                         method=adjust, diagnostics=diagnostics)

    discrete = f.kind in ("categorical", "binary")
    treated_mask = control_mask = None
    if discrete:
        treated_mask, control_mask = _arm_masks(dataset, feature, tdef.level_p, tdef.level_p0)
    else:
        tm, cm = _arm_masks(dataset, feature, tdef.level_p, tdef.level_p0)
        if tm.any() and cm.any():
            discrete = True
            treated_mask, control_mask = tm, cm

    if discrete:
        if not treated_mask.any():
            raise EmptyTreatedArm(f"no rows with {feature!r} == {tdef.level_p!r}")
        if not control_mask.any():
            raise EmptyTreatedArm(f"no rows with {feature!r} == {tdef.level_p0!r}")
        ate_o = float(outcomes[treated_mask].mean() - outcomes[control_mask].mean())
        diagnostics["n_treated"] = int(treated_mask.sum())
        diagnostics["n_control"] = int(control_mask.sum())
        if adjust == "none":
            return AteResult(ate_observed=ate_o, method="none", diagnostics=diagnostics)
        if adjust == "psm":
            ate_m = _psm_effect(dataset, spec, treated_mask, control_mask, outcomes,
                                diagnostics)
            return AteResult(ate_observed=ate_o, ate_deconfounded=ate_m,
                             method="psm", diagnostics=diagnostics)
        # gcomp on a 0/1 indicator
        sub = treated_mask | control_mask
        idx = np.nonzero(sub)[0]
        t01 = treated_mask[idx].astype(float)
        Z, _ = _protected_matrix(dataset.take(idx), spec.protected)
        X = np.column_stack([t01, Z])
        ones = X.copy()
        ones[:, 0] = 1.0
        zeros = X.copy()
        zeros[:, 0] = 0.0
        res = g_compute_effect(X, outcomes[idx], ones, zeros, learner)
        diagnostics["stack_weights"] = res.weights
        return AteResult(ate_observed=ate_o, ate_deconfounded=res.ate,
                         method="gcomp", diagnostics=diagnostics)

    # continuous treatment: regression standardization for both the
    # unadjusted (T alone) and adjusted (T with Z) estimates
    if adjust == "psm":
        raise UnsupportedAdjustment("propensity matching needs a discrete treatment")
    p, p0 = float(tdef.level_p), float(tdef.level_p0)
    X_t = t_vals[:, None]
    at_p = np.full_like(X_t, p)
    at_p0 = np.full_like(X_t, p0)
    res_o = g_compute_effect(X_t, outcomes, at_p, at_p0, learner)
    diagnostics["unadjusted_stack_weights"] = res_o.weights
    if adjust == "none":
        return AteResult(ate_observed=res_o.ate, method="none", diagnostics=diagnostics)
    Z, _ = _protected_matrix(dataset, spec.protected)
    X = np.column_stack([t_vals, Z])
    Xp = X.copy()
    Xp[:, 0] = p
    Xp0 = X.copy()
    Xp0[:, 0] = p0
    res_g = g_compute_effect(X, outcomes, Xp, Xp0, learner)
    diagnostics["stack_weights"] = res_g.weights
    return AteResult(ate_observed=res_o.ate, ate_deconfounded=res_g.ate,
                     method="gcomp", diagnostics=diagnostics)


def _psm_effect(dataset, spec, treated_mask, control_mask, outcomes, diagnostics):
    if not spec.protected:
        raise UnsupportedAdjustment("psm needs protected attributes as covariates")
    sub = treated_mask | control_mask
    idx = np.nonzero(sub)[0]
    sub_data = dataset.take(idx)
    flag = treated_mask[idx].astype(float)
    match = fit_propensity_and_match(sub_data, flag, list(spec.protected), MatchConfig())
    sub_outcomes = outcomes[idx]
    diffs = [sub_outcomes[t] - sub_outcomes[c] for t, c in match.pairs]
    diagnostics["matched_pairs"] = len(match.pairs)
    diagnostics["unmatched_treated"] = len(match.unmatched_treated)
    diagnostics["caliper"] = match.caliper
    return float(np.mean(diffs))


def g_compute_ate(dataset: Dataset, spec: CausalSpec, treatment_def: TreatmentDef,
                  learner: SuperLearnerConfig | None = None) -> float:
    """Standardized (G-computation) effect on the dataset's outcome column.

    Warns (UniformTreatmentWarning) and returns 0 when the treatment never
    varies, so no contrast is estimable.
    """
    import warnings as _warnings

    from ..errors import UniformTreatmentWarning

    outcomes = dataset.numeric(spec.outcome)
    res = compute_ate(dataset, None, spec, treatment_def, adjust="gcomp",
                      learner=learner, outcomes=outcomes)
    if res.diagnostics.get("warning") == "uniform_treatment":
        _warnings.warn("treatment never varies; returning 0", UniformTreatmentWarning)
        return 0.0
    return float(res.ate_deconfounded)


def compute_die(dataset: Dataset, model: Predictor, spec: CausalSpec,
                treatment_def: TreatmentDef, adjust: str = "gcomp",
                learner: SuperLearnerConfig | None = None,
                outcomes: np.ndarray | None = None) -> AteResult:
    """DIE% = | |ATE_o| - |ATE_adjusted| | x 100 (signed variant in diagnostics)."""
    if adjust not in ("psm", "gcomp"):
        raise UnsupportedAdjustment("DIE needs adjust in {psm, gcomp}")
    res = compute_ate(dataset, model, spec, treatment_def, adjust=adjust,
                      learner=learner, outcomes=outcomes)
    ate_o = res.ate_observed
    ate_m = res.ate_deconfounded if res.ate_deconfounded is not None else ate_o
    res.die_percent = abs(abs(ate_o) - abs(ate_m)) * 100.0
    res.diagnostics["signed_die"] = (ate_m - ate_o) * 100.0
    return res
