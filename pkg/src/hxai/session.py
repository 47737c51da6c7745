"""Stakeholder sessions: question routing, the rating workflow against
auto-built baselines, hypothesis tests, and report assembly.

A session owns one dataset (or forecast context), named test models, and a
causal spec; every answered question appends an (question, artifact) pair to
an append-only history.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .artifacts import explanation_artifact, to_jsonable
from .baselines import (
    BaselineConfig,
    default_biased_outputs,
    make_biased_baseline,
    make_biased_forecast_baseline,
    make_random_baseline,
)
from .errors import EmptySession, SchemaError, UnknownCategory
from .explain import (
    CfConfig,
    background_sample,
    compute_pdp,
    find_counterfactual,
    global_attribution,
    local_attribution,
)
from .models.base import Predictor
from .rating import (
    SuperLearnerConfig,
    TreatmentDef,
    WrsConfig,
    compute_ate,
    compute_die,
    compute_wrs,
)
from .tabular import CausalSpec, Dataset, median_split, partition_by
from .timeseries import (
    PerturbationKind,
    Series,
    build_audit_frame,
    sliding_window,
    windows_to_dataset,
)

STAKEHOLDER_ROLES = ("individual", "regulatory", "organizational")

# question category -> (engine calls, combination hint, suggested follow-up)
ROUTING = {
    "group_disparity": (
        ["compute_wrs"],
        "Combine with DIE % to check if protected attribute has a confounding "
        "or direct effect.",
        "confounding_distortion",
    ),
    "causal_influence": (
        ["compute_ate"],
        "Use DIE% to validate causal effect is not confounded",
        "confounding_distortion",
    ),
    "confounding_distortion": (
        ["compute_die"],
        "Use SHAP to identify where and how confounding influences predictions "
        "at the instance level",
        "local_attribution",
    ),
    "global_feature_effect": (
        ["compute_pdp"],
        "Use ATE for more reliable estimation if confounding is present.",
        "causal_influence",
    ),
    "local_attribution": (
        ["local_attribution"],
        "Use global SHAP or ATE to see if local pattern is consistent across dataset",
        "global_attribution",
    ),
    "global_attribution": (
        ["global_attribution"],
        "Use RDE to test if feature importance remains stable across subgroups "
        "or under input perturbations.",
        "baseline_resemblance",
    ),
    "minimal_change": (
        ["find_counterfactual"],
        "Validate counterfactual's plausibility using SHAP or PDP (helps "
        "identify features that matter to the model).",
        "local_attribution",
    ),
    "group_perturbation_sensitivity": (
        ["compute_die"],
        "Use SHAP to identify which feature contributions shift across groups "
        "post-perturbation.",
        "local_attribution",
    ),
    "input_sensitivity": (
        ["compute_ate"],
        "Use SHAP to see variability of effect across instances.",
        "local_attribution",
    ),
    "baseline_resemblance": (
        ["run_rde"],
        "Combine with counterfactuals or SHAP to examine edge cases or deviations.",
        "minimal_change",
    ),
}

QUESTION_CATEGORIES = tuple(ROUTING)


@dataclass
class Question:
    category: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.category not in ROUTING:
            raise UnknownCategory(f"unknown question category {self.category!r}")

    def to_json(self) -> dict:
        return {"category": self.category, "params": to_jsonable(self.params)}

    @classmethod
    def from_json(cls, obj: dict) -> "Question":
        return cls(category=obj["category"], params=dict(obj.get("params", {})))


@dataclass
class MethodPlan:
    category: str
    calls: list[str]
    hint: str
    suggested_followup: str

    def to_json(self) -> dict:
        return {
            "category": self.category,
            "calls": list(self.calls),
            "hint": self.hint,
            "suggested_followup": self.suggested_followup,
        }


def route_question(q: Question) -> MethodPlan:
    calls, hint, follow = ROUTING[q.category]
    return MethodPlan(category=q.category, calls=list(calls), hint=hint,
                      suggested_followup=follow)


@dataclass
class Hypothesis:
    treatment_def: TreatmentDef
    expected_direction: str = "unspecified"  # increase | decrease | none | unspecified
    adjust: str = "none"

    def __post_init__(self):
        if self.expected_direction not in ("increase", "decrease", "none", "unspecified"):
            raise SchemaError(f"unknown expected direction {self.expected_direction!r}")

    def to_json(self) -> dict:
        return {
            "treatment_def": self.treatment_def.to_json(),
            "expected_direction": self.expected_direction,
            "adjust": self.adjust,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Hypothesis":
        return cls(
            treatment_def=TreatmentDef.from_json(obj["treatment_def"]),
            expected_direction=obj.get("expected_direction", "unspecified"),
            adjust=obj.get("adjust", "none"),
        )


@dataclass
class ForecastContext:
    series_by_company: dict[str, Series]
    history_len: int = 80
    horizon: int = 20
    imputation: str = "zero_fill"


class Session:
    """One auditing conversation: registered models, a causal spec, history."""

    def __init__(self, session_id: str, dataset: Dataset | None, causal_spec: CausalSpec,
                 stakeholder_role: str = "organizational", seed: int = 0,
                 forecast: ForecastContext | None = None,
                 baseline_config: dict | None = None, default_spec_warning: bool = False):
        if stakeholder_role not in STAKEHOLDER_ROLES:
            raise SchemaError(f"unknown stakeholder role {stakeholder_role!r}")
        if dataset is None and forecast is None:
            raise SchemaError("session needs a dataset or a forecast context")
        self.id = session_id
        self.dataset = dataset
        self.causal_spec = causal_spec
        self.stakeholder_role = stakeholder_role
        self.seed = int(seed)
        self.forecast = forecast
        self.baseline_config = baseline_config or {}
        self.default_spec_warning = default_spec_warning
        self.models: dict[str, Predictor] = {}
        self.history: list[tuple[Question, dict]] = []
        self._audit_frames: dict = {}
        self._surrogates: dict = {}

    # --- registry -----------------------------------------------------------

    def register_model(self, name: str, model: Predictor) -> None:
        if name in self.models:
            raise SchemaError(f"model {name!r} already registered")
        self.models[name] = model

    def model(self, name: str | None) -> tuple[str, Predictor]:
        if not self.models:
            raise SchemaError("session has no registered models")
        if name is None:
            name = next(iter(self.models))
        if name not in self.models:
            raise SchemaError(f"unknown model {name!r}")
        return name, self.models[name]

    @property
    def task(self) -> str:
        if self.forecast is not None:
            return "forecasting"
        return next(iter(self.models.values())).task if self.models else "binary_classification"

    # --- partition / baselines ----------------------------------------------

    def working_dataset(self) -> Dataset:
        if self.dataset is None:
            raise SchemaError("session has no tabular dataset")
        return self.dataset

    def partition_attribute(self) -> str:
        if not self.causal_spec.protected:
            raise SchemaError("causal spec declares no protected attribute")
        return self.causal_spec.protected[0]

    def partition(self, dataset: Dataset | None = None):
        """Partition on the first protected attribute, median-binning numerics.

        Returns (partition, thresholds, bin labels in code order); the last
        two are None for categorical attributes.
        """
        ds = dataset if dataset is not None else self.working_dataset()
        attr = self.partition_attribute()
        f = ds.feature(attr)
        if f.kind == "numeric":
            vals = ds.numeric(attr)
            med = float(np.nanmedian(vals))
            binned = median_split(ds, attr, f"{attr} bin")
            cats = list(binned.feature(f"{attr} bin").categories)
            return partition_by(binned, f"{attr} bin"), [med], cats
        return partition_by(ds, attr), None, None

    def build_baselines(self) -> dict[str, Predictor]:
        seed = int(self.baseline_config.get("seed", self.seed))
        if self.task == "forecasting":
            return self._build_forecast_baselines(seed)
        ds = self.working_dataset()
        task = self.task
        rr = None
        if task != "binary_classification":
            outs = ds.outcome_values()
            rr = (float(np.nanmin(outs)), float(np.nanmax(outs)))
        random = make_random_baseline(
            task, BaselineConfig(kind="random", seed=seed, regression_range=rr))
        partition, thresholds, bin_cats = self.partition(ds)
        biased_cfg = self.baseline_config.get("biased", {})
        outputs = biased_cfg.get("group_outputs") or default_biased_outputs(partition.labels)
        missing = [lab for lab in partition.labels if lab not in outputs]
        if missing:
            from .errors import UncoveredGroup

            raise UncoveredGroup(f"biased baseline config misses groups: {missing}")
        attr = self.partition_attribute()
        if bin_cats is not None:
            # the biased model reads the raw numeric attribute through the
            # same bins the partition used; bin labels follow code order
            from .baselines import BiasedClassifier

            bin_outputs = {f"bin{i}": float(outputs[lab])
                           for i, lab in enumerate(bin_cats)}
            biased = BiasedClassifier(attr, bin_outputs, bin_thresholds=thresholds,
                                      task=task)
        else:
            biased = make_biased_baseline(
                partition,
                BaselineConfig(kind="biased", seed=seed, protected=attr,
                               group_outputs=outputs),
                task=task)
        return {"random": random, "biased": biased}

    def _build_forecast_baselines(self, seed: int) -> dict[str, Predictor]:
        fc = self.forecast
        values = np.concatenate([
            s.values[~s.missing] for s in fc.series_by_company.values()
        ])
        rr = (float(values.min()), float(values.max()))
        random = make_random_baseline(
            "forecasting", BaselineConfig(kind="random", seed=seed, regression_range=rr))
        base_name, base = self.model(self.baseline_config.get("biased", {}).get("base"))
        offsets = self.baseline_config.get("biased", {}).get("group_offsets")
        if not offsets:
            sd = float(values.std())
            companies = sorted(fc.series_by_company)
            offsets = {c: (sd if c == companies[0] else 0.0) for c in companies}
        biased = make_biased_forecast_baseline(base, offsets)
        return {"random": random, "biased": biased}

    # --- surrogate view (forecasting sessions) --------------------------------

    def surrogate_view(self, model_name: str | None):
        """Lag-feature window dataset + distilled tree surrogate of a
        forecaster, so instance explainers can run on forecasting models.

        Returns (windows dataset, surrogate model, fidelity report,
        per-company row offsets).
        """
        from .explain import fit_ts_surrogate

        name, base = self.model(model_name)
        if name not in self._surrogates:
            fc = self.forecast
            if fc is None:
                raise SchemaError("surrogate views need a forecast context")
            offsets = {}
            windowsets = []
            pos = 0
            for company in sorted(fc.series_by_company):
                ws = sliding_window(fc.series_by_company[company], fc.history_len,
                                    fc.horizon, company)
                offsets[company] = pos
                pos += ws.n_windows
                windowsets.append(ws)
            windows = windows_to_dataset(windowsets, fc.imputation)
            if windows.has_column("company"):
                keep = [f for f in windows.schema if f.name != "company"]
                cols = {f.name: windows.columns[f.name] for f in keep}
                windows = Dataset(keep, cols, windows.outcome_name)
            surrogate, report = fit_ts_surrogate(base, windows, seed=self.seed)
            self._surrogates[name] = (windows, surrogate, report, offsets)
        return self._surrogates[name]

    def _explain_target(self, params: dict):
        """(dataset, model, model name, row offset map) for instance explainers:
        the raw tabular pair, or the surrogate view for forecasting."""
        if self.task == "forecasting":
            name, _ = self.model(params.get("model"))
            windows, surrogate, _, offsets = self.surrogate_view(name)
            return windows, surrogate, name, offsets
        name, model = self.model(params.get("model"))
        return self.working_dataset(), model, name, None

    def _resolve_instance(self, params: dict, offsets: dict | None) -> int:
        if offsets is not None and "company" in params:
            base = offsets.get(params["company"])
            if base is None:
                raise SchemaError(f"unknown company {params['company']!r}")
            return base + int(params.get("window", 0))
        if "instance" not in params:
            raise SchemaError("question needs an 'instance' row index")
        return int(params["instance"])

    # --- metric scoring --------------------------------------------------------

    def _audit_frame(self, model_name: str, model, perturbation: PerturbationKind | None):
        key = (model_name, perturbation.kind if perturbation else "none",
               perturbation.period if perturbation else 0,
               perturbation.offset if perturbation else 0)
        if key not in self._audit_frames:
            fc = self.forecast
            self._audit_frames[key] = build_audit_frame(
                model, fc.series_by_company, fc.history_len, fc.horizon,
                perturbations=[perturbation] if perturbation else None,
                imputation=fc.imputation)
        return self._audit_frames[key]

    def _metric_score(self, model_name: str, model, metric: str,
                      treatment_def: TreatmentDef | None,
                      perturbation: PerturbationKind | None,
                      wrs_config: WrsConfig | None = None,
                      adjust: str = "gcomp",
                      learner: SuperLearnerConfig | None = None) -> float:
        if self.task == "forecasting":
            return self._metric_score_forecast(
                model_name, model, metric, perturbation, wrs_config, adjust, learner)
        ds = self.working_dataset()
        spec = self.causal_spec
        if metric == "wrs":
            partition, _, _ = self.partition(ds)
            from .rating.ate import model_outcomes

            outcomes = model_outcomes(ds, model, spec)
            return float(compute_wrs(outcomes, partition, wrs_config))
        if treatment_def is None:
            raise SchemaError(f"metric {metric!r} needs a treatment definition")
        if metric == "ate":
            res = compute_ate(ds, model, spec, treatment_def, adjust="none")
            return float(res.ate_observed)
        if metric == "die":
            res = compute_die(ds, model, spec, treatment_def, adjust=adjust,
                              learner=learner)
            return float(res.die_percent)
        raise SchemaError(f"unknown metric {metric!r}")

    def _metric_score_forecast(self, model_name, model, metric, perturbation,
                               wrs_config, adjust, learner):
        frame = self._audit_frame(model_name, model, perturbation)
        residuals = frame.numeric("residual")
        arm_feature = frame.feature("perturbation")
        if metric == "wrs":
            # outcomes under the chosen arm (clean when no perturbation given)
            arm = perturbation.kind if perturbation else "none"
            codes = frame.codes("perturbation") if arm_feature.kind == "categorical" else None
            if codes is not None:
                arm_idx = list(arm_feature.categories).index(arm)
                mask = codes == arm_idx
            else:
                mask = np.ones(frame.n_rows, bool)
            sub = frame.take(np.nonzero(mask)[0])
            partition = partition_by(sub, "company")
            return float(compute_wrs(sub.numeric("residual"), partition, wrs_config))
        if perturbation is None:
            raise SchemaError(f"metric {metric!r} on forecasts needs a perturbation treatment")
        spec = CausalSpec(treatment="perturbation", outcome="residual",
                          protected=("company",))
        tdef = TreatmentDef(mode="observational_contrast",
                            level_p=perturbation.kind, level_p0="none")
        if metric == "ate":
            res = compute_ate(frame, None, spec, tdef, adjust="none", outcomes=residuals)
            return float(res.ate_observed)
        if metric == "die":
            res = compute_die(frame, None, spec, tdef, adjust="gcomp",
                              learner=learner, outcomes=residuals)
            return float(res.die_percent)
        raise SchemaError(f"unknown metric {metric!r}")

    # --- the rating workflow ---------------------------------------------------

    def run_rde(self, metric: str, treatment_def: TreatmentDef | None = None,
                perturbation: PerturbationKind | None = None,
                wrs_config: WrsConfig | None = None, adjust: str = "gcomp",
                models: list[str] | None = None,
                learner: SuperLearnerConfig | None = None) -> dict:
        """Score every test model plus the auto-built baselines, then judge
        which baseline each test model resembles."""
        if metric not in ("wrs", "ate", "die"):
            raise SchemaError(f"unknown metric {metric!r}")
        names = models or list(self.models)
        baselines = self.build_baselines()
        scores = {}
        for name in names:
            _, model = self.model(name)
            scores[name] = self._metric_score(name, model, metric, treatment_def,
                                              perturbation, wrs_config, adjust, learner)
        baseline_scores = {}
        for bname, bmodel in baselines.items():
            baseline_scores[bname] = self._metric_score(
                f"__{bname}__", bmodel, metric, treatment_def, perturbation,
                wrs_config, adjust, learner)
        verdicts = {
            name: resemblance_verdict(score, baseline_scores["random"],
                                      baseline_scores["biased"])
            for name, score in scores.items()
        }
        report = {
            "metric": metric,
            "spec": self.causal_spec.to_json(),
            "scores": scores,
            "baselines": baseline_scores,
            "verdicts": verdicts,
            "config": {
                "treatment": treatment_def.to_json() if treatment_def else None,
                "perturbation": perturbation.to_json() if perturbation else None,
                "wrs_levels": (wrs_config or WrsConfig()).to_json() if metric == "wrs" else None,
                "adjust": adjust if metric == "die" else None,
            },
            "seed": self.seed,
        }
        if self.default_spec_warning:
            report["warning"] = DEFAULT_SPEC_WARNING
        return report

    # --- hypotheses ---------------------------------------------------------------

    def run_hypothesis(self, model_name: str | None, hypothesis: Hypothesis) -> dict:
        name, model = self.model(model_name)
        ds = self.working_dataset()
        res = compute_ate(ds, model, self.causal_spec, hypothesis.treatment_def,
                          adjust=hypothesis.adjust)
        ate = res.ate if hypothesis.adjust != "none" else res.ate_observed
        direction = "none" if abs(ate) <= 1e-12 else ("increase" if ate > 0 else "decrease")
        if hypothesis.expected_direction == "unspecified":
            agreement = "unspecified"
        elif hypothesis.expected_direction == direction:
            agreement = "matched"
        else:
            agreement = "contradicted"
        verdict = _hypothesis_text(hypothesis, ate, direction, agreement, name)
        out = {
            "model": name,
            "hypothesis": hypothesis.to_json(),
            "ate_result": res.to_json(),
            "ate": ate,
            "direction": direction,
            "agreement": agreement,
            "verdict": verdict,
        }
        if self.default_spec_warning:
            out["warning"] = DEFAULT_SPEC_WARNING
        return out

    # --- question dispatch ----------------------------------------------------------

    def answer(self, question: Question) -> dict:
        plan = route_question(question)
        handler = getattr(self, f"_answer_{question.category}")
        values = handler(dict(question.params))
        artifact = explanation_artifact(
            kind=question.category,
            inputs=question.to_json(),
            values=values,
            metadata={
                "seed": self.seed,
                "plan": plan.to_json(),
                "session": self.id,
                "index": len(self.history),
                **({"warning": DEFAULT_SPEC_WARNING} if self.default_spec_warning else {}),
            },
        )
        self.history.append((question, artifact))
        return artifact

    def _seed_of(self, params: dict) -> int:
        return int(params.get("seed", self.seed))

    def _treatment_from(self, params: dict) -> TreatmentDef:
        t = params.get("treatment")
        if t is None:
            raise SchemaError("question needs a 'treatment' definition")
        return TreatmentDef.from_json(t) if isinstance(t, dict) else t

    def _answer_group_disparity(self, params):
        return self.run_rde("wrs",
                            perturbation=_perturbation_from(params),
                            wrs_config=_wrs_from(params),
                            models=params.get("models"))

    def _answer_causal_influence(self, params):
        if self.task == "forecasting" and params.get("perturbation"):
            return self._answer_input_sensitivity(params)
        ds, model, name, _ = self._explain_target(params)
        tdef = self._treatment_from(params)
        if self.task == "forecasting":
            # what-if on the surrogate view: lag features explain the forecast
            spec = CausalSpec(treatment=tdef.feature or "t-1", outcome=ds.outcome_name)
        else:
            spec = self.causal_spec
        res = compute_ate(ds, model, spec, tdef, adjust=params.get("adjust", "none"))
        return {"model": name, **res.to_json()}

    def _answer_confounding_distortion(self, params):
        name, model = self.model(params.get("model"))
        res = compute_die(self.working_dataset(), model, self.causal_spec,
                          self._treatment_from(params),
                          adjust=params.get("adjust", "gcomp"))
        return {"model": name, **res.to_json()}

    def _answer_global_feature_effect(self, params):
        ds, model, name, _ = self._explain_target(params)
        feature = params.get("feature")
        if not feature:
            raise SchemaError("global_feature_effect needs a 'feature'")
        curve = compute_pdp(model, ds, feature,
                            grid_size=int(params.get("grid_size", 20)))
        return {"model": name, **curve.to_json()}

    def _answer_local_attribution(self, params):
        ds, model, name, offsets = self._explain_target(params)
        row = self._resolve_instance(params, offsets)
        seed = self._seed_of(params)
        background = background_sample(ds, int(params.get("background_size", 100)), seed)
        res = local_attribution(model, ds, row, background,
                                max_features=int(params.get("max_features", 14)),
                                seed=seed,
                                n_permutations=int(params.get("n_permutations", 2000)))
        out = {"model": name, "instance": row, **res.to_json()}
        if offsets is not None:
            out["surrogate"] = True
        return out

    def _answer_global_attribution(self, params):
        ds, model, name, offsets = self._explain_target(params)
        seed = self._seed_of(params)
        out = global_attribution(
            model, ds, instances=params.get("instances"),
            seed=seed,
            background_size=int(params.get("background_size", 100)),
            max_features=int(params.get("max_features", 14)),
            n_permutations=int(params.get("n_permutations", 200)),
            sample_instances=int(params.get("sample_instances", 25)))
        result = {"model": name, **out}
        if offsets is not None:
            result["surrogate"] = True
        return result

    def _answer_minimal_change(self, params):
        name, model = self.model(params.get("model"))
        ds = self.working_dataset()
        if "instance" not in params:
            raise SchemaError("minimal_change needs an 'instance' row index")
        row = int(params["instance"])
        cfg = CfConfig(
            step_frac=float(params.get("step_frac", 0.05)),
            max_iter=int(params.get("max_iter", 500)),
            lam=float(params.get("lambda", 1.0)),
            mutable_only=params.get("mutable_only"),
        )
        res = find_counterfactual(model, ds, row, int(params.get("target_class", 1)), cfg)
        from .tabular import MISSING

        original = {f.name: (None if ds.value(row, f.name) is MISSING else ds.value(row, f.name))
                    for f in ds.schema}
        return {"model": name, "instance": row, "original": original, **res.to_json()}

    def _answer_group_perturbation_sensitivity(self, params):
        if self.task != "forecasting":
            name, model = self.model(params.get("model"))
            res = compute_die(self.working_dataset(), model, self.causal_spec,
                              self._treatment_from(params),
                              adjust=params.get("adjust", "gcomp"))
            return {"model": name, **res.to_json()}
        name, model = self.model(params.get("model"))
        pert = _perturbation_from(params)
        if pert is None:
            raise SchemaError("group_perturbation_sensitivity needs a 'perturbation'")
        score = self._metric_score_forecast(name, model, "die", pert, None, "gcomp", None)
        return {"model": name, "die_percent": score,
                "perturbation": pert.to_json()}

    def _answer_input_sensitivity(self, params):
        name, model = self.model(params.get("model"))
        if self.task == "forecasting":
            pert = _perturbation_from(params)
            if pert is None:
                raise SchemaError("input_sensitivity needs a 'perturbation'")
            score = self._metric_score_forecast(name, model, "ate", pert, None, "none", None)
            return {"model": name, "ate": score, "perturbation": pert.to_json()}
        res = compute_ate(self.working_dataset(), model, self.causal_spec,
                          self._treatment_from(params), adjust="none")
        return {"model": name, **res.to_json()}

    def _answer_baseline_resemblance(self, params):
        metric = params.get("metric", "wrs")
        tdef = None
        if params.get("treatment"):
            tdef = self._treatment_from(params)
        return self.run_rde(metric, treatment_def=tdef,
                            perturbation=_perturbation_from(params),
                            wrs_config=_wrs_from(params),
                            adjust=params.get("adjust", "gcomp"),
                            models=params.get("models"))

    # --- report -------------------------------------------------------------------

    def render_report(self) -> dict:
        if not self.history:
            raise EmptySession("session has no answered questions")
        sections = []
        for i, (q, artifact) in enumerate(self.history):
            sections.append({
                "index": i,
                "category": q.category,
                "params": to_jsonable(q.params),
                "hint": artifact["metadata"]["plan"]["hint"],
                "artifact": artifact,
            })
        doc = {
            "session": self.id,
            "stakeholder_role": self.stakeholder_role,
            "causal_spec": self.causal_spec.to_json(),
            "models": sorted(self.models),
            "n_questions": len(sections),
            "sections": sections,
        }
        return doc

    def render_report_text(self) -> str:
        doc = self.render_report()
        lines = [
            f"Audit report - session {doc['session']} ({doc['stakeholder_role']})",
            f"Models: {', '.join(doc['models'])}",
            "",
        ]
        for sec in doc["sections"]:
            lines.append(f"Q{sec['index'] + 1}. [{sec['category']}]")
            lines.append(f"    method plan: {', '.join(sec['artifact']['metadata']['plan']['calls'])}")
            values = sec["artifact"]["values"]
            summary = _summarize_values(sec["category"], values)
            for s in summary:
                lines.append(f"    {s}")
            lines.append(f"    follow-up hint: {sec['hint']}")
            lines.append("")
        return "\n".join(lines)


DEFAULT_SPEC_WARNING = (
    "causal spec was defaulted (treatment = first numeric non-outcome feature, "
    "protected = declared protected attributes); review before acting on results"
)


def resemblance_verdict(score: float, random_score: float, biased_score: float) -> dict:
    """Nearest baseline in absolute distance; 'distinct' when the test score
    is farther than 25% of the baseline gap from both."""
    d_r = abs(score - random_score)
    d_b = abs(score - biased_score)
    gap = abs(biased_score - random_score)
    threshold = 0.25 * gap
    if d_b <= d_r and d_b <= threshold:
        verdict = "closer-to-biased"
    elif d_r < d_b and d_r <= threshold:
        verdict = "closer-to-random"
    else:
        verdict = "distinct"
    return {
        "verdict": verdict,
        "distance_random": d_r,
        "distance_biased": d_b,
        "baseline_gap": gap,
    }


def default_causal_spec(dataset: Dataset, protected: list[str]) -> CausalSpec:
    """Generalized default: first numeric non-outcome feature as treatment."""
    treatment = None
    for f in dataset.schema:
        if f.name != dataset.outcome_name and f.kind == "numeric":
            treatment = f.name
            break
    if treatment is None:
        for f in dataset.schema:
            if f.name != dataset.outcome_name and f.name not in protected:
                treatment = f.name
                break
    return CausalSpec(treatment=treatment, outcome=dataset.outcome_name,
                      protected=tuple(protected))


def _perturbation_from(params: dict) -> PerturbationKind | None:
    p = params.get("perturbation")
    if p is None:
        return None
    return PerturbationKind.from_json(p) if isinstance(p, dict) else p


def _wrs_from(params: dict) -> WrsConfig | None:
    levels = params.get("wrs_levels")
    return WrsConfig(tuple(tuple(l) for l in levels)) if levels else None


def _hypothesis_text(hypothesis: Hypothesis, ate: float, direction: str,
                     agreement: str, model_name: str) -> str:
    t = hypothesis.treatment_def
    if direction == "none":
        effect = "does not change the predicted outcome"
    else:
        effect = f"{'raises' if direction == 'increase' else 'lowers'} the predicted outcome by {abs(ate):.4g} on average"
    text = f"Applying {t.describe()} to every row of {model_name}'s inputs {effect}."
    if agreement == "matched":
        text += f" This matches the expected direction ({hypothesis.expected_direction})."
    elif agreement == "contradicted":
        text += (f" This contradicts the expected direction "
                 f"({hypothesis.expected_direction}).")
    if hypothesis.adjust != "none":
        text += f" Estimate adjusted via {hypothesis.adjust}."
    return text


def _summarize_values(category: str, values: dict) -> list[str]:
    if category in ("group_disparity", "baseline_resemblance"):
        out = [f"{name}: {score:.4g}" for name, score in values.get("scores", {}).items()]
        b = values.get("baselines", {})
        out.append(f"baselines: random={b.get('random', 0):.4g} biased={b.get('biased', 0):.4g}")
        for name, v in values.get("verdicts", {}).items():
            out.append(f"{name}: {v['verdict']}")
        return out
    if category in ("causal_influence", "input_sensitivity"):
        return [f"ATE = {values.get('ate_observed', values.get('ate', 0)):+.4g}"]
    if category in ("confounding_distortion", "group_perturbation_sensitivity"):
        return [f"DIE% = {values.get('die_percent', 0):.4g}"]
    if category == "global_feature_effect":
        return [f"PDP over {len(values.get('grid', []))} grid points for {values.get('feature')}"]
    if category == "local_attribution":
        top = sorted(zip(values.get("feature_names", []), values.get("phis", [])),
                     key=lambda kv: -abs(kv[1]))[:3]
        return ["top attributions: " + ", ".join(f"{n} ({v:+.3g})" for n, v in top)]
    if category == "global_attribution":
        top = sorted(zip(values.get("feature_names", []), values.get("mean_abs_phi", [])),
                     key=lambda kv: -kv[1])[:3]
        return ["globally strongest: " + ", ".join(f"{n} ({v:.3g})" for n, v in top)]
    if category == "minimal_change":
        if values.get("found"):
            return [f"counterfactual found changing {values.get('changed_features')} "
                    f"(distance {values.get('distance', 0):.4g})"]
        return ["no counterfactual found within the search budget"]
    return []
