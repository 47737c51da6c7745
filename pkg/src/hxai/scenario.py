"""Scenario configs: JSON descriptions of a full audit session (dataset,
derivations, models, causal spec, baselines, questions), bundled for the six
shipped walkthroughs and replayable from the CLI or the service."""

from __future__ import annotations

import json
import os
from importlib import resources

from .errors import SchemaError
from .io import derive_sex_column, load_csv, load_german_credit
from .models import (
    train_forecaster_multi,
    train_logistic,
    train_tree_ensemble,
)
from .models.logistic import LogisticConfig
from .models.trees import TreeConfig
from .models.external import wrap_external
from .session import ForecastContext, Question, Session, default_causal_spec
from .tabular import CausalSpec, Dataset, median_split
from .timeseries import Series, load_stock_csv


def bundled_config_path(name: str) -> str:
    base = name if name.endswith(".json") else f"{name}.json"
    return str(resources.files("hxai").joinpath(f"configs/{base}"))


def bundled_config_names() -> list[str]:
    root = resources.files("hxai").joinpath("configs")
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_config(path_or_name: str) -> dict:
    if os.path.exists(path_or_name):
        with open(path_or_name) as fh:
            return json.load(fh)
    candidate = bundled_config_path(path_or_name)
    if os.path.exists(candidate):
        with open(candidate) as fh:
            return json.load(fh)
    raise SchemaError(f"no scenario config at {path_or_name!r} (and no bundled one)")


def resolve_dataset(cfg: dict) -> Dataset:
    src = cfg.get("dataset")
    if not src:
        raise SchemaError("scenario config lacks a 'dataset'")
    if "builtin" in src:
        if src["builtin"] == "german_credit":
            return load_german_credit()
        raise SchemaError(f"unknown builtin dataset {src['builtin']!r}")
    if "json" in src:
        with open(src["json"]) as fh:
            return Dataset.from_json(json.load(fh))
    if "csv" in src:
        return load_csv(src["csv"], src["schema"])
    raise SchemaError("dataset needs 'builtin', 'csv', or 'json'")


def apply_derivations(dataset: Dataset, steps: list[dict]) -> Dataset:
    for step in steps or []:
        op = step.get("op")
        if op == "derive_sex":
            dataset = derive_sex_column(dataset, step.get("name", "Sex"))
        elif op == "median_bin":
            dataset = median_split(dataset, step["attribute"],
                                   step.get("name", f"{step['attribute']} bin"))
        else:
            raise SchemaError(f"unknown derivation op {op!r}")
    return dataset


def train_model_from_config(dataset: Dataset, outcome: str, mcfg: dict, seed: int):
    algo = mcfg.get("algo")
    name = mcfg.get("name", algo)
    params = dict(mcfg.get("config", {}))
    if algo == "logistic":
        cfg = LogisticConfig(
            l2=float(params.get("l2", 1e-4)),
            max_iter=int(params.get("max_iter", 100)),
            tol=float(params.get("tol", 1e-8)),
        )
        return train_logistic(dataset, outcome, cfg, name=name)
    if algo == "tree_ensemble":
        cfg = TreeConfig(
            n_trees=int(params.get("n_trees", 100)),
            max_depth=int(params.get("max_depth", 3)),
            learning_rate=float(params.get("learning_rate", 0.1)),
            min_leaf=int(params.get("min_leaf", 5)),
            mode=params.get("mode", "boosting"),
            feature_fraction=params.get("feature_fraction"),
            seed=int(params.get("seed", seed)),
        )
        return train_tree_ensemble(dataset, outcome, cfg, name=name)
    if algo == "external":
        return wrap_external(mcfg["descriptor"], mcfg.get("task", "binary_classification"),
                             name=name)
    raise SchemaError(f"unknown model algo {algo!r}")


def resolve_stock_series(cfg: dict) -> dict[str, Series]:
    src = cfg.get("dataset", {})
    if src.get("builtin") == "stocks_synthetic":
        path = str(resources.files("hxai").joinpath("data/stocks_synthetic.csv"))
    elif "csv" in src:
        path = src["csv"]
    else:
        raise SchemaError("forecasting scenario needs a stock CSV or the builtin")
    with_dates = load_stock_csv(path)
    return {k: Series(v.values, v.missing) for k, v in with_dates.items()}


def build_session(cfg: dict, session_id: str | None = None) -> Session:
    """Everything up to (but not including) answering the questions."""
    seed = int(os.environ.get("HXAI_SEED", cfg.get("seed", 0)))
    task = cfg.get("task", "tabular")
    role = cfg.get("stakeholder_role", "organizational")
    sid = session_id or cfg.get("name", "session")

    if task == "forecasting":
        series = resolve_stock_series(cfg)
        fcfg = cfg.get("forecast", {})
        context = ForecastContext(
            series_by_company=series,
            history_len=int(fcfg.get("history_len", 80)),
            horizon=int(fcfg.get("horizon", 20)),
            imputation=fcfg.get("imputation", "zero_fill"),
        )
        spec_cfg = cfg.get("causal_spec")
        spec = CausalSpec.from_json(spec_cfg) if spec_cfg else CausalSpec(
            treatment="perturbation", outcome="residual", protected=("company",))
        session = Session(sid, None, spec, stakeholder_role=role, seed=seed,
                          forecast=context, baseline_config=cfg.get("baselines", {}))
        for mcfg in cfg.get("models", []):
            if mcfg.get("algo") == "ar":
                order = int(mcfg.get("config", {}).get("order", 8))
                model = train_forecaster_multi(
                    [s.values for s in series.values()], order=order,
                    name=mcfg.get("name", f"ar{order}"))
            elif mcfg.get("algo") == "external":
                model = wrap_external(mcfg["descriptor"], "forecasting",
                                      name=mcfg.get("name", "external"))
            else:
                raise SchemaError(f"unknown forecasting algo {mcfg.get('algo')!r}")
            session.register_model(model.name, model)
        return session

    dataset = apply_derivations(resolve_dataset(cfg), cfg.get("derive"))
    spec_cfg = cfg.get("causal_spec")
    defaulted = spec_cfg is None
    if spec_cfg:
        spec = CausalSpec.from_json(spec_cfg)
    else:
        spec = default_causal_spec(dataset, cfg.get("protected", []))
    spec.validate_against(dataset)
    session = Session(sid, dataset, spec, stakeholder_role=role, seed=seed,
                      baseline_config=cfg.get("baselines", {}),
                      default_spec_warning=defaulted)
    for mcfg in cfg.get("models", []):
        model = train_model_from_config(dataset, spec.outcome, mcfg, seed)
        session.register_model(mcfg.get("name", model.name), model)
    return session


def run_scenario(cfg: dict, session_id: str | None = None) -> tuple[Session, list[dict]]:
    session = build_session(cfg, session_id)
    artifacts = []
    for qcfg in cfg.get("questions", []):
        question = Question(category=qcfg["category"], params=dict(qcfg.get("params", {})))
        artifacts.append(session.answer(question))
    return session, artifacts
