"""Command-line surface: ingest, train, rate, explain, hypothesize, perturb,
scenario replay, and serving the HTTP API.

Exit codes: 0 success, 1 domain error (structured JSON on stderr), 2 usage
error. Every run writes a manifest (command, config hash, seed, versions)
into <workdir>/manifests; artifact JSON is canonical, so reruns with equal
manifests are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .artifacts import canonical_json, explanation_artifact, manifest, write_artifact
from .errors import HxaiError
from .io import derive_sex_column, load_csv, load_german_credit
from .models import load_model
from .rating import TreatmentDef
from .scenario import load_config, run_scenario, train_model_from_config
from .session import Hypothesis, Question, Session
from .svg import bar_chart, line_chart, signed_bar_chart
from .tabular import CausalSpec, Dataset


def main(argv=None) -> int:
    return run_cli(list(sys.argv[1:] if argv is None else argv))


def run_cli(argv: list[str]) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "func"):
        parser.print_help()
        return 2
    try:
        return args.func(args)
    except HxaiError as exc:
        sys.stderr.write(canonical_json(exc.to_json()))
        return 1
    except FileNotFoundError as exc:
        sys.stderr.write(canonical_json({"error": "file_not_found", "message": str(exc)}))
        return 1


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hxai", description=__doc__)
    p.add_argument("--workdir", default=".", help="base directory for artifacts")
    p.add_argument("--seed", type=int, default=None,
                   help="seed override (HXAI_SEED wins over config seeds)")
    sub = p.add_subparsers(dest="command")

    ing = sub.add_parser("ingest", help="validate a CSV against its schema descriptor")
    ing.add_argument("--csv", required=True)
    ing.add_argument("--schema", required=True)
    ing.add_argument("--out", default="dataset.json")
    ing.set_defaults(func=cmd_ingest)

    tr = sub.add_parser("train", help="train a builtin model and save it")
    _data_flags(tr)
    tr.add_argument("--algo", required=True,
                    choices=["logistic", "tree_ensemble", "ar"])
    tr.add_argument("--outcome", default=None)
    tr.add_argument("--name", default=None)
    tr.add_argument("--config", default="{}", help="algo config as JSON")
    tr.add_argument("--out", default="model.json")
    tr.set_defaults(func=cmd_train)

    ra = sub.add_parser("rate", help="compute a rating metric against baselines")
    _data_flags(ra)
    ra.add_argument("--model", action="append", required=True,
                    help="model file, optionally name=path; repeatable")
    ra.add_argument("--metric", required=True, choices=["wrs", "ate", "die"])
    ra.add_argument("--treatment", default=None, help="treatment feature")
    ra.add_argument("--treat-op", choices=["scale", "set", "shift"], default=None)
    ra.add_argument("--treat-value", type=float, default=None)
    ra.add_argument("--contrast", default=None, help="level_p:level_p0")
    ra.add_argument("--protected", action="append", default=[],
                    help="protected attribute; repeatable, first one partitions")
    ra.add_argument("--outcome", default=None)
    ra.add_argument("--adjust", choices=["psm", "gcomp"], default="gcomp")
    ra.add_argument("--out", default=None)
    ra.add_argument("--svg", default=None, help="also emit a bar chart")
    ra.set_defaults(func=cmd_rate)

    ex = sub.add_parser("explain", help="run one explainer")
    exsub = ex.add_subparsers(dest="explainer")

    shp = exsub.add_parser("shap")
    _data_flags(shp)
    shp.add_argument("--model", required=True)
    shp.add_argument("--instance", type=int, required=True)
    shp.add_argument("--background-size", type=int, default=100)
    shp.add_argument("--out", default=None)
    shp.add_argument("--svg", default=None)
    shp.set_defaults(func=cmd_explain_shap)

    pdp = exsub.add_parser("pdp")
    _data_flags(pdp)
    pdp.add_argument("--model", required=True)
    pdp.add_argument("--feature", required=True)
    pdp.add_argument("--grid-size", type=int, default=20)
    pdp.add_argument("--out", default=None)
    pdp.add_argument("--svg", default=None)
    pdp.set_defaults(func=cmd_explain_pdp)

    cf = exsub.add_parser("counterfactual")
    _data_flags(cf)
    cf.add_argument("--model", required=True)
    cf.add_argument("--instance", type=int, required=True)
    cf.add_argument("--target-class", type=int, default=1)
    cf.add_argument("--mutable", action="append", default=None,
                    help="restrict changes to these features; repeatable")
    cf.add_argument("--out", default=None)
    cf.set_defaults(func=cmd_explain_cf)

    surr = exsub.add_parser("surrogate")
    surr.add_argument("--stock-csv", default=None,
                      help="stock CSV (default: bundled synthetic series)")
    surr.add_argument("--order", type=int, default=8)
    surr.add_argument("--history-len", type=int, default=80)
    surr.add_argument("--horizon", type=int, default=20)
    surr.add_argument("--n-trees", type=int, default=200)
    surr.add_argument("--max-depth", type=int, default=4)
    surr.add_argument("--out", default=None)
    surr.set_defaults(func=cmd_explain_surrogate)

    hy = sub.add_parser("hypothesize", help="test a what-if intervention")
    _data_flags(hy)
    hy.add_argument("--model", required=True)
    hy.add_argument("--feature", required=True)
    hy.add_argument("--op", choices=["scale", "set", "shift"], default="scale")
    hy.add_argument("--value", type=float, required=True)
    hy.add_argument("--adjust", choices=["none", "psm", "gcomp"], default="none")
    hy.add_argument("--expect", choices=["increase", "decrease", "none", "unspecified"],
                    default="unspecified")
    hy.add_argument("--protected", action="append", default=[])
    hy.add_argument("--outcome", default=None)
    hy.add_argument("--out", default=None)
    hy.set_defaults(func=cmd_hypothesize)

    pe = sub.add_parser("perturb", help="perturb a stock CSV")
    pe.add_argument("--input", required=True)
    pe.add_argument("--kind", required=True, choices=["drop_to_zero", "missing_values"])
    pe.add_argument("--period", type=int, default=80)
    pe.add_argument("--offset", type=int, default=0)
    pe.add_argument("--out", required=True)
    pe.set_defaults(func=cmd_perturb)

    sc = sub.add_parser("scenario", help="replay a bundled or local scenario config")
    scsub = sc.add_subparsers(dest="action")
    scrun = scsub.add_parser("run")
    scrun.add_argument("config", help="bundled name (e.g. jack) or a JSON path")
    scrun.add_argument("--outdir", default=None)
    scrun.set_defaults(func=cmd_scenario_run)
    sclist = scsub.add_parser("list")
    sclist.set_defaults(func=cmd_scenario_list)

    sv = sub.add_parser("serve", help="start the HTTP service")
    sv.add_argument("--port", type=int, default=8787)
    sv.add_argument("--host", default="127.0.0.1")
    sv.add_argument("--auth-token", default=None)
    sv.set_defaults(func=cmd_serve)
    return p


def _data_flags(sp):
    sp.add_argument("--data", default=None,
                    help="dataset JSON, 'german' builtin, or a CSV path")
    sp.add_argument("--schema", default=None, help="schema descriptor for CSV data")


def _resolve_seed(args) -> int:
    env = os.environ.get("HXAI_SEED")
    if env is not None:
        return int(env)
    return args.seed if args.seed is not None else 0


def _load_dataset(args) -> Dataset:
    if args.data in (None, "german", "german_credit"):
        return load_german_credit()
    if args.data.endswith(".json"):
        with open(args.data) as fh:
            return Dataset.from_json(json.load(fh))
    if args.schema is None:
        raise HxaiError("CSV data needs --schema")
    return load_csv(args.data, args.schema)


def _workdir(args) -> Path:
    wd = Path(args.workdir)
    wd.mkdir(parents=True, exist_ok=True)
    return wd


def _write_manifest(args, command: str, config: dict, seed: int) -> dict:
    man = manifest(command, config, seed)
    mdir = _workdir(args) / "manifests"
    mdir.mkdir(exist_ok=True)
    write_artifact(mdir / f"{command}_{man['config_hash'][:16]}.json", man)
    return man


def _out_path(args, default_name: str) -> Path:
    out = getattr(args, "out", None)
    path = Path(out) if out else _workdir(args) / "artifacts" / default_name
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _load_models(specs: list[str]) -> dict:
    models = {}
    for spec in specs:
        name, _, path = spec.rpartition("=")
        with open(path or spec) as fh:
            obj = json.load(fh)
        model = load_model(obj)
        models[name or model.name] = model
    return models


# --- commands -----------------------------------------------------------------


def cmd_ingest(args) -> int:
    ds = load_csv(args.csv, args.schema)
    out = _out_path(args, "dataset.json")
    digest = write_artifact(out, ds.to_json())
    _write_manifest(args, "ingest", {"csv": args.csv, "schema": args.schema},
                    _resolve_seed(args))
    print(json.dumps({"rows": ds.n_rows, "out": str(out), "sha256": digest}))
    return 0


def cmd_train(args) -> int:
    seed = _resolve_seed(args)
    cfg = json.loads(args.config)
    if args.algo == "ar":
        from .scenario import resolve_stock_series
        from .models import train_forecaster_multi

        series = resolve_stock_series({"dataset": {"csv": args.data} if args.data
                                       else {"builtin": "stocks_synthetic"}})
        model = train_forecaster_multi([s.values for s in series.values()],
                                       order=int(cfg.get("order", 8)),
                                       name=args.name or "ar_forecaster")
    else:
        ds = _load_dataset(args)
        outcome = args.outcome or ds.outcome_name
        mcfg = {"algo": args.algo, "name": args.name or args.algo, "config": cfg}
        model = train_model_from_config(ds, outcome, mcfg, seed)
    out = _out_path(args, "model.json")
    digest = write_artifact(out, model.to_json())
    _write_manifest(args, "train", {"algo": args.algo, "config": cfg,
                                    "data": args.data}, seed)
    print(json.dumps({"model": model.name, "out": str(out), "sha256": digest}))
    return 0


def _session_from_flags(args, models: dict, seed: int) -> Session:
    ds = _load_dataset(args)
    outcome = args.outcome or ds.outcome_name
    protected = tuple(args.protected or ())
    if "Sex" in protected and not ds.has_column("Sex") \
            and ds.has_column("Personal status and sex"):
        ds = derive_sex_column(ds)
    treatment = getattr(args, "treatment", None) or getattr(args, "feature", None)
    if treatment is None:
        treatment = next(n for n in ds.feature_names if n != outcome
                         and ds.feature(n).kind == "numeric")
    spec = CausalSpec(treatment=treatment, outcome=outcome, protected=protected)
    spec.validate_against(ds)
    session = Session("cli", ds, spec, seed=seed)
    for name, model in models.items():
        session.register_model(name, model)
    return session


def _treatment_from_flags(args, session: Session) -> TreatmentDef | None:
    if args.contrast:
        p, _, p0 = args.contrast.partition(":")
        f = session.working_dataset().feature(session.causal_spec.treatment)
        if f.kind == "categorical":
            return TreatmentDef(mode="observational_contrast", level_p=p, level_p0=p0)
        return TreatmentDef(mode="observational_contrast",
                            level_p=float(p), level_p0=float(p0))
    if args.treat_op:
        return TreatmentDef(mode="interventional_transform", feature=args.treatment,
                            op=args.treat_op, value=args.treat_value)
    if args.metric in ("ate", "die"):
        # default contrast for a numeric treatment: upper vs lower quartile
        vals = session.working_dataset().numeric(session.causal_spec.treatment)
        q25, q75 = np.nanquantile(vals, [0.25, 0.75])
        return TreatmentDef(mode="observational_contrast",
                            level_p=float(q75), level_p0=float(q25))
    return None


def cmd_rate(args) -> int:
    seed = _resolve_seed(args)
    models = _load_models(args.model)
    session = _session_from_flags(args, models, seed)
    tdef = _treatment_from_flags(args, session)
    question = Question(category="baseline_resemblance", params={
        "metric": args.metric,
        **({"treatment": tdef.to_json()} if tdef else {}),
        "adjust": args.adjust,
    })
    artifact = session.answer(question)
    out = _out_path(args, f"rating_{args.metric}.json")
    write_artifact(out, artifact)
    if args.svg:
        report = artifact["values"]
        labels = list(report["scores"]) + ["random", "biased"]
        values = [report["scores"][k] for k in report["scores"]]
        values += [report["baselines"]["random"], report["baselines"]["biased"]]
        chart = bar_chart(labels, values, title=f"{args.metric.upper()} vs baselines",
                          highlight={"random": "#999999", "biased": "#d1605e"})
        Path(args.svg).write_text(chart)
    _write_manifest(args, "rate", {
        "metric": args.metric, "models": sorted(models), "adjust": args.adjust,
        "treatment": tdef.to_json() if tdef else None,
        "protected": list(args.protected or ()), "data": args.data,
    }, seed)
    print(json.dumps({"out": str(out), "scores": artifact["values"]["scores"],
                      "baselines": artifact["values"]["baselines"]}))
    return 0


def cmd_explain_shap(args) -> int:
    seed = _resolve_seed(args)
    models = _load_models([args.model])
    name = next(iter(models))
    ds = _load_dataset(args)
    session = Session("cli", ds, CausalSpec(
        treatment=ds.feature_names[0], outcome=ds.outcome_name), seed=seed)
    session.register_model(name, models[name])
    artifact = session.answer(Question(category="local_attribution", params={
        "instance": args.instance, "model": name,
        "background_size": args.background_size,
    }))
    out = _out_path(args, f"shap_{args.instance}.json")
    write_artifact(out, artifact)
    if args.svg:
        vals = artifact["values"]
        order = np.argsort(-np.abs(np.array(vals["phis"])))
        labels = [vals["feature_names"][i] for i in order]
        phis = [vals["phis"][i] for i in order]
        Path(args.svg).write_text(signed_bar_chart(
            labels, phis, title=f"Attributions for row {args.instance} ({name})"))
    _write_manifest(args, "explain_shap", {"instance": args.instance, "model": args.model,
                                           "background": args.background_size,
                                           "data": args.data}, seed)
    print(json.dumps({"out": str(out), "method": artifact["values"]["method"]}))
    return 0


def cmd_explain_pdp(args) -> int:
    seed = _resolve_seed(args)
    models = _load_models([args.model])
    name = next(iter(models))
    ds = _load_dataset(args)
    session = Session("cli", ds, CausalSpec(
        treatment=ds.feature_names[0], outcome=ds.outcome_name), seed=seed)
    session.register_model(name, models[name])
    artifact = session.answer(Question(category="global_feature_effect", params={
        "feature": args.feature, "grid_size": args.grid_size, "model": name,
    }))
    out = _out_path(args, "pdp.json")
    write_artifact(out, artifact)
    if args.svg:
        vals = artifact["values"]
        if vals["kind"] == "numeric":
            chart = line_chart(vals["grid"], {args.feature: vals["averages"]},
                               title=f"Partial dependence: {args.feature}",
                               x_label=args.feature, y_label="mean prediction")
        else:
            chart = bar_chart(vals["grid"], vals["averages"],
                              title=f"Partial dependence: {args.feature}")
        Path(args.svg).write_text(chart)
    _write_manifest(args, "explain_pdp", {"feature": args.feature, "model": args.model,
                                          "grid_size": args.grid_size,
                                          "data": args.data}, seed)
    print(json.dumps({"out": str(out), "points": len(artifact["values"]["grid"])}))
    return 0


def cmd_explain_cf(args) -> int:
    seed = _resolve_seed(args)
    models = _load_models([args.model])
    name = next(iter(models))
    ds = _load_dataset(args)
    session = Session("cli", ds, CausalSpec(
        treatment=ds.feature_names[0], outcome=ds.outcome_name), seed=seed)
    session.register_model(name, models[name])
    artifact = session.answer(Question(category="minimal_change", params={
        "instance": args.instance, "target_class": args.target_class,
        "model": name,
        **({"mutable_only": args.mutable} if args.mutable else {}),
    }))
    out = _out_path(args, f"counterfactual_{args.instance}.json")
    write_artifact(out, artifact)
    _write_manifest(args, "explain_counterfactual", {
        "instance": args.instance, "target": args.target_class,
        "mutable": args.mutable, "model": args.model, "data": args.data}, seed)
    print(json.dumps({"out": str(out), "found": artifact["values"]["found"],
                      "changed": artifact["values"]["changed_features"]}))
    return 0


def cmd_explain_surrogate(args) -> int:
    seed = _resolve_seed(args)
    from .explain import fit_ts_surrogate
    from .models import train_forecaster_multi
    from .models.trees import TreeConfig
    from .scenario import resolve_stock_series
    from .timeseries import sliding_window, windows_to_dataset

    series = resolve_stock_series({"dataset": {"csv": args.stock_csv} if args.stock_csv
                                   else {"builtin": "stocks_synthetic"}})
    base = train_forecaster_multi([s.values for s in series.values()], order=args.order)
    windowsets = [sliding_window(s, args.history_len, args.horizon, c)
                  for c, s in sorted(series.items())]
    windows = windows_to_dataset(windowsets)
    surrogate, report = fit_ts_surrogate(
        base, windows, TreeConfig(n_trees=args.n_trees, max_depth=args.max_depth,
                                  learning_rate=0.1, min_leaf=5),
        seed=seed)
    artifact = explanation_artifact(
        kind="surrogate_fidelity",
        inputs={"order": args.order, "history_len": args.history_len,
                "horizon": args.horizon},
        values=report.to_json(),
        metadata={"seed": seed, "method": "tree_surrogate",
                  "n_trees": args.n_trees, "max_depth": args.max_depth})
    out = _out_path(args, "surrogate.json")
    write_artifact(out, artifact)
    _write_manifest(args, "explain_surrogate", {
        "order": args.order, "n_trees": args.n_trees, "depth": args.max_depth}, seed)
    print(json.dumps({"out": str(out), **report.to_json()}))
    return 0


def cmd_hypothesize(args) -> int:
    seed = _resolve_seed(args)
    models = _load_models([args.model])
    name = next(iter(models))
    args.metric = "ate"
    args.contrast = None
    args.treat_op = args.op
    args.treat_value = args.value
    args.treatment = args.feature
    session = _session_from_flags(args, models, seed)
    hyp = Hypothesis(
        treatment_def=TreatmentDef(mode="interventional_transform",
                                   feature=args.feature, op=args.op, value=args.value),
        expected_direction=args.expect, adjust=args.adjust)
    result = session.run_hypothesis(name, hyp)
    artifact = explanation_artifact(
        kind="hypothesis", inputs=hyp.to_json(), values=result,
        metadata={"seed": seed, "model": name})
    out = _out_path(args, "hypothesis.json")
    write_artifact(out, artifact)
    _write_manifest(args, "hypothesize", {
        "feature": args.feature, "op": args.op, "value": args.value,
        "adjust": args.adjust, "model": args.model, "data": args.data}, seed)
    print(json.dumps({"out": str(out), "ate": result["ate"],
                      "direction": result["direction"], "verdict": result["verdict"]}))
    return 0


def cmd_perturb(args) -> int:
    from .timeseries import PerturbationKind, load_stock_csv, perturb

    kind = PerturbationKind(kind=args.kind, period=args.period, offset=args.offset)
    by_company = load_stock_csv(args.input)
    lines = ["date,close,company"]
    for company in sorted(by_company):
        s = by_company[company]
        out = perturb(s, kind)
        for d, v, m in zip(s.dates, out.values, out.missing):
            lines.append(f"{d.isoformat()},{'NaN' if m else f'{v:.2f}'},{company}")
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    Path(args.out).write_text("\n".join(lines) + "\n")
    _write_manifest(args, "perturb", {"kind": args.kind, "period": args.period,
                                      "offset": args.offset, "input": args.input},
                    _resolve_seed(args))
    print(json.dumps({"out": args.out, "kind": args.kind, "period": args.period}))
    return 0


def cmd_scenario_run(args) -> int:
    cfg = load_config(args.config)
    seed = os.environ.get("HXAI_SEED")
    if seed is not None:
        cfg = {**cfg, "seed": int(seed)}
    elif args.seed is not None:
        cfg = {**cfg, "seed": args.seed}
    session, artifacts = run_scenario(cfg)
    outdir = Path(args.outdir) if args.outdir else _workdir(args) / "artifacts" / session.id
    outdir.mkdir(parents=True, exist_ok=True)
    paths = []
    for i, artifact in enumerate(artifacts):
        path = outdir / f"{session.id}_q{i + 1}_{artifact['kind']}.json"
        write_artifact(path, artifact)
        paths.append(str(path))
    report = session.render_report()
    write_artifact(outdir / f"{session.id}_report.json", report)
    (outdir / f"{session.id}_report.txt").write_text(session.render_report_text())
    _write_manifest(args, "scenario", cfg, int(cfg.get("seed", 0)))
    print(json.dumps({"scenario": session.id, "artifacts": paths,
                      "report": str(outdir / f"{session.id}_report.json")}))
    return 0


def cmd_scenario_list(args) -> int:
    from .scenario import bundled_config_names

    print(json.dumps({"bundled": bundled_config_names()}))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(workdir=str(_workdir(args)), auth_token=args.auth_token)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
