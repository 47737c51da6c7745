"""HTTP JSON facade over sessions for the workbench UI and external callers.

Endpoints (all JSON):
  GET  /health
  POST /datasets                  upload CSV+schema / builtin / dataset JSON
  POST /models                    train a builtin or register an external model
  POST /baselines                 build a named baseline against a dataset
  POST /sessions                  create a session over registered pieces
  POST /sessions/{id}/questions   202 + poll URL (one running per session)
  GET  /sessions/{id}/questions/{qid}
  GET  /sessions/{id}/artifacts/{n}
  POST /sessions/{id}/hypotheses
  GET  /sessions/{id}/report

Artifact responses are the canonical JSON bytes, identical to what the CLI
writes for the same seed and config. Datasets are immutable: re-uploading an
id answers 409. A busy session answers 409 to a new question.
"""

from __future__ import annotations

import threading
import uuid
from concurrent.futures import ThreadPoolExecutor

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from .artifacts import canonical_json, to_jsonable
from .baselines import BaselineConfig, make_biased_baseline, make_random_baseline
from .errors import HxaiError
from .io import load_csv, load_german_credit
from .models import load_model, train_forecaster_multi
from .rating import TreatmentDef
from .scenario import apply_derivations, train_model_from_config
from .session import (
    ForecastContext,
    Hypothesis,
    Question,
    Session,
    route_question,
)
from .tabular import CausalSpec, Dataset, partition_by


class _State:
    def __init__(self, workdir: str):
        self.workdir = workdir
        self.datasets: dict[str, Dataset] = {}
        self.models: dict[str, object] = {}
        self.forecast_series: dict[str, dict] = {}
        self.sessions: dict[str, Session] = {}
        self.executors: dict[str, ThreadPoolExecutor] = {}
        self.questions: dict[str, dict] = {}  # qid -> {status, session, index|error}
        self.running: dict[str, str | None] = {}  # session id -> running qid
        self.lock = threading.Lock()


def _error_response(exc: HxaiError, status: int = 400) -> JSONResponse:
    return JSONResponse(status_code=status, content=exc.to_json())


def create_app(workdir: str = ".", auth_token: str | None = None) -> FastAPI:
    app = FastAPI(title="hxai service", version="0.1.0")
    state = _State(workdir)
    app.state.engine = state

    async def check_auth(request: Request):
        if auth_token is None:
            return None
        header = request.headers.get("authorization", "")
        if header != f"Bearer {auth_token}":
            return JSONResponse(status_code=401,
                                content={"error": "unauthorized",
                                         "message": "missing or wrong bearer token"})
        return None

    @app.exception_handler(HxaiError)
    async def on_domain_error(request: Request, exc: HxaiError):
        status = 404 if "unknown" in exc.code else 400
        return _error_response(exc, status)

    @app.get("/health")
    async def health():
        return {"status": "ok"}

    @app.post("/datasets")
    async def post_dataset(request: Request):
        guard = await check_auth(request)
        if guard:
            return guard
        body = await request.json()
        ds_id = body.get("id") or f"ds-{uuid.uuid4().hex[:8]}"
        with state.lock:
            if ds_id in state.datasets or ds_id in state.forecast_series:
                return JSONResponse(status_code=409, content={
                    "error": "immutable_dataset",
                    "message": f"dataset {ds_id!r} already registered"})
        if body.get("builtin") == "german_credit":
            ds = load_german_credit()
        elif body.get("builtin") == "stocks_synthetic" or body.get("stocks_csv"):
            from .scenario import resolve_stock_series

            series = resolve_stock_series({"dataset": (
                {"builtin": "stocks_synthetic"} if body.get("builtin")
                else {"csv": body["stocks_csv"]})})
            with state.lock:
                state.forecast_series[ds_id] = series
            return {"id": ds_id, "kind": "forecast_series",
                    "companies": sorted(series)}
        elif body.get("dataset"):
            ds = Dataset.from_json(body["dataset"])
        elif body.get("csv_text") and body.get("schema"):
            import tempfile

            with tempfile.NamedTemporaryFile("w", suffix=".csv", delete=False) as fh:
                fh.write(body["csv_text"])
                path = fh.name
            ds = load_csv(path, body["schema"])
        else:
            return JSONResponse(status_code=400, content={
                "error": "schema_error",
                "message": "need builtin, dataset, stocks_csv, or csv_text+schema"})
        ds = apply_derivations(ds, body.get("derive"))
        with state.lock:
            state.datasets[ds_id] = ds
        return {"id": ds_id, "rows": ds.n_rows,
                "features": ds.feature_names, "outcome": ds.outcome_name}

    @app.post("/models")
    async def post_model(request: Request):
        guard = await check_auth(request)
        if guard:
            return guard
        body = await request.json()
        name = body.get("name") or f"model-{uuid.uuid4().hex[:8]}"
        with state.lock:
            if name in state.models:
                return JSONResponse(status_code=409, content={
                    "error": "immutable_model",
                    "message": f"model {name!r} already registered"})
        if body.get("external"):
            ext = body["external"]
            from .models import wrap_external

            model = wrap_external(ext["descriptor"], ext.get("task", "binary_classification"),
                                  name=name)
        elif body.get("serialized"):
            model = load_model(body["serialized"])
            model.name = name
        elif body.get("train"):
            spec = body["train"]
            ds_id = spec.get("data")
            if ds_id in state.forecast_series:
                series = state.forecast_series[ds_id]
                model = train_forecaster_multi(
                    [s.values for s in series.values()],
                    order=int(spec.get("config", {}).get("order", 8)), name=name)
            else:
                ds = _get_dataset(state, ds_id)
                model = train_model_from_config(
                    ds, spec.get("outcome") or ds.outcome_name,
                    {"algo": spec["algo"], "name": name,
                     "config": spec.get("config", {})},
                    int(spec.get("seed", 0)))
        else:
            return JSONResponse(status_code=400, content={
                "error": "schema_error",
                "message": "need external, serialized, or train"})
        with state.lock:
            state.models[name] = model
        return {"name": name, "task": model.task, "provenance": model.provenance}

    @app.post("/baselines")
    async def post_baseline(request: Request):
        guard = await check_auth(request)
        if guard:
            return guard
        body = await request.json()
        name = body.get("name") or f"baseline-{uuid.uuid4().hex[:8]}"
        with state.lock:
            if name in state.models:
                return JSONResponse(status_code=409, content={
                    "error": "immutable_model",
                    "message": f"model {name!r} already registered"})
        kind = body.get("kind", "random")
        cfg = BaselineConfig.from_json({**body.get("config", {}), "kind": kind})
        if kind == "random":
            model = make_random_baseline(body.get("task", "binary_classification"),
                                         cfg, name=name)
        else:
            ds = _get_dataset(state, body.get("data"))
            partition = partition_by(ds, cfg.protected)
            model = make_biased_baseline(partition, cfg, name=name,
                                         task=body.get("task", "binary_classification"))
        with state.lock:
            state.models[name] = model
        return {"name": name, "kind": kind}

    @app.post("/sessions")
    async def post_session(request: Request):
        guard = await check_auth(request)
        if guard:
            return guard
        body = await request.json()
        sid = body.get("id") or f"s-{uuid.uuid4().hex[:8]}"
        with state.lock:
            if sid in state.sessions:
                return JSONResponse(status_code=409, content={
                    "error": "immutable_session",
                    "message": f"session {sid!r} already exists"})
        ds_id = body.get("dataset")
        seed = int(body.get("seed", 0))
        role = body.get("stakeholder_role", "organizational")
        spec_json = body.get("causal_spec")
        if ds_id in state.forecast_series:
            fcfg = body.get("forecast", {})
            context = ForecastContext(
                series_by_company=state.forecast_series[ds_id],
                history_len=int(fcfg.get("history_len", 80)),
                horizon=int(fcfg.get("horizon", 20)),
                imputation=fcfg.get("imputation", "zero_fill"))
            spec = (CausalSpec.from_json(spec_json) if spec_json else
                    CausalSpec(treatment="perturbation", outcome="residual",
                               protected=("company",)))
            session = Session(sid, None, spec, stakeholder_role=role, seed=seed,
                              forecast=context,
                              baseline_config=body.get("baselines", {}))
        else:
            ds = _get_dataset(state, ds_id)
            if not spec_json:
                return JSONResponse(status_code=400, content={
                    "error": "schema_error", "message": "session needs a causal_spec"})
            spec = CausalSpec.from_json(spec_json)
            spec.validate_against(ds)
            session = Session(sid, ds, spec, stakeholder_role=role, seed=seed,
                              baseline_config=body.get("baselines", {}))
        for mname in body.get("models", []):
            with state.lock:
                if mname not in state.models:
                    return JSONResponse(status_code=404, content={
                        "error": "unknown_model", "message": f"no model {mname!r}"})
                session.register_model(mname, state.models[mname])
        with state.lock:
            state.sessions[sid] = session
            state.executors[sid] = ThreadPoolExecutor(max_workers=1)
            state.running[sid] = None
        return {"id": sid, "models": sorted(session.models),
                "task": session.task, "stakeholder_role": role}

    @app.post("/sessions/{sid}/questions")
    async def post_question(sid: str, request: Request):
        guard = await check_auth(request)
        if guard:
            return guard
        session = _get_session(state, sid)
        if isinstance(session, JSONResponse):
            return session
        body = await request.json()
        try:
            question = Question(category=body.get("category", ""),
                                params=dict(body.get("params", {})))
        except HxaiError as exc:
            return _error_response(exc, 400)
        with state.lock:
            if state.running[sid] is not None:
                return JSONResponse(status_code=409, content={
                    "error": "question_running",
                    "message": "a question is already running in this session"})
            qid = f"q-{uuid.uuid4().hex[:8]}"
            state.running[sid] = qid
            state.questions[qid] = {"status": "running", "session": sid}
        executor = state.executors[sid]

        def work():
            try:
                artifact = session.answer(question)
                index = artifact["metadata"]["index"]
                with state.lock:
                    state.questions[qid].update(status="done", index=index)
            except HxaiError as exc:
                with state.lock:
                    state.questions[qid].update(status="error", error=exc.to_json())
            except Exception as exc:  # pragma: no cover - defensive
                with state.lock:
                    state.questions[qid].update(status="error", error={
                        "error": "internal", "message": str(exc)})
            finally:
                with state.lock:
                    state.running[sid] = None

        executor.submit(work)
        return JSONResponse(status_code=202, content={
            "question_id": qid,
            "poll": f"/sessions/{sid}/questions/{qid}",
            "plan": route_question(question).to_json(),
        })

    @app.get("/sessions/{sid}/questions/{qid}")
    async def poll_question(sid: str, qid: str, request: Request):
        guard = await check_auth(request)
        if guard:
            return guard
        with state.lock:
            info = state.questions.get(qid)
        if info is None or info.get("session") != sid:
            return JSONResponse(status_code=404, content={
                "error": "unknown_question", "message": f"no question {qid!r}"})
        out = {"question_id": qid, "status": info["status"]}
        if info["status"] == "done":
            out["artifact_index"] = info["index"]
            out["artifact"] = f"/sessions/{sid}/artifacts/{info['index']}"
        if info["status"] == "error":
            out["error"] = info["error"]
        return out

    @app.get("/sessions/{sid}/artifacts/{index}")
    async def get_artifact(sid: str, index: int, request: Request):
        guard = await check_auth(request)
        if guard:
            return guard
        session = _get_session(state, sid)
        if isinstance(session, JSONResponse):
            return session
        if index < 0 or index >= len(session.history):
            return JSONResponse(status_code=404, content={
                "error": "unknown_artifact",
                "message": f"session has {len(session.history)} artifacts"})
        artifact = session.history[index][1]
        return Response(content=canonical_json(artifact), media_type="application/json")

    @app.post("/sessions/{sid}/hypotheses")
    async def post_hypothesis(sid: str, request: Request):
        guard = await check_auth(request)
        if guard:
            return guard
        session = _get_session(state, sid)
        if isinstance(session, JSONResponse):
            return session
        body = await request.json()
        hyp = Hypothesis(
            treatment_def=TreatmentDef.from_json(body["treatment_def"]),
            expected_direction=body.get("expected_direction", "unspecified"),
            adjust=body.get("adjust", "none"))
        result = session.run_hypothesis(body.get("model"), hyp)
        return JSONResponse(content=to_jsonable(result))

    @app.get("/sessions/{sid}/report")
    async def get_report(sid: str, request: Request):
        guard = await check_auth(request)
        if guard:
            return guard
        session = _get_session(state, sid)
        if isinstance(session, JSONResponse):
            return session
        report = session.render_report()
        return Response(content=canonical_json(report), media_type="application/json")

    return app


def _get_dataset(state: _State, ds_id: str | None):
    from .errors import SchemaError

    with state.lock:
        if ds_id not in state.datasets:
            raise SchemaError(f"unknown dataset {ds_id!r}")
        return state.datasets[ds_id]


def _get_session(state: _State, sid: str):
    with state.lock:
        session = state.sessions.get(sid)
    if session is None:
        return JSONResponse(status_code=404, content={
            "error": "unknown_session", "message": f"no session {sid!r}"})
    return session
