"""Sliding windows, input perturbations, residual outcomes, forecast metrics.

The audited outcome for a forecasting model is the maximum absolute residual
within each prediction window; perturbations hit every ``period``-th point
of the input series (0-based by default, offset configurable).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import SchemaError, SeriesTooShort, ZeroNaiveError
from .tabular import Column, Dataset, FeatureSchema

PERTURBATION_KINDS = ("none", "drop_to_zero", "missing_values")
IMPUTATIONS = ("zero_fill", "carry_forward")


@dataclass
class Series:
    """A univariate series with an explicit missing mask."""

    values: np.ndarray
    missing: np.ndarray | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float).copy()
        if self.missing is None:
            self.missing = np.isnan(self.values)
        else:
            self.missing = np.asarray(self.missing, dtype=bool).copy()
        if self.values.shape != self.missing.shape:
            raise SchemaError("series values and missing mask must align")

    def __len__(self):
        return len(self.values)

    def n_missing(self) -> int:
        return int(self.missing.sum())


@dataclass
class PerturbationKind:
    kind: str = "none"
    period: int = 80
    offset: int = 0  # 0-based by default; set 79 for the 1-based reading

    def __post_init__(self):
        if self.kind not in PERTURBATION_KINDS:
            raise SchemaError(f"unknown perturbation kind {self.kind!r}")
        if self.period < 1:
            raise SchemaError("perturbation period must be >= 1")

    def to_json(self) -> dict:
        return {"kind": self.kind, "period": self.period, "offset": self.offset}

    @classmethod
    def from_json(cls, obj: dict) -> "PerturbationKind":
        return cls(kind=obj.get("kind", "none"), period=int(obj.get("period", 80)),
                   offset=int(obj.get("offset", 0)))


def perturb(series: Series, kind: PerturbationKind) -> Series:
    """New series with positions i % period == offset zeroed or masked."""
    if kind.kind == "none":
        raise SchemaError("perturb requires a kind other than 'none'")
    values = series.values.copy()
    missing = series.missing.copy()
    hit = (np.arange(len(values)) % kind.period) == (kind.offset % kind.period)
    if kind.kind == "drop_to_zero":
        values[hit] = 0.0
        missing[hit] = False
    else:
        missing[hit] = True
    return Series(values, missing)


@dataclass
class WindowSet:
    """Stride-1 windows over one company's series: H history, h horizon."""

    company: str
    history_len: int
    horizon: int
    inputs: np.ndarray          # (n, H) values
    input_missing: np.ndarray   # (n, H) mask
    targets: np.ndarray         # (n, h) ground truth
    starts: np.ndarray          # (n,)

    @property
    def n_windows(self) -> int:
        return self.inputs.shape[0]


def sliding_window(series: Series, history_len: int = 80, horizon: int = 20,
                   company: str = "series", targets_from: Series | None = None) -> WindowSet:
    """All (len - H - h + 1) stride-1 windows; targets default to the same
    series but can come from an unperturbed twin (``targets_from``)."""
    H, h = int(history_len), int(horizon)
    n = len(series)
    if n < H + h:
        raise SeriesTooShort(f"series of length {n} cannot produce {H}+{h} windows")
    tgt = targets_from if targets_from is not None else series
    if len(tgt) != n:
        raise SchemaError("target series must align with the input series")
    count = n - H - h + 1
    idx = np.arange(count)
    inputs = np.stack([series.values[i:i + H] for i in idx])
    miss = np.stack([series.missing[i:i + H] for i in idx])
    targets = np.stack([tgt.values[i + H:i + H + h] for i in idx])
    return WindowSet(company=company, history_len=H, horizon=h, inputs=inputs,
                     input_missing=miss, targets=targets, starts=idx)


def impute_windows(ws: WindowSet, imputation: str = "zero_fill") -> np.ndarray:
    """Fill masked inputs so scoring models never see a missing value."""
    if imputation not in IMPUTATIONS:
        raise SchemaError(f"unknown imputation {imputation!r}")
    X = ws.inputs.copy()
    if not ws.input_missing.any():
        return X
    if imputation == "zero_fill":
        X[ws.input_missing] = 0.0
        return X
    for i in range(X.shape[0]):
        row_miss = ws.input_missing[i]
        if not row_miss.any():
            continue
        vals = X[i]
        last = None
        # leading gaps take the first observed value
        first_obs = np.nonzero(~row_miss)[0]
        fill = vals[first_obs[0]] if first_obs.size else 0.0
        for j in range(len(vals)):
            if row_miss[j]:
                vals[j] = last if last is not None else fill
            else:
                last = vals[j]
    return X


def residual_outcomes(model, ws: WindowSet, imputation: str = "zero_fill") -> np.ndarray:
    """One outcome per window: max |forecast - truth| over the horizon."""
    X = impute_windows(ws, imputation)
    preds = model.forecast_windows(X, ws.horizon, company=ws.company)
    preds = np.asarray(preds, dtype=float)
    if preds.shape != ws.targets.shape:
        raise SchemaError(
            f"model produced {preds.shape} forecasts for {ws.targets.shape} targets"
        )
    return np.abs(preds - ws.targets).max(axis=1)


def forecast_metrics(pred, truth, train_series) -> dict:
    """SMAPE (%) with 0/0 terms as 0, and MASE scaled by the one-step naive
    error of the training series."""
    p = np.asarray(pred, dtype=float).ravel()
    y = np.asarray(truth, dtype=float).ravel()
    if p.size == 0 or p.shape != y.shape:
        raise SchemaError("pred and truth must be nonempty and aligned")
    denom = np.abs(p) + np.abs(y)
    terms = np.where(denom == 0, 0.0, 2.0 * np.abs(p - y) / np.where(denom == 0, 1.0, denom))
    smape = float(100.0 * terms.mean())
    train = np.asarray(train_series, dtype=float).ravel()
    if train.size < 2:
        raise ZeroNaiveError("MASE needs a training series with >= 2 points")
    naive = float(np.abs(np.diff(train)).mean())
    if naive == 0.0:
        raise ZeroNaiveError("constant training series gives a zero naive error")
    mase = float(np.abs(p - y).mean() / naive)
    return {"smape": smape, "mase": mase}


# --- window datasets and audit frames ----------------------------------------

def windows_to_dataset(windowsets: list[WindowSet], imputation: str = "zero_fill") -> Dataset:
    """Windows as rows: lag features t-H .. t-1, company tag, first-step truth."""
    if not windowsets:
        raise SchemaError("need at least one window set")
    H = windowsets[0].history_len
    if any(ws.history_len != H for ws in windowsets):
        raise SchemaError("window sets disagree on history length")
    companies = sorted({ws.company for ws in windowsets})
    X = np.vstack([impute_windows(ws, imputation) for ws in windowsets])
    comp_codes = np.concatenate([
        np.full(ws.n_windows, companies.index(ws.company), dtype=np.int64)
        for ws in windowsets
    ])
    y_next = np.concatenate([ws.targets[:, 0] for ws in windowsets])
    schema = [FeatureSchema(f"t-{H - k}", "numeric") for k in range(H)]
    cols = {f"t-{H - k}": Column(X[:, k], np.zeros(len(X), bool)) for k in range(H)}
    if len(companies) >= 2:
        schema.append(FeatureSchema("company", "categorical", tuple(companies), mutable=False))
        cols["company"] = Column(comp_codes, np.zeros(len(X), bool))
    schema.append(FeatureSchema("y_next", "numeric", mutable=False))
    cols["y_next"] = Column(y_next, np.zeros(len(X), bool))
    return Dataset(schema, cols, outcome_name="y_next")


def build_audit_frame(model, series_by_company: dict[str, Series],
                      history_len: int = 80, horizon: int = 20,
                      perturbations: list[PerturbationKind] | None = None,
                      imputation: str = "zero_fill") -> Dataset:
    """Per-window audit rows: company, perturbation arm, residual outcome.

    Every perturbation arm keeps the clean series' targets as ground truth;
    the arm tagged "none" is the control.
    """
    arms = [PerturbationKind(kind="none")] + list(perturbations or [])
    arm_names = []
    for a in arms:
        if a.kind not in arm_names:
            arm_names.append(a.kind)
    companies = sorted(series_by_company)
    rows_company, rows_arm, rows_resid, rows_start = [], [], [], []
    for company in companies:
        clean = series_by_company[company]
        for arm in arms:
            if arm.kind == "none":
                ws = sliding_window(clean, history_len, horizon, company)
            else:
                ws = sliding_window(perturb(clean, arm), history_len, horizon,
                                    company, targets_from=clean)
            out = residual_outcomes(model, ws, imputation)
            rows_company.append(np.full(len(out), companies.index(company), dtype=np.int64))
            rows_arm.append(np.full(len(out), arm_names.index(arm.kind), dtype=np.int64))
            rows_resid.append(out)
            rows_start.append(ws.starts.astype(float))
    schema = [
        FeatureSchema("company", "categorical", tuple(companies), mutable=False),
        FeatureSchema("perturbation", "categorical", tuple(arm_names), mutable=False)
        if len(arm_names) >= 2 else FeatureSchema("perturbation", "binary", mutable=False),
        FeatureSchema("window_start", "numeric", mutable=False),
        FeatureSchema("residual", "numeric", mutable=False),
    ]
    n_all = sum(len(r) for r in rows_resid)
    arm_col = np.concatenate(rows_arm)
    cols = {
        "company": Column(np.concatenate(rows_company), np.zeros(n_all, bool)),
        "perturbation": Column(arm_col if len(arm_names) >= 2 else arm_col.astype(float),
                               np.zeros(n_all, bool)),
        "window_start": Column(np.concatenate(rows_start), np.zeros(n_all, bool)),
        "residual": Column(np.concatenate(rows_resid), np.zeros(n_all, bool)),
    }
    return Dataset(schema, cols, outcome_name="residual")


def load_stock_csv(path) -> dict[str, "SeriesWithDates"]:
    """CSV with columns date, close, company; ISO dates, sorted per company.

    Empty or 'NaN' close cells become missing points.
    """
    import csv
    from datetime import date

    by_company: dict[str, list] = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        cols = {c.lower().strip(): c for c in (reader.fieldnames or [])}
        for need in ("date", "close", "company"):
            if need not in cols:
                raise SchemaError(f"stock CSV lacks a {need!r} column")
        for rec in reader:
            d = date.fromisoformat(rec[cols["date"]].strip())
            raw = rec[cols["close"]].strip()
            if raw == "" or raw.lower() == "nan":
                v, miss = np.nan, True
            else:
                v, miss = float(raw), False
            by_company.setdefault(rec[cols["company"]].strip(), []).append((d, v, miss))
    out = {}
    for company, rows in by_company.items():
        rows.sort(key=lambda r: r[0])
        values = np.array([r[1] for r in rows], dtype=float)
        missing = np.array([r[2] for r in rows], dtype=bool)
        out[company] = SeriesWithDates(values=values, missing=missing,
                                       dates=[r[0] for r in rows])
    return out


@dataclass
class SeriesWithDates(Series):
    dates: list = field(default_factory=list)

    def split_at(self, cutoff) -> tuple[Series, Series]:
        """(train, eval) split: dates <= cutoff go to train."""
        from datetime import date

        if isinstance(cutoff, str):
            cutoff = date.fromisoformat(cutoff)
        mask = np.array([d <= cutoff for d in self.dates], dtype=bool)
        return (Series(self.values[mask], self.missing[mask]),
                Series(self.values[~mask], self.missing[~mask]))
