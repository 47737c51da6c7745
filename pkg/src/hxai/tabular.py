"""Typed tabular data model, causal specification, and group partitioning.

A ``Dataset`` is an immutable column store. Numeric and binary columns are
float64 arrays with an explicit missing mask; categorical columns are int
code arrays indexing into the schema's category list. Missing cells are the
``MISSING`` sentinel at the value level, never a magic number, so that
perturbation-injected gaps stay distinguishable from legitimate zeros.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    LengthMismatch,
    MissingWindowMetadata,
    NumericAttributeRequiresBinning,
    SchemaError,
    UnknownAttribute,
)


class _Missing:
    """Singleton sentinel for a missing cell."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "MISSING"

    def __bool__(self):
        return False


MISSING = _Missing()

KINDS = ("numeric", "categorical", "binary")
OUTCOME_TRANSFORMS = ("identity", "abs_residual", "max_residual_per_window")


@dataclass(frozen=True)
class FeatureSchema:
    """Declares one column: its kind, categories, and counterfactual mutability."""

    name: str
    kind: str
    categories: tuple[str, ...] = ()
    mutable: bool = True
    unit: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"unknown kind {self.kind!r} for feature {self.name!r}")
        if self.kind == "categorical":
            if len(self.categories) < 2:
                raise SchemaError(f"categorical feature {self.name!r} needs >=2 categories")
            if len(set(self.categories)) != len(self.categories):
                raise SchemaError(f"duplicate categories in feature {self.name!r}")
        elif self.categories:
            raise SchemaError(f"{self.kind} feature {self.name!r} must not declare categories")
        object.__setattr__(self, "categories", tuple(self.categories))

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind,
            "categories": list(self.categories),
            "mutable": self.mutable,
            "unit": self.unit,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "FeatureSchema":
        return cls(
            name=obj["name"],
            kind=obj["kind"],
            categories=tuple(obj.get("categories", ())),
            mutable=bool(obj.get("mutable", True)),
            unit=obj.get("unit", ""),
        )


@dataclass
class Column:
    """One column of data: float values or int category codes, plus a missing mask.

    For categorical columns ``values`` holds codes into the schema category
    list (-1 in masked positions). For numeric/binary columns ``values`` is
    float64 (NaN in masked positions, but the mask is authoritative).
    """

    values: np.ndarray
    missing: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values)
        self.missing = np.asarray(self.missing, dtype=bool)
        if self.values.shape != self.missing.shape:
            raise SchemaError("column values and missing mask must have equal length")
        self.values.setflags(write=False)
        self.missing.setflags(write=False)

    def __len__(self):
        return len(self.values)


class Dataset:
    """Immutable typed table. ``outcome_name`` designates the outcome column."""

    def __init__(self, schema: list[FeatureSchema], columns: dict[str, Column], outcome_name: str):
        names = [f.name for f in schema]
        if len(set(names)) != len(names):
            raise SchemaError("duplicate feature names in schema")
        if outcome_name not in names:
            raise SchemaError(f"outcome {outcome_name!r} not in schema")
        if set(columns) != set(names):
            raise SchemaError("columns do not match schema names")
        lengths = {len(c) for c in columns.values()}
        if len(lengths) != 1:
            raise SchemaError("ragged columns")
        self._n = lengths.pop()
        if self._n < 1:
            raise SchemaError("dataset needs at least one row")
        for f in schema:
            col = columns[f.name]
            if f.kind == "categorical":
                codes = col.values
                ok = col.missing | ((codes >= 0) & (codes < len(f.categories)))
                if not np.all(ok):
                    raise SchemaError(f"out-of-range category code in {f.name!r}")
        self.schema = list(schema)
        self.columns = dict(columns)
        self.outcome_name = outcome_name
        self._by_name = {f.name: f for f in schema}

    # --- basic shape ------------------------------------------------------

    @property
    def n_rows(self) -> int:
        return self._n

    @property
    def feature_names(self) -> list[str]:
        return [f.name for f in self.schema if f.name != self.outcome_name]

    def feature(self, name: str) -> FeatureSchema:
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownAttribute(f"no column named {name!r}") from None

    def has_column(self, name: str) -> bool:
        return name in self._by_name

    # --- cell access ------------------------------------------------------

    def value(self, row: int, name: str):
        f = self.feature(name)
        col = self.columns[name]
        if col.missing[row]:
            return MISSING
        if f.kind == "categorical":
            return f.categories[int(col.values[row])]
        return float(col.values[row])

    def numeric(self, name: str) -> np.ndarray:
        """Float view of a numeric/binary column (NaN where missing)."""
        f = self.feature(name)
        if f.kind == "categorical":
            raise NumericAttributeRequiresBinning(
                f"column {name!r} is categorical; use codes() or categories"
            )
        vals = self.columns[name].values.astype(float).copy()
        vals[self.columns[name].missing] = np.nan
        return vals

    def codes(self, name: str) -> np.ndarray:
        f = self.feature(name)
        if f.kind != "categorical":
            raise UnknownAttribute(f"column {name!r} is not categorical")
        return self.columns[name].values

    def outcome_values(self) -> np.ndarray:
        f = self.feature(self.outcome_name)
        if f.kind == "categorical":
            return self.columns[self.outcome_name].values.astype(float)
        return self.numeric(self.outcome_name)

    def row_dict(self, row: int) -> dict:
        return {f.name: self.value(row, f.name) for f in self.schema}

    def iter_rows(self):
        for i in range(self._n):
            yield self.row_dict(i)

    # --- derivation -------------------------------------------------------

    def with_column(self, name: str, column: Column) -> "Dataset":
        """New dataset with one column replaced; schema unchanged."""
        self.feature(name)
        cols = dict(self.columns)
        cols[name] = column
        return Dataset(self.schema, cols, self.outcome_name)

    def with_extra_column(self, schema: FeatureSchema, column: Column) -> "Dataset":
        if schema.name in self._by_name:
            raise SchemaError(f"column {schema.name!r} already exists")
        cols = dict(self.columns)
        cols[schema.name] = column
        return Dataset(self.schema + [schema], cols, self.outcome_name)

    def take(self, indices) -> "Dataset":
        idx = np.asarray(indices, dtype=int)
        cols = {
            name: Column(col.values[idx].copy(), col.missing[idx].copy())
            for name, col in self.columns.items()
        }
        return Dataset(self.schema, cols, self.outcome_name)

    # --- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        rows = []
        for i in range(self._n):
            row = []
            for f in self.schema:
                col = self.columns[f.name]
                if col.missing[i]:
                    row.append(None)
                elif f.kind == "categorical":
                    row.append(f.categories[int(col.values[i])])
                else:
                    row.append(float(col.values[i]))
            rows.append(row)
        return {
            "schema": [f.to_json() for f in self.schema],
            "outcome": self.outcome_name,
            "rows": rows,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Dataset":
        schema = [FeatureSchema.from_json(s) for s in obj["schema"]]
        rows = obj["rows"]
        return dataset_from_rows(schema, rows, obj["outcome"])

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return self.to_json() == other.to_json()


def dataset_from_rows(schema: list[FeatureSchema], rows: list[list], outcome_name: str) -> Dataset:
    """Build a Dataset from row-major values (None or MISSING marks a gap)."""
    n = len(rows)
    columns = {}
    for j, f in enumerate(schema):
        vals = np.zeros(n, dtype=float if f.kind != "categorical" else np.int64)
        miss = np.zeros(n, dtype=bool)
        cat_index = {c: k for k, c in enumerate(f.categories)}
        for i, row in enumerate(rows):
            if len(row) != len(schema):
                raise SchemaError(f"row {i} has {len(row)} values, expected {len(schema)}")
            v = row[j]
            if v is None or v is MISSING:
                miss[i] = True
                vals[i] = -1 if f.kind == "categorical" else np.nan
            elif f.kind == "categorical":
                if v not in cat_index:
                    raise SchemaError(f"value {v!r} not a declared category of {f.name!r}")
                vals[i] = cat_index[v]
            else:
                vals[i] = float(v)
        columns[f.name] = Column(vals, miss)
    return Dataset(schema, columns, outcome_name)


def dataset_from_columns(schema: list[FeatureSchema], data: dict[str, np.ndarray],
                         outcome_name: str) -> Dataset:
    """Build a Dataset from column arrays (float for numeric, codes for categorical)."""
    columns = {}
    for f in schema:
        arr = np.asarray(data[f.name])
        if f.kind == "categorical":
            codes = arr.astype(np.int64)
            miss = codes < 0
        else:
            vals = arr.astype(float)
            miss = np.isnan(vals)
            codes = vals
        columns[f.name] = Column(codes, miss)
    return Dataset(schema, columns, outcome_name)


# --- causal specification ---------------------------------------------------

@dataclass(frozen=True)
class CausalSpec:
    """Names the treatment, outcome, and protected attributes for an audit."""

    treatment: str
    outcome: str
    protected: tuple[str, ...] = ()
    outcome_transform: str = "identity"

    def __post_init__(self):
        object.__setattr__(self, "protected", tuple(self.protected))
        if self.treatment == self.outcome:
            raise SchemaError("treatment must differ from outcome")
        if self.outcome in self.protected:
            raise SchemaError("protected attributes must exclude the outcome")
        if self.outcome_transform not in OUTCOME_TRANSFORMS:
            raise SchemaError(f"unknown outcome transform {self.outcome_transform!r}")

    def validate_against(self, dataset: Dataset) -> None:
        for name in (self.treatment, self.outcome, *self.protected):
            if not dataset.has_column(name):
                raise UnknownAttribute(f"causal spec references unknown column {name!r}")

    def to_json(self) -> dict:
        return {
            "treatment": self.treatment,
            "outcome": self.outcome,
            "protected": list(self.protected),
            "outcome_transform": self.outcome_transform,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "CausalSpec":
        return cls(
            treatment=obj["treatment"],
            outcome=obj["outcome"],
            protected=tuple(obj.get("protected", ())),
            outcome_transform=obj.get("outcome_transform", "identity"),
        )


# --- group partitioning ------------------------------------------------------

@dataclass
class GroupPartition:
    """Disjoint row-index groups keyed by the protected attribute's value."""

    attribute: str
    groups: dict[str, np.ndarray]

    def __post_init__(self):
        seen = set()
        for label, idx in self.groups.items():
            idx = np.asarray(idx, dtype=int)
            if idx.size == 0:
                raise SchemaError(f"group {label!r} is empty")
            s = set(idx.tolist())
            if seen & s:
                raise SchemaError("groups are not disjoint")
            seen |= s
            self.groups[label] = idx

    @property
    def labels(self) -> list[str]:
        return sorted(self.groups)

    def label_of_rows(self, n_rows: int) -> np.ndarray:
        """Row index -> group label (object array, None where unassigned)."""
        out = np.full(n_rows, None, dtype=object)
        for label, idx in self.groups.items():
            out[idx] = label
        return out

    def total(self) -> int:
        return sum(len(v) for v in self.groups.values())


def partition_by(dataset: Dataset, attribute: str) -> GroupPartition:
    """Partition rows by a categorical/binary attribute, one group per observed value.

    Rows with a missing attribute are left out of every group. Numeric
    attributes must be binned first (``bin_numeric_attribute``).
    """
    f = dataset.feature(attribute)
    col = dataset.columns[attribute]
    if f.kind == "numeric":
        raise NumericAttributeRequiresBinning(
            f"attribute {attribute!r} is numeric; bin it with an explicit threshold list first"
        )
    groups: dict[str, np.ndarray] = {}
    present = ~col.missing
    if f.kind == "categorical":
        for code, label in enumerate(f.categories):
            idx = np.nonzero(present & (col.values == code))[0]
            if idx.size:
                groups[label] = idx
    else:  # binary: observed 0/1 values become the labels
        vals = col.values
        for v in sorted({float(x) for x in vals[present]}):
            idx = np.nonzero(present & (vals == v))[0]
            label = str(int(v)) if float(v).is_integer() else str(v)
            groups[label] = idx
    return GroupPartition(attribute=attribute, groups=groups)


def bin_numeric_attribute(dataset: Dataset, attribute: str, thresholds: list[float],
                          new_name: str | None = None) -> Dataset:
    """Add a categorical column cutting a numeric attribute at explicit thresholds.

    With thresholds [t1 < t2 < ...] the bins are (-inf, t1], (t1, t2], ...,
    (tN, inf). Missing stays missing.
    """
    f = dataset.feature(attribute)
    if f.kind == "categorical":
        raise SchemaError(f"attribute {attribute!r} is already categorical")
    ts = sorted(float(t) for t in thresholds)
    if not ts:
        raise SchemaError("threshold list must be nonempty")
    labels = [f"<={_fmt(ts[0])}"]
    for lo, hi in zip(ts, ts[1:]):
        labels.append(f"({_fmt(lo)},{_fmt(hi)}]")
    labels.append(f">{_fmt(ts[-1])}")
    vals = dataset.columns[attribute].values
    miss = dataset.columns[attribute].missing
    codes = np.searchsorted(np.asarray(ts), vals, side="left").astype(np.int64)
    codes[miss] = -1
    name = new_name or f"{attribute} bin"
    schema = FeatureSchema(name=name, kind="categorical", categories=tuple(labels),
                           mutable=False, unit=f.unit)
    return dataset.with_extra_column(schema, Column(codes, miss.copy()))


def _fmt(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else f"{x:g}"


def median_split(dataset: Dataset, attribute: str, new_name: str | None = None) -> Dataset:
    """Two-bin split of a numeric attribute at its observed median."""
    vals = dataset.numeric(attribute)
    med = float(np.nanmedian(vals))
    return bin_numeric_attribute(dataset, attribute, [med], new_name=new_name)


# --- outcome transforms ------------------------------------------------------

def apply_transform(predictions, truth=None, spec: CausalSpec | None = None,
                    transform: str | None = None, window_sizes: list[int] | None = None) -> np.ndarray:
    """Map raw predictions to the audited outcome series.

    identity returns predictions unchanged; abs_residual needs aligned truth;
    max_residual_per_window additionally needs the per-window horizon lengths
    and emits one value per window.
    """
    kind = transform or (spec.outcome_transform if spec is not None else "identity")
    if kind not in OUTCOME_TRANSFORMS:
        raise SchemaError(f"unknown outcome transform {kind!r}")
    preds = np.asarray(predictions, dtype=float)
    if kind == "identity":
        return preds.copy()
    if truth is None:
        raise LengthMismatch("residual transforms require a truth series")
    y = np.asarray(truth, dtype=float)
    if y.shape != preds.shape:
        raise LengthMismatch(f"predictions ({preds.shape}) and truth ({y.shape}) differ")
    resid = np.abs(preds - y)
    if kind == "abs_residual":
        return resid
    if window_sizes is None:
        raise MissingWindowMetadata("max_residual_per_window requires window sizes")
    if sum(window_sizes) != resid.size:
        raise LengthMismatch("window sizes do not cover the residual series")
    out = np.empty(len(window_sizes), dtype=float)
    pos = 0
    for k, size in enumerate(window_sizes):
        out[k] = resid[pos:pos + size].max()
        pos += size
    return out
