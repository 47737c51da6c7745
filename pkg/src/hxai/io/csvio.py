"""Generic CSV ingestion against a sidecar JSON schema descriptor.

Descriptor shape: {"columns": [{"name", "kind", "categories"?, "mutable"?,
"unit"?}, ...], "outcome": "<name>"}. Missing cells are the empty string or
the literal "NaN" (any case).
"""

from __future__ import annotations

import csv
import json

import numpy as np

from ..errors import ParseError, SchemaMismatch
from ..tabular import Column, Dataset, FeatureSchema


def schema_from_descriptor(descriptor: dict) -> tuple[list[FeatureSchema], str]:
    cols = descriptor.get("columns")
    outcome = descriptor.get("outcome")
    if not cols or not outcome:
        raise SchemaMismatch("descriptor needs 'columns' and 'outcome'")
    schema = [
        FeatureSchema(
            name=c["name"],
            kind=c["kind"],
            categories=tuple(c.get("categories", ())),
            mutable=bool(c.get("mutable", True)),
            unit=c.get("unit", ""),
        )
        for c in cols
    ]
    return schema, outcome


def load_csv(source: str, schema_descriptor: str | dict) -> Dataset:
    """Typed load; cell-level ParseError carries the row and column."""
    if isinstance(schema_descriptor, str):
        with open(schema_descriptor) as fh:
            descriptor = json.load(fh)
    else:
        descriptor = schema_descriptor
    schema, outcome = schema_from_descriptor(descriptor)
    by_name = {f.name: f for f in schema}

    with open(source, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaMismatch("CSV file is empty") from None
        header = [h.strip() for h in header]
        if header != [f.name for f in schema]:
            raise SchemaMismatch(
                f"CSV header {header} does not match descriptor columns"
            )
        records = list(reader)
    n = len(records)
    if n == 0:
        raise SchemaMismatch("CSV has a header but no rows")

    columns: dict[str, Column] = {}
    for j, f in enumerate(schema):
        if f.kind == "categorical":
            vals = np.full(n, -1, dtype=np.int64)
        else:
            vals = np.full(n, np.nan, dtype=float)
        miss = np.zeros(n, dtype=bool)
        cat_index = {c: k for k, c in enumerate(f.categories)}
        for i, rec in enumerate(records):
            if len(rec) != len(schema):
                raise ParseError(f"row {i} has {len(rec)} cells, expected {len(schema)}",
                                 row=i, column=None)
            tok = rec[j].strip()
            if tok == "" or tok.lower() == "nan":
                miss[i] = True
                continue
            if f.kind == "categorical":
                if tok not in cat_index:
                    raise ParseError(
                        f"row {i}, column {f.name!r}: {tok!r} is not a declared category",
                        row=i, column=f.name)
                vals[i] = cat_index[tok]
            else:
                try:
                    vals[i] = float(tok)
                except ValueError:
                    raise ParseError(
                        f"row {i}, column {f.name!r}: {tok!r} is not numeric",
                        row=i, column=f.name) from None
        columns[f.name] = Column(vals, miss)
    return Dataset(schema, columns, outcome_name=outcome)


def write_csv(dataset: Dataset, dest: str) -> None:
    """Inverse of load_csv (missing cells become empty strings)."""
    with open(dest, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f.name for f in dataset.schema])
        for row in dataset.to_json()["rows"]:
            writer.writerow(["" if v is None else v for v in row])


def descriptor_of(dataset: Dataset) -> dict:
    return {
        "columns": [f.to_json() for f in dataset.schema],
        "outcome": dataset.outcome_name,
    }
