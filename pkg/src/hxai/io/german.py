"""German Credit ingestion: decode the 21-column raw file via the code book,
label-encode categoricals alphabetically over decoded strings, keep the three
true numeric columns untouched, and map the outcome to Good Risk = 1.

The canonical raw file is not bundled (no redistribution, no network at test
time); a deterministic synthetic stand-in with the documented marginals
ships instead, and ``fetch_german_credit`` can pull the real file behind an
explicit flag with checksum pinning. Point HXAI_GERMAN_DATA at a local copy
of the canonical file to load that one everywhere.
"""

from __future__ import annotations

import hashlib
import os
from importlib import resources

from ..errors import SchemaMismatch, UnknownCode
from ..tabular import Column, Dataset, FeatureSchema
import numpy as np

RAW_COLUMNS = [
    "Status of existing checking account", "Duration in month", "Credit history",
    "Purpose", "Credit amount", "Savings account/bonds", "Present employment since",
    "Installment rate in percentage of disposable income", "Personal status and sex",
    "Other debtors / guarantors", "Present residence since", "Property", "Age in years",
    "Other installment plans", "Housing", "Number of existing credits at this bank",
    "Job", "Number of people being liable to provide maintenance for", "Telephone",
    "foreign worker", "Cost Matrix(Risk)",
]

NUMERIC_COLUMNS = ("Age in years", "Duration in month", "Credit amount")

CODEBOOK = {
    "Status of existing checking account": {
        "A14": "no checking account", "A11": "<0 DM", "A12": "0 <= <200 DM",
        "A13": ">= 200 DM",
    },
    "Credit history": {
        "A34": "critical account", "A33": "delay in paying off",
        "A32": "existing credits paid back duly till now",
        "A31": "all credits at this bank paid back duly", "A30": "no credits taken",
    },
    "Purpose": {
        "A40": "car (new)", "A41": "car (used)", "A42": "furniture/equipment",
        "A43": "radio/television", "A44": "domestic appliances", "A45": "repairs",
        "A46": "education", "A47": "vacation", "A48": "retraining", "A49": "business",
        "A410": "others",
    },
    "Savings account/bonds": {
        "A65": "no savings account", "A61": "<100 DM", "A62": "100 <= <500 DM",
        "A63": "500 <= <1000 DM", "A64": ">= 1000 DM",
    },
    "Present employment since": {
        "A75": ">=7 years", "A74": "4<= <7 years", "A73": "1<= < 4 years",
        "A72": "<1 years", "A71": "unemployed",
    },
    "Personal status and sex": {
        "A95": "female:single", "A94": "male:married/widowed", "A93": "male:single",
        "A92": "female:divorced/separated/married", "A91": "male:divorced/separated",
    },
    "Other debtors / guarantors": {
        "A101": "none", "A102": "co-applicant", "A103": "guarantor",
    },
    "Property": {
        "A121": "real estate", "A122": "savings agreement/life insurance",
        "A123": "car or other", "A124": "unknown / no property",
    },
    "Other installment plans": {
        "A143": "none", "A142": "store", "A141": "bank",
    },
    "Housing": {
        "A153": "for free", "A152": "own", "A151": "rent",
    },
    "Job": {
        "A174": "management/ highly qualified employee",
        "A173": "skilled employee / official", "A172": "unskilled - resident",
        "A171": "unemployed/ unskilled - non-resident",
    },
    "Telephone": {
        "A192": "yes", "A191": "none",
    },
    "foreign worker": {
        "A201": "yes", "A202": "no",
    },
}

OUTCOME_COLUMN = "Cost Matrix(Risk)"
OUTCOME_MAP = {"1": "Good Risk", "2": "Bad Risk"}
# documented value ranges of the small-integer ordinal columns
ORDINAL_DOMAINS = {
    "Installment rate in percentage of disposable income": ("1", "2", "3", "4"),
    "Present residence since": ("1", "2", "3", "4"),
    "Number of existing credits at this bank": ("1", "2", "3", "4"),
    "Number of people being liable to provide maintenance for": ("1", "2"),
}
# demographics stay fixed in counterfactual searches
IMMUTABLE = {"Personal status and sex", "Age in years", "foreign worker"}

UCI_URL = "http://archive.ics.uci.edu/ml/machine-learning-databases/statlog/german/german.data"


def bundled_german_path() -> str:
    """The synthetic stand-in bundled with the package (or HXAI_GERMAN_DATA)."""
    override = os.environ.get("HXAI_GERMAN_DATA")
    if override:
        return override
    return str(resources.files("hxai").joinpath("data/german_synthetic.data"))


def load_german_credit(source: str | None = None) -> Dataset:
    """Parse the space-separated raw file into a typed Dataset.

    All code-book columns decode to their string labels and become
    categoricals whose category order (= label-encoding) is alphabetical
    over decoded strings; the small-integer ordinal columns are label
    encoded the same way; Age/Duration/Credit amount stay numeric; the
    outcome becomes binary with Good Risk = 1.
    """
    path = source or bundled_german_path()
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    raw_rows = []
    for i, line in enumerate(lines):
        parts = line.split()
        if len(parts) != len(RAW_COLUMNS):
            raise SchemaMismatch(
                f"row {i} has {len(parts)} columns, expected {len(RAW_COLUMNS)}"
            )
        raw_rows.append(parts)
    n = len(raw_rows)

    decoded: dict[str, list] = {c: [] for c in RAW_COLUMNS}
    for i, parts in enumerate(raw_rows):
        for c, tok in zip(RAW_COLUMNS, parts):
            if c in CODEBOOK:
                try:
                    decoded[c].append(CODEBOOK[c][tok])
                except KeyError:
                    raise UnknownCode(f"row {i}, column {c!r}: unknown code {tok!r}") from None
            elif c == OUTCOME_COLUMN:
                try:
                    decoded[c].append(OUTCOME_MAP[tok])
                except KeyError:
                    raise UnknownCode(f"row {i}, column {c!r}: unknown code {tok!r}") from None
            elif c in NUMERIC_COLUMNS:
                try:
                    decoded[c].append(float(tok))
                except ValueError:
                    raise UnknownCode(f"row {i}, column {c!r}: non-numeric {tok!r}") from None
            else:
                if tok not in ORDINAL_DOMAINS[c]:
                    raise UnknownCode(f"row {i}, column {c!r}: unknown code {tok!r}")
                decoded[c].append(tok)  # small-int ordinal kept as its literal string

    schema: list[FeatureSchema] = []
    columns: dict[str, Column] = {}
    for c in RAW_COLUMNS:
        vals = decoded[c]
        if c in NUMERIC_COLUMNS:
            schema.append(FeatureSchema(c, "numeric", mutable=c not in IMMUTABLE))
            columns[c] = Column(np.array(vals, dtype=float), np.zeros(n, bool))
        elif c == OUTCOME_COLUMN:
            cats = sorted(set(vals))  # alphabetical: Bad Risk -> 0, Good Risk -> 1
            codes = np.array([cats.index(v) for v in vals], dtype=float)
            schema.append(FeatureSchema(c, "binary", mutable=False))
            columns[c] = Column(codes, np.zeros(n, bool))
        else:
            # encoding runs over the full declared label set (code book or
            # documented ordinal domain), alphabetical over decoded strings,
            # so the mapping is stable even when a code never occurs
            if c in CODEBOOK:
                cats = tuple(sorted(CODEBOOK[c].values()))
            else:
                cats = tuple(sorted(ORDINAL_DOMAINS[c]))
            index = {v: k for k, v in enumerate(cats)}
            codes = np.array([index[v] for v in vals], dtype=np.int64)
            schema.append(FeatureSchema(c, "categorical", cats,
                                        mutable=c not in IMMUTABLE))
            columns[c] = Column(codes, np.zeros(n, bool))
    return Dataset(schema, columns, outcome_name=OUTCOME_COLUMN)


def label_maps(dataset: Dataset) -> dict:
    """The emitted decoded-string -> integer encoding per categorical column."""
    out = {}
    for f in dataset.schema:
        if f.kind == "categorical":
            out[f.name] = {cat: i for i, cat in enumerate(f.categories)}
    out[OUTCOME_COLUMN] = {"Bad Risk": 0, "Good Risk": 1}
    return out


def derive_sex_column(dataset: Dataset, new_name: str = "Sex") -> Dataset:
    """Add a female/male column from the decoded personal-status prefix."""
    f = dataset.feature("Personal status and sex")
    prefixes = [c.split(":", 1)[0] for c in f.categories]
    cats = tuple(sorted(set(prefixes)))
    mapping = np.array([cats.index(p) for p in prefixes], dtype=np.int64)
    col = dataset.columns["Personal status and sex"]
    codes = np.where(col.missing, -1, mapping[col.values.astype(np.int64)])
    schema = FeatureSchema(new_name, "categorical", cats, mutable=False)
    return dataset.with_extra_column(schema, Column(codes, col.missing.copy()))


def dataset_sha256(path: str | None = None) -> str:
    with open(path or bundled_german_path(), "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def fetch_german_credit(dest: str, url: str = UCI_URL, expected_sha256: str | None = None,
                        allow_network: bool = False) -> str:
    """Download the canonical raw file. Never called implicitly: tests and
    loaders only touch local copies. Pass the published checksum to pin it."""
    if not allow_network:
        raise PermissionError(
            "network fetch is opt-in; pass allow_network=True (tests never fetch)"
        )
    import requests

    resp = requests.get(url, timeout=60)
    resp.raise_for_status()
    digest = hashlib.sha256(resp.content).hexdigest()
    if expected_sha256 and digest != expected_sha256:
        raise ValueError(f"checksum mismatch: got {digest}, expected {expected_sha256}")
    with open(dest, "wb") as fh:
        fh.write(resp.content)
    return digest
