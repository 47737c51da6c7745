import hashlib
import json

import pytest

from hxai.errors import ParseError, SchemaMismatch, UnknownCode
from hxai.io import (
    CODEBOOK,
    bundled_german_path,
    label_maps,
    load_csv,
    load_german_credit,
    write_csv,
)
from hxai.io.german import RAW_COLUMNS
from hxai.tabular import MISSING, partition_by


def test_german_loader_shape(german):
    assert german.n_rows == 1000
    assert len(german.feature_names) == 20
    assert german.outcome_name == "Cost Matrix(Risk)"


def test_german_class_balance(german):
    # one-pass count over the loaded file
    good = int(german.numeric("Cost Matrix(Risk)").sum())
    assert good == 700
    assert german.n_rows - good == 300


def test_good_risk_encoded_as_one(german):
    # alphabetical label encoding puts Bad Risk at 0, Good Risk at 1
    maps = label_maps(german)
    assert maps["Cost Matrix(Risk)"] == {"Bad Risk": 0, "Good Risk": 1}


def test_numeric_columns_untouched(german):
    for col in ("Age in years", "Duration in month", "Credit amount"):
        assert german.feature(col).kind == "numeric"
    assert german.numeric("Credit amount").max() > 100  # raw scale preserved


def test_codebook_decodes(tmp_path, german):
    # every decoded label in the dataset came from the code book
    for col, mapping in CODEBOOK.items():
        cats = set(german.feature(col).categories)
        assert cats <= set(mapping.values())


def test_a95_decodes_female_single(tmp_path):
    # a constructed row carrying the code that never occurs in the shipped file
    with open(bundled_german_path()) as fh:
        line = fh.readline().split()
    line[RAW_COLUMNS.index("Personal status and sex")] = "A95"
    path = tmp_path / "one.data"
    path.write_text(" ".join(line) + "\n")
    ds = load_german_credit(str(path))
    assert ds.value(0, "Personal status and sex") == "female:single"


def test_unknown_code(tmp_path):
    with open(bundled_german_path()) as fh:
        line = fh.readline().split()
    line[0] = "A99"
    path = tmp_path / "bad.data"
    path.write_text(" ".join(line) + "\n")
    with pytest.raises(UnknownCode):
        load_german_credit(str(path))


def test_schema_mismatch(tmp_path):
    path = tmp_path / "short.data"
    path.write_text("A11 6 A34\n")
    with pytest.raises(SchemaMismatch):
        load_german_credit(str(path))


def test_loader_determinism_hash(german):
    a = hashlib.sha256(json.dumps(load_german_credit().to_json(),
                                  sort_keys=True).encode()).hexdigest()
    b = hashlib.sha256(json.dumps(german.to_json(),
                                  sort_keys=True).encode()).hexdigest()
    assert a == b


def test_label_maps_alphabetical(german):
    maps = label_maps(german)
    housing = maps["Housing"]
    assert list(housing) == sorted(housing)
    assert housing == {"for free": 0, "own": 1, "rent": 2}


def test_derive_sex(german_with_sex):
    part = partition_by(german_with_sex, "Sex")
    assert set(part.groups) == {"female", "male"}
    assert part.total() == 1000


def test_fetch_requires_explicit_flag(tmp_path):
    from hxai.io import fetch_german_credit

    with pytest.raises(PermissionError):
        fetch_german_credit(str(tmp_path / "raw"))


# --- generic CSV loading ----------------------------------------------------------

DESCRIPTOR = {
    "columns": [
        {"name": "amount", "kind": "numeric"},
        {"name": "color", "kind": "categorical", "categories": ["blue", "red"]},
        {"name": "label", "kind": "binary"},
    ],
    "outcome": "label",
}


def _write(tmp_path, text):
    path = tmp_path / "data.csv"
    path.write_text(text)
    return str(path)


def test_csv_well_formed(tmp_path):
    path = _write(tmp_path, "amount,color,label\n1.5,red,1\n2.5,blue,0\n3,red,1\n")
    ds = load_csv(path, DESCRIPTOR)
    assert ds.n_rows == 3
    assert ds.value(0, "color") == "red"


def test_csv_parse_error_location(tmp_path):
    path = _write(tmp_path, "amount,color,label\n1.5,red,1\nxyz,blue,0\n")
    with pytest.raises(ParseError) as err:
        load_csv(path, DESCRIPTOR)
    assert err.value.row == 1
    assert err.value.column == "amount"


def test_csv_missing_cells(tmp_path):
    path = _write(tmp_path, "amount,color,label\n,red,1\nNaN,blue,0\n2,red,1\n")
    ds = load_csv(path, DESCRIPTOR)
    assert ds.value(0, "amount") is MISSING
    assert ds.value(1, "amount") is MISSING
    assert ds.value(2, "amount") == 2.0


def test_csv_header_mismatch(tmp_path):
    path = _write(tmp_path, "a,b,c\n1,red,1\n")
    with pytest.raises(SchemaMismatch):
        load_csv(path, DESCRIPTOR)


def test_csv_undeclared_category(tmp_path):
    path = _write(tmp_path, "amount,color,label\n1.5,green,1\n")
    with pytest.raises(ParseError) as err:
        load_csv(path, DESCRIPTOR)
    assert err.value.column == "color"


def test_csv_round_trip(tmp_path):
    path = _write(tmp_path, "amount,color,label\n1.5,red,1\n,blue,0\n")
    ds = load_csv(path, DESCRIPTOR)
    out = tmp_path / "again.csv"
    write_csv(ds, str(out))
    back = load_csv(str(out), DESCRIPTOR)
    assert back.to_json() == ds.to_json()
