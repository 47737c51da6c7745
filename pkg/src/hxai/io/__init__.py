"""Dataset ingestion: German Credit decoding and generic CSV loading."""

from .csvio import descriptor_of, load_csv, schema_from_descriptor, write_csv
from .german import (
    CODEBOOK,
    bundled_german_path,
    dataset_sha256,
    derive_sex_column,
    fetch_german_credit,
    label_maps,
    load_german_credit,
)

__all__ = [
    "CODEBOOK",
    "bundled_german_path",
    "dataset_sha256",
    "derive_sex_column",
    "descriptor_of",
    "fetch_german_credit",
    "label_maps",
    "load_csv",
    "load_german_credit",
    "schema_from_descriptor",
    "write_csv",
]
