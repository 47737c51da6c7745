"""Exception hierarchy shared across the engine.

Every domain failure raises an ``HxaiError`` subclass carrying a stable
``code`` string so the CLI and HTTP service can serialize errors uniformly.
"""

from __future__ import annotations


class HxaiError(Exception):
    """Base class for all domain errors."""

    code = "error"

    def to_json(self) -> dict:
        return {"error": self.code, "message": str(self)}


# --- tabular core ---------------------------------------------------------

class UnknownAttribute(HxaiError):
    code = "unknown_attribute"


class NumericAttributeRequiresBinning(HxaiError):
    code = "numeric_attribute_requires_binning"


class LengthMismatch(HxaiError):
    code = "length_mismatch"


class MissingWindowMetadata(HxaiError):
    code = "missing_window_metadata"


class SchemaError(HxaiError):
    code = "schema_error"


# --- datasets-io ----------------------------------------------------------

class SchemaMismatch(HxaiError):
    code = "schema_mismatch"


class UnknownCode(HxaiError):
    code = "unknown_code"


class ParseError(HxaiError):
    code = "parse_error"

    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        super().__init__(message)
        self.row = row
        self.column = column

    def to_json(self) -> dict:
        out = super().to_json()
        out["row"] = self.row
        out["column"] = self.column
        return out


# --- model zoo ------------------------------------------------------------

class DegenerateOutcome(HxaiError):
    code = "degenerate_outcome"


class NonFiniteFeature(HxaiError):
    code = "non_finite_feature"


class InvalidConfig(HxaiError):
    code = "invalid_config"


class SeriesTooShort(HxaiError):
    code = "series_too_short"


class EndpointUnreachable(HxaiError):
    code = "endpoint_unreachable"


class MalformedResponse(HxaiError):
    code = "malformed_response"


class CodomainViolation(HxaiError):
    code = "codomain_violation"


# --- baselines ------------------------------------------------------------

class MissingRange(HxaiError):
    code = "missing_range"


class UncoveredGroup(HxaiError):
    code = "uncovered_group"


# --- rating metrics -------------------------------------------------------

class SampleTooSmall(HxaiError):
    code = "sample_too_small"


class GroupTooSmall(HxaiError):
    code = "group_too_small"


class EmptyTreatedArm(HxaiError):
    code = "empty_treated_arm"


class UnsupportedAdjustment(HxaiError):
    code = "unsupported_adjustment"


class AllRowsOneArm(HxaiError):
    code = "all_rows_one_arm"


class NoMatchesWithinCaliper(HxaiError):
    code = "no_matches_within_caliper"


class TooFewRows(HxaiError):
    code = "too_few_rows"


class EnsembleFitFailure(HxaiError):
    code = "ensemble_fit_failure"


class UniformTreatmentWarning(UserWarning):
    """Treatment column has no variation; effect defined as zero."""


# --- explainers -----------------------------------------------------------

class UnknownFeature(HxaiError):
    code = "unknown_feature"


class TooManyFeatures(HxaiError):
    code = "too_many_features"


class NonTreeModel(HxaiError):
    code = "non_tree_model"


class InsufficientWindows(HxaiError):
    code = "insufficient_windows"


class NoMutableFeatures(HxaiError):
    code = "no_mutable_features"


class AlreadyTargetClass(HxaiError):
    code = "already_target_class"


# --- timeseries harness ---------------------------------------------------

class ZeroNaiveError(HxaiError):
    code = "zero_naive_error"


# --- session / service ----------------------------------------------------

class UnknownCategory(HxaiError):
    code = "unknown_category"


class EmptySession(HxaiError):
    code = "empty_session"
