"""Causal rating metrics: WRS, ATE, and DIE% with deconfounding."""

from .ate import (
    AteResult,
    TreatmentDef,
    compute_ate,
    compute_die,
    g_compute_ate,
    transform_feature,
)
from .gcomp import GcompResult, SuperLearner, SuperLearnerConfig, fit_super_learner, g_compute_effect
from .psm import MatchConfig, MatchResult, fit_propensity_and_match
from .ttest import TTestResult, reg_inc_beta, t_cdf, t_critical, t_two_sided_pvalue, welch_t_test
from .wrs import DEFAULT_LEVELS, WrsConfig, compute_wrs

__all__ = [
    "AteResult",
    "DEFAULT_LEVELS",
    "GcompResult",
    "MatchConfig",
    "MatchResult",
    "SuperLearner",
    "SuperLearnerConfig",
    "TTestResult",
    "TreatmentDef",
    "WrsConfig",
    "compute_ate",
    "compute_die",
    "compute_wrs",
    "fit_propensity_and_match",
    "fit_super_learner",
    "g_compute_ate",
    "g_compute_effect",
    "reg_inc_beta",
    "t_cdf",
    "t_critical",
    "t_two_sided_pvalue",
    "transform_feature",
    "welch_t_test",
]
