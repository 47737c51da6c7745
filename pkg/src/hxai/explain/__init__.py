"""Post-hoc explainers: PDP, Shapley (exact/tree/sampled), surrogate, counterfactuals."""

from .counterfactual import CfConfig, CounterfactualResult, find_counterfactual
from .pdp import PdpCurve, compute_pdp
from .shapley import (
    ShapResult,
    background_sample,
    global_attribution,
    local_attribution,
    shapley_exact,
    shapley_sampled,
)
from .surrogate import FidelityReport, fit_ts_surrogate
from .treeshap import tree_shap

__all__ = [
    "CfConfig",
    "CounterfactualResult",
    "FidelityReport",
    "PdpCurve",
    "ShapResult",
    "background_sample",
    "compute_pdp",
    "find_counterfactual",
    "fit_ts_surrogate",
    "global_attribution",
    "local_attribution",
    "shapley_exact",
    "shapley_sampled",
    "tree_shap",
]
