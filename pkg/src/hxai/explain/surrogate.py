"""Tree-ensemble surrogate distilled from a forecaster so the polynomial
TreeSHAP path can explain its first-step-ahead forecasts."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InsufficientWindows
from ..models.forecast import ForecastPredictor
from ..models.trees import TreeConfig, TreeEnsembleModel, train_tree_ensemble
from ..tabular import Column, Dataset, FeatureSchema
from ..timeseries import forecast_metrics


@dataclass
class FidelityReport:
    n_train: int
    n_eval: int
    smape_surrogate: float   # surrogate vs truth on held-out windows
    smape_base: float        # base model vs truth on the same windows
    mase_surrogate: float
    mase_base: float
    smape_surrogate_vs_base: float  # how closely the surrogate mimics the base

    def to_json(self) -> dict:
        return {
            "n_train": self.n_train,
            "n_eval": self.n_eval,
            "smape_surrogate": self.smape_surrogate,
            "smape_base": self.smape_base,
            "mase_surrogate": self.mase_surrogate,
            "mase_base": self.mase_base,
            "smape_surrogate_vs_base": self.smape_surrogate_vs_base,
            "delta_smape": abs(self.smape_surrogate - self.smape_base),
            "delta_mase": abs(self.mase_surrogate - self.mase_base),
        }


def _metrics_nan_safe(pred, truth, train_series) -> dict:
    """MASE is undefined on a constant training series; report NaN there."""
    from ..errors import ZeroNaiveError

    try:
        return forecast_metrics(pred, truth, train_series)
    except ZeroNaiveError:
        out = forecast_metrics(pred, truth, [0.0, 1.0])
        return {"smape": out["smape"], "mase": float("nan")}


def fit_ts_surrogate(base: ForecastPredictor, windows: Dataset,
                     config: TreeConfig | None = None, eval_fraction: float = 0.1,
                     seed: int = 0, mase_train_series=None
                     ) -> tuple[TreeEnsembleModel, FidelityReport]:
    """Distill the base forecaster's first-step forecasts into a tree
    ensemble over the lag features, with a held-out fidelity report.

    ``windows`` is a lag-feature dataset (see ``windows_to_dataset``) whose
    outcome column holds the true next value. MASE scaling uses
    ``mase_train_series`` (defaults to the concatenated training targets).
    """
    config = config or TreeConfig(n_trees=200, max_depth=4, learning_rate=0.1, min_leaf=5)
    n = windows.n_rows
    if n < 30:
        raise InsufficientWindows(f"{n} windows are too few to distill a surrogate")
    lag_names = [c for c in windows.feature_names if c.startswith("t-")]
    if not lag_names:
        raise InsufficientWindows("window dataset has no t-<k> lag columns")

    base_preds = base.predict(windows)
    truth = windows.numeric(windows.outcome_name)

    rng = np.random.default_rng(seed)
    n_eval = max(1, int(round(eval_fraction * n)))
    eval_idx = np.sort(rng.choice(n, size=n_eval, replace=False))
    train_mask = np.ones(n, dtype=bool)
    train_mask[eval_idx] = False
    train_idx = np.nonzero(train_mask)[0]

    # surrogate trains on lag features only, targeting the base's forecasts
    distill_schema = [windows.feature(c) for c in lag_names]
    distill_schema.append(FeatureSchema("__base_forecast__", "numeric", mutable=False))
    cols = {c: windows.columns[c] for c in lag_names}
    cols["__base_forecast__"] = Column(base_preds.astype(float), np.zeros(n, bool))
    distill = Dataset(distill_schema, cols, outcome_name="__base_forecast__")

    surrogate = train_tree_ensemble(distill.take(train_idx), "__base_forecast__",
                                    config, name=f"{base.name}_surrogate")
    surr_eval = surrogate.predict(distill.take(eval_idx))
    base_eval = base_preds[eval_idx]
    truth_eval = truth[eval_idx]
    scale_series = (np.asarray(mase_train_series, dtype=float)
                    if mase_train_series is not None else truth[train_idx])

    m_surr = _metrics_nan_safe(surr_eval, truth_eval, scale_series)
    m_base = _metrics_nan_safe(base_eval, truth_eval, scale_series)
    m_cross = _metrics_nan_safe(surr_eval, base_eval, scale_series)
    report = FidelityReport(
        n_train=len(train_idx), n_eval=n_eval,
        smape_surrogate=m_surr["smape"], smape_base=m_base["smape"],
        mase_surrogate=m_surr["mase"], mase_base=m_base["mase"],
        smape_surrogate_vs_base=m_cross["smape"],
    )
    return surrogate, report
