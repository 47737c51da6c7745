"""Built-in trainable models, the scoring contract, and the external adapter."""

from .base import FeatureMatrix, OneHotEncoder, Predictor, infer_task
from .external import ExternalModel, wrap_external
from .forecast import ARForecaster, ForecastPredictor, train_forecaster, train_forecaster_multi
from .logistic import LogisticConfig, LogisticModel, train_logistic
from .trees import TreeConfig, TreeEnsembleModel, train_tree_ensemble

__all__ = [
    "ARForecaster",
    "ExternalModel",
    "FeatureMatrix",
    "ForecastPredictor",
    "LogisticConfig",
    "LogisticModel",
    "OneHotEncoder",
    "Predictor",
    "TreeConfig",
    "TreeEnsembleModel",
    "infer_task",
    "load_model",
    "train_forecaster",
    "train_forecaster_multi",
    "train_logistic",
    "train_tree_ensemble",
    "wrap_external",
]


def load_model(obj: dict):
    """Revive a serialized model (dict from *.model.json)."""
    kind = obj.get("kind")
    if kind == "logistic":
        return LogisticModel.from_json(obj)
    if kind == "tree_ensemble":
        return TreeEnsembleModel.from_json(obj)
    if kind == "ar_forecaster":
        return ARForecaster.from_json(obj)
    if kind == "external":
        return ExternalModel.from_json(obj)
    from ..baselines import baseline_from_json

    model = baseline_from_json(obj)
    if model is not None:
        return model
    raise ValueError(f"unknown model kind {kind!r}")
