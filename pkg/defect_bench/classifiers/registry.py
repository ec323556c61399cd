"""Dispatch from ModelKind to trainer and model class."""

import json
from typing import Callable

import numpy as np

from defect_bench.classifiers.ann import AnnModel, fit_ann
from defect_bench.classifiers.base import TrainedModel
from defect_bench.classifiers.boosting import BoostingModel, train_gradient_boosting
from defect_bench.classifiers.forest import ForestModel, train_random_forest
from defect_bench.classifiers.logistic import LogisticModel, train_logistic_regression
from defect_bench.classifiers.naive_bayes import NaiveBayesModel, train_gaussian_naive_bayes
from defect_bench.classifiers.svm import SvmModel, train_svm
from defect_bench.errors import ModelError
from defect_bench.models.specs import ModelKind, ModelSpec

Trainer = Callable[[np.ndarray, np.ndarray, ModelSpec], TrainedModel]

TRAINERS: dict[ModelKind, Trainer] = {
    ModelKind.LOGISTIC_REGRESSION: train_logistic_regression,
    ModelKind.NAIVE_BAYES: train_gaussian_naive_bayes,
    ModelKind.GRADIENT_BOOSTING: train_gradient_boosting,
    ModelKind.SVM: train_svm,
    ModelKind.RANDOM_FOREST: train_random_forest,
    ModelKind.ANN: fit_ann,
}

MODEL_CLASSES: dict[ModelKind, type[TrainedModel]] = {
    ModelKind.LOGISTIC_REGRESSION: LogisticModel,
    ModelKind.NAIVE_BAYES: NaiveBayesModel,
    ModelKind.GRADIENT_BOOSTING: BoostingModel,
    ModelKind.SVM: SvmModel,
    ModelKind.RANDOM_FOREST: ForestModel,
    ModelKind.ANN: AnnModel,
}


def train_model(spec: ModelSpec, x, y) -> TrainedModel:
    """Train the model `spec` describes; the ANN carves its own validation split."""
    return TRAINERS[spec.kind](x, y, spec)


def predict_proba(model: TrainedModel, x) -> np.ndarray:
    return model.predict_proba(x)


def predict(model: TrainedModel, x, threshold: float = 0.5) -> np.ndarray:
    return model.predict(x, threshold)


def load_model(text: str) -> TrainedModel:
    """Rebuild a model of whichever kind the JSON document names."""
    try:
        kind = ModelKind(json.loads(text)["spec"]["kind"])
    except (ValueError, KeyError, TypeError) as e:
        raise ModelError(f"not a saved model document: {e}") from e
    return MODEL_CLASSES[kind].from_json(text)
