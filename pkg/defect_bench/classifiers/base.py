"""Uniform train/predict contract shared by every classifier family."""

import json
from typing import ClassVar

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from defect_bench.constants import FORMAT_VERSION
from defect_bench.errors import ModelError
from defect_bench.models.specs import ModelKind, ModelSpec


def sigmoid(z) -> np.ndarray:
    """Logistic function without overflow for large |z|."""
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def check_training_data(x, y, require_both_classes: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """float64 features and int64 0/1 labels, validated together."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y)
    if x.ndim != 2:
        raise ModelError(f"features must be 2-D, got shape {x.shape}")
    if y.shape != (x.shape[0],):
        raise ModelError(f"{y.shape[0] if y.ndim else 0} labels for {x.shape[0]} rows")
    if x.shape[0] == 0:
        raise ModelError("no training rows")
    if not np.isfinite(x).all():
        raise ModelError("features contain non-finite values")
    if not np.isin(y, (0, 1)).all():
        raise ModelError("labels must be 0 or 1")
    y = y.astype(np.int64)
    if require_both_classes and not 0 < y.sum() < y.size:
        raise ModelError("training data must contain both classes")
    return x, y


class TrainedModel(BaseModel):
    """Fitted classifier state. Subclasses implement `_proba`."""

    model_config = ConfigDict(frozen=True)

    kind: ClassVar[ModelKind]

    format_version: int = FORMAT_VERSION
    spec: ModelSpec
    n_features: int = Field(..., ge=1)
    training_log: list[float] = Field(default_factory=list, description="Loss per epoch/round/iteration")

    @model_validator(mode="after")
    def _check_kind(self) -> "TrainedModel":
        if self.spec.kind != self.kind:
            raise ValueError(f"{type(self).__name__} cannot hold a {self.spec.kind} spec")
        return self

    def _proba(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _check_features(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.n_features:
            raise ModelError(f"{self.kind}: expected {self.n_features} feature columns, got shape {x.shape}")
        return x

    def predict_proba(self, x) -> np.ndarray:
        """P(defective) per row, clamped into [0, 1]."""
        return np.clip(self._proba(self._check_features(x)), 0.0, 1.0)

    def predict(self, x, threshold: float = 0.5) -> np.ndarray:
        """1 where the probability is at or above `threshold`."""
        return (self.predict_proba(x) >= threshold).astype(np.int64)

    def to_json(self) -> str:
        return self.model_dump_json()

    @classmethod
    def from_json(cls, text: str) -> "TrainedModel":
        data = json.loads(text)
        if data.get("format_version") != FORMAT_VERSION:
            raise ModelError(f"unsupported model format_version {data.get('format_version')}")
        try:
            return cls.model_validate(data)
        except ValidationError as e:
            raise ModelError(f"invalid {cls.__name__} document: {e}") from e

    __hash__ = None  # type: ignore[assignment]
