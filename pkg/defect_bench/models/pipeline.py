"""Preprocessing configuration and fitted pipeline state."""

import json

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from defect_bench.constants import FORMAT_VERSION
from defect_bench.errors import PreprocessError
from defect_bench.models.arrays import BoolArray, FloatArray


class PipelineConfig(BaseModel):
    """Preprocessing switches; defaults are the benchmark ledger values."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    standardize: bool = True
    correlation_threshold: float = Field(
        0.90,
        gt=0.0,
        le=1.0,
        description="Drop the later feature of any pair with |r| at or above this",
    )
    use_pca: bool = False
    pca_variance_target: float = Field(
        0.95,
        gt=0.0,
        le=1.0,
        description="Smallest component count whose cumulative explained ratio reaches this",
    )


class PcaBasis(BaseModel):
    """Principal axes of the (standardized, filtered) training features."""

    model_config = ConfigDict(frozen=True)

    center: FloatArray = Field(..., description="Column means subtracted before projection")
    components: FloatArray = Field(..., description="kept features x n_components, orthonormal columns")
    explained_variance: FloatArray = Field(..., description="All eigenvalues, descending, clamped at 0")
    cumulative_explained_ratio: FloatArray
    n_components: int = Field(..., ge=1)

    @model_validator(mode="after")
    def _check_shapes(self) -> "PcaBasis":
        if self.components.ndim != 2 or self.components.shape[1] != self.n_components:
            raise ValueError("components must have n_components columns")
        if self.center.shape != (self.components.shape[0],):
            raise ValueError("center length must match the component row count")
        return self


class FittedPipeline(BaseModel):
    """Frozen preprocessing state; derived only from the data passed to fit."""

    model_config = ConfigDict(frozen=True)

    format_version: int = FORMAT_VERSION
    config: PipelineConfig
    feature_names: list[str]
    means: FloatArray
    stds: FloatArray = Field(..., description="Sample stds; 0 marks a constant feature")
    constant_mask: BoolArray
    keep_mask: BoolArray
    pca: PcaBasis | None = None

    @model_validator(mode="after")
    def _check_masks(self) -> "FittedPipeline":
        p = len(self.feature_names)
        for field_name in ("means", "stds", "constant_mask", "keep_mask"):
            if getattr(self, field_name).shape != (p,):
                raise ValueError(f"{field_name} must have length {p}")
        if not self.keep_mask.any():
            raise ValueError("at least one feature must be kept")
        if (self.stds < 0).any():
            raise ValueError("stds must be non-negative")
        if self.pca is not None and self.pca.components.shape[0] != int(self.keep_mask.sum()):
            raise ValueError("PCA basis does not match the kept feature count")
        return self

    @property
    def n_input_features(self) -> int:
        return len(self.feature_names)

    @property
    def kept_feature_names(self) -> list[str]:
        return [name for name, keep in zip(self.feature_names, self.keep_mask) if keep]

    @property
    def n_output_features(self) -> int:
        if self.pca is not None:
            return self.pca.n_components
        return int(self.keep_mask.sum())

    @property
    def scale(self) -> np.ndarray:
        """Divisors used at apply time: constant features divide by 1."""
        return np.where(self.stds > 0, self.stds, 1.0)

    def to_json(self) -> str:
        return self.model_dump_json()

    @classmethod
    def from_json(cls, text: str) -> "FittedPipeline":
        data = json.loads(text)
        if data.get("format_version") != FORMAT_VERSION:
            raise PreprocessError(f"unsupported pipeline format_version {data.get('format_version')}")
        return cls.model_validate(data)
