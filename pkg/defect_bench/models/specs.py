"""Model specifications and the hyperparameter ledger.

Every default below is a ledger decision; the study fixes only the ANN
learning rate, its plateau decay, the Adam optimizer and the BCE loss.
"""

from enum import StrEnum
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from defect_bench.constants import UINT64_MASK


class ModelKind(StrEnum):
    """The six classifier families, in the study's table order."""

    LOGISTIC_REGRESSION = "logistic_regression"
    NAIVE_BAYES = "naive_bayes"
    GRADIENT_BOOSTING = "gradient_boosting"
    SVM = "svm"
    RANDOM_FOREST = "random_forest"
    ANN = "ann"


class _Params(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class LogisticParams(_Params):
    """Full-batch gradient descent on BCE + L2."""

    l2: float = Field(1e-4, ge=0.0, description="Penalty weight on ||w||^2")
    learning_rate: float = Field(0.1, gt=0.0, le=1.0)
    max_iters: int = Field(5_000, gt=0)
    tol: float = Field(1e-6, gt=0.0, description="Stop when the gradient max-norm falls below this")


class NaiveBayesParams(_Params):
    """Gaussian naive Bayes."""

    variance_floor: float = Field(1e-9, gt=0.0)


class ForestParams(_Params):
    """Bagged CART trees with per-split feature subsampling."""

    n_trees: int = Field(100, gt=0)
    max_depth: int = Field(16, gt=0)
    min_samples_split: int = Field(2, ge=2)
    max_features: int | None = Field(None, gt=0, description="None = floor(sqrt(p))")
    bootstrap: bool = True
    n_jobs: int = Field(1, description="Workers building trees; results do not depend on it")


class BoostingParams(_Params):
    """Log-odds gradient boosting with Newton leaf values."""

    n_rounds: int = Field(100, ge=0)
    shrinkage: float = Field(0.1, gt=0.0, le=1.0)
    max_depth: int = Field(3, gt=0)
    min_samples_leaf: int = Field(5, gt=0)


class SvmParams(_Params):
    """Soft-margin SVM trained by SMO."""

    C: float = Field(1.0, gt=0.0)
    kernel: Literal["rbf", "linear"] = "rbf"
    gamma: float | None = Field(None, gt=0.0, description="RBF width; None = 1/p")
    tol: float = Field(1e-3, gt=0.0)
    max_iter: int = Field(1_000_000, gt=0, description="Cap on SMO pair updates")


class AnnParams(_Params):
    """One hidden ReLU layer, sigmoid output, Adam with plateau decay."""

    hidden_units: int = Field(16, gt=0)
    learning_rate: float = Field(1e-4, gt=0.0, le=1.0)
    lr_decay_factor: float = Field(10.0, gt=1.0)
    batch_size: int = Field(32, gt=0)
    max_epochs: int = Field(200, gt=0)
    plateau_patience: int = Field(10, gt=0)
    early_stop_patience: int = Field(25, gt=0)
    min_delta: float = Field(1e-4, ge=0.0, description="Validation improvement that resets patience")
    validation_fraction: float = Field(0.1, gt=0.0, lt=1.0)
    beta1: float = Field(0.9, ge=0.0, lt=1.0)
    beta2: float = Field(0.999, ge=0.0, lt=1.0)
    epsilon: float = Field(1e-8, gt=0.0)


HyperParameters = (
    LogisticParams | NaiveBayesParams | ForestParams | BoostingParams | SvmParams | AnnParams
)

PARAMS_BY_KIND: dict[ModelKind, type[_Params]] = {
    ModelKind.LOGISTIC_REGRESSION: LogisticParams,
    ModelKind.NAIVE_BAYES: NaiveBayesParams,
    ModelKind.GRADIENT_BOOSTING: BoostingParams,
    ModelKind.SVM: SvmParams,
    ModelKind.RANDOM_FOREST: ForestParams,
    ModelKind.ANN: AnnParams,
}


class ModelSpec(BaseModel):
    """A classifier kind, its validated hyperparameters and its seed."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: ModelKind
    hyperparameters: HyperParameters
    seed: int = Field(42, ge=0, le=UINT64_MASK)

    @model_validator(mode="before")
    @classmethod
    def _params_for_kind(cls, data: Any) -> Any:
        if not isinstance(data, dict) or "kind" not in data:
            return data
        kind = ModelKind(data["kind"])
        params = data.get("hyperparameters") or {}
        params_cls = PARAMS_BY_KIND[kind]
        if isinstance(params, BaseModel):
            if not isinstance(params, params_cls):
                raise ValueError(f"{type(params).__name__} is not valid for kind {kind}")
            return data
        return {**data, "hyperparameters": params_cls.model_validate(params)}

    @classmethod
    def default(cls, kind: ModelKind | str, seed: int = 42, **overrides: Any) -> "ModelSpec":
        """Ledger defaults for `kind`, with keyword overrides."""
        return cls(kind=ModelKind(kind), hyperparameters=overrides, seed=seed)

    def with_seed(self, seed: int) -> "ModelSpec":
        return self.model_copy(update={"seed": seed & UINT64_MASK})
