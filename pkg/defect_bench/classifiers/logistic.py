"""Logistic regression trained by full-batch gradient descent on BCE + L2."""

from typing import ClassVar

import numpy as np

from defect_bench.classifiers.base import TrainedModel, check_training_data, sigmoid
from defect_bench.classifiers.loss import bce_loss
from defect_bench.models.arrays import FloatArray
from defect_bench.models.specs import LogisticParams, ModelKind, ModelSpec
from defect_bench.utils.logger import get_logger

logger = get_logger(__name__)


class LogisticModel(TrainedModel):
    kind: ClassVar[ModelKind] = ModelKind.LOGISTIC_REGRESSION

    weights: FloatArray
    bias: float
    iterations: int
    converged: bool

    def _proba(self, x: np.ndarray) -> np.ndarray:
        return sigmoid(x @ self.weights + self.bias)


def logistic_loss_and_grad(
    weights: np.ndarray, bias: float, x: np.ndarray, y: np.ndarray, l2: float
) -> tuple[float, np.ndarray, float]:
    """Penalized BCE and its gradient with respect to (weights, bias)."""
    p = sigmoid(x @ weights + bias)
    residual = p - y
    n = y.size
    loss = bce_loss(y, p) + l2 * float(weights @ weights)
    grad_w = x.T @ residual / n + 2.0 * l2 * weights
    grad_b = float(residual.sum() / n)
    return loss, grad_w, grad_b


def train_logistic_regression(x, y, spec: ModelSpec) -> LogisticModel:
    params: LogisticParams = spec.hyperparameters
    x, y = check_training_data(x, y, require_both_classes=False)
    yf = y.astype(np.float64)

    weights = np.zeros(x.shape[1])
    bias = 0.0
    history: list[float] = []
    converged = False
    iteration = 0
    for iteration in range(1, params.max_iters + 1):
        loss, grad_w, grad_b = logistic_loss_and_grad(weights, bias, x, yf, params.l2)
        history.append(loss)
        if max(float(np.max(np.abs(grad_w), initial=0.0)), abs(grad_b)) <= params.tol:
            converged = True
            break
        weights = weights - params.learning_rate * grad_w
        bias -= params.learning_rate * grad_b

    if not converged:
        logger.warning(
            "Logistic regression hit the iteration cap",
            extra={"iterations": iteration, "final_loss": history[-1]},
        )
    return LogisticModel(
        spec=spec,
        n_features=x.shape[1],
        training_log=history,
        weights=weights,
        bias=bias,
        iterations=iteration,
        converged=converged,
    )
