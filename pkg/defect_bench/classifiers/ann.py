"""Feed-forward network: one hidden ReLU layer, sigmoid output, BCE loss.

Training uses mini-batch Adam starting from the configured learning rate.
The rate is divided by `lr_decay_factor` whenever validation loss stops
improving for `plateau_patience` epochs, and training stops early after
`early_stop_patience` epochs without improvement. The weights with the best
validation loss are the ones kept.
"""

from typing import ClassVar

import numpy as np
from pydantic import Field

from defect_bench.classifiers.base import TrainedModel, check_training_data, sigmoid
from defect_bench.classifiers.loss import bce_loss
from defect_bench.classifiers.optim import AdamState, adam_step
from defect_bench.constants import SEED_OFFSET_VALIDATION
from defect_bench.errors import ModelError
from defect_bench.models.arrays import FloatArray
from defect_bench.models.specs import AnnParams, ModelKind, ModelSpec
from defect_bench.numerics.random import RandomSource
from defect_bench.utils.logger import get_logger

logger = get_logger(__name__)

# Parameter order used by the gradient and optimizer lists: w1, b1, w2, b2
Params = list[np.ndarray]


class AnnModel(TrainedModel):
    kind: ClassVar[ModelKind] = ModelKind.ANN

    w1: FloatArray
    b1: FloatArray
    w2: FloatArray
    b2: float
    best_epoch: int
    epochs_run: int
    validation_log: list[float] = Field(default_factory=list)
    learning_rates: list[float] = Field(default_factory=list, description="Rate in effect for each epoch")

    @property
    def params(self) -> Params:
        return [self.w1, self.b1, self.w2, np.asarray(self.b2)]

    def _proba(self, x: np.ndarray) -> np.ndarray:
        return forward(self.params, x)


def init_params(n_inputs: int, hidden_units: int, rng: RandomSource) -> Params:
    """Uniform init in +-sqrt(6 / (fan_in + fan_out)); zero biases."""
    limit1 = np.sqrt(6.0 / (n_inputs + hidden_units))
    w1 = rng.uniform(-limit1, limit1, (n_inputs, hidden_units))
    limit2 = np.sqrt(6.0 / (hidden_units + 1))
    w2 = rng.uniform(-limit2, limit2, (hidden_units,))
    return [w1, np.zeros(hidden_units), w2, np.zeros(())]


def zero_params(n_inputs: int, hidden_units: int) -> Params:
    return [np.zeros((n_inputs, hidden_units)), np.zeros(hidden_units), np.zeros(hidden_units), np.zeros(())]


def forward(params: Params, x: np.ndarray) -> np.ndarray:
    w1, b1, w2, b2 = params
    hidden = np.maximum(x @ w1 + b1, 0.0)
    return sigmoid(hidden @ w2 + b2)


def ann_loss_and_grads(params: Params, x: np.ndarray, y: np.ndarray) -> tuple[float, Params]:
    """Mean BCE on the batch and its gradient for every parameter array."""
    w1, b1, w2, b2 = params
    pre = x @ w1 + b1
    hidden = np.maximum(pre, 0.0)
    p = sigmoid(hidden @ w2 + b2)
    loss = bce_loss(y, p)

    d_out = (p - y) / y.size
    g_w2 = hidden.T @ d_out
    g_b2 = np.asarray(d_out.sum())
    d_pre = np.outer(d_out, w2) * (pre > 0.0)
    g_w1 = x.T @ d_pre
    g_b1 = d_pre.sum(axis=0)
    return loss, [g_w1, g_b1, g_w2, g_b2]


def validation_split(y, fraction: float, rng: RandomSource) -> tuple[np.ndarray, np.ndarray]:
    """Stratified (train_rows, validation_rows), both sorted.

    Each class gives round(fraction * count) rows to validation, at least one,
    while keeping at least one row of that class for training.
    """
    y = np.asarray(y)
    train_parts, val_parts = [], []
    for c in (0, 1):
        members = np.flatnonzero(y == c)
        if members.size == 0:
            continue
        take = min(max(1, int(round(fraction * members.size))), members.size - 1)
        shuffled = rng.shuffle(members)
        val_parts.append(shuffled[:take])
        train_parts.append(shuffled[take:])
    val = np.sort(np.concatenate(val_parts)) if val_parts else np.array([], dtype=np.int64)
    train = np.sort(np.concatenate(train_parts)) if train_parts else np.array([], dtype=np.int64)
    return train, val


def train_ann(x, y_train, x_val, y_val, spec: ModelSpec, initial_params: Params | None = None) -> AnnModel:
    params: AnnParams = spec.hyperparameters
    x, y = check_training_data(x, y_train)
    x_val = np.asarray(x_val, dtype=np.float64)
    y_val = np.asarray(y_val, dtype=np.float64)
    if y_val.size == 0:
        raise ModelError("ANN training needs a non-empty validation set")
    if x_val.ndim != 2 or x_val.shape != (y_val.size, x.shape[1]):
        raise ModelError(f"validation features have shape {x_val.shape}, expected ({y_val.size}, {x.shape[1]})")
    yf = y.astype(np.float64)

    rng = RandomSource(spec.seed)
    weights = (
        [np.array(p, dtype=np.float64) for p in initial_params]
        if initial_params is not None
        else init_params(x.shape[1], params.hidden_units, rng)
    )
    learning_rate = params.learning_rate
    state = AdamState.fresh(weights, learning_rate, params.beta1, params.beta2, params.epsilon)

    best_loss = bce_loss(y_val, forward(weights, x_val))
    best_weights = [w.copy() for w in weights]
    best_epoch = 0
    reference = best_loss
    since_improvement = since_decay = 0
    train_log: list[float] = []
    val_log: list[float] = []
    rates: list[float] = []
    epoch = 0

    for epoch in range(1, params.max_epochs + 1):
        rates.append(learning_rate)
        order = rng.permutation(yf.size)
        for start in range(0, yf.size, params.batch_size):
            batch = order[start : start + params.batch_size]
            _, grads = ann_loss_and_grads(weights, x[batch], yf[batch])
            weights, state = adam_step(weights, grads, state)

        train_log.append(bce_loss(yf, forward(weights, x)))
        val_loss = bce_loss(y_val, forward(weights, x_val))
        val_log.append(val_loss)

        if val_loss < best_loss:
            best_loss = val_loss
            best_weights = [w.copy() for w in weights]
            best_epoch = epoch
        if val_loss < reference - params.min_delta:
            reference = val_loss
            since_improvement = since_decay = 0
            continue

        since_improvement += 1
        since_decay += 1
        if since_improvement >= params.early_stop_patience:
            logger.info("ANN early stop", extra={"epoch": epoch, "best_epoch": best_epoch})
            break
        if since_decay >= params.plateau_patience:
            learning_rate /= params.lr_decay_factor
            state = state.with_learning_rate(learning_rate)
            since_decay = 0
            logger.info("ANN learning rate decayed", extra={"epoch": epoch, "learning_rate": learning_rate})

    w1, b1, w2, b2 = best_weights
    return AnnModel(
        spec=spec,
        n_features=x.shape[1],
        training_log=train_log,
        w1=w1,
        b1=b1,
        w2=w2,
        b2=float(b2),
        best_epoch=best_epoch,
        epochs_run=epoch,
        validation_log=val_log,
        learning_rates=rates,
    )


def fit_ann(x, y, spec: ModelSpec) -> AnnModel:
    """Carve a stratified validation split from the training rows, then train."""
    params: AnnParams = spec.hyperparameters
    x, y = check_training_data(x, y)
    rng = RandomSource(spec.seed + SEED_OFFSET_VALIDATION)
    train_rows, val_rows = validation_split(y, params.validation_fraction, rng)
    return train_ann(x[train_rows], y[train_rows], x[val_rows], y[val_rows], spec)
