"""Gradient boosting in log-odds space with Newton-step leaf values.

Rounds are strictly sequential: each tree fits the residuals left by the
model built so far.
"""

from typing import ClassVar

import numpy as np

from defect_bench.classifiers.base import TrainedModel, check_training_data, sigmoid
from defect_bench.classifiers.loss import bce_loss
from defect_bench.classifiers.tree import Tree, grow_tree
from defect_bench.models.specs import BoostingParams, ModelKind, ModelSpec

# Hessian sums below this are treated as this value in the Newton step
_HESSIAN_FLOOR = 1e-12


class BoostingModel(TrainedModel):
    kind: ClassVar[ModelKind] = ModelKind.GRADIENT_BOOSTING

    initial_log_odds: float
    shrinkage: float
    trees: list[Tree]

    def _log_odds(self, x: np.ndarray) -> np.ndarray:
        f = np.full(x.shape[0], self.initial_log_odds)
        for tree in self.trees:
            f += self.shrinkage * tree.predict_value(x)
        return f

    def _proba(self, x: np.ndarray) -> np.ndarray:
        return sigmoid(self._log_odds(x))


def _newton_leaf_values(tree: Tree, leaves: np.ndarray, residual: np.ndarray, hessian: np.ndarray) -> np.ndarray:
    numerator = np.bincount(leaves, weights=residual, minlength=tree.node_count)
    denominator = np.bincount(leaves, weights=hessian, minlength=tree.node_count)
    return numerator / np.maximum(denominator, _HESSIAN_FLOOR)


def train_gradient_boosting(x, y, spec: ModelSpec) -> BoostingModel:
    params: BoostingParams = spec.hyperparameters
    x, y = check_training_data(x, y)
    yf = y.astype(np.float64)

    rate = float(yf.mean())
    f0 = float(np.log(rate / (1.0 - rate)))
    f = np.full(yf.size, f0)
    history = [bce_loss(yf, sigmoid(f))]
    trees: list[Tree] = []

    for _ in range(params.n_rounds):
        p = sigmoid(f)
        residual = yf - p
        tree = grow_tree(
            x,
            residual,
            criterion="squared_error",
            max_depth=params.max_depth,
            min_samples_split=2 * params.min_samples_leaf,
            min_samples_leaf=params.min_samples_leaf,
        )
        leaves = tree.apply(x)
        values = _newton_leaf_values(tree, leaves, residual, p * (1.0 - p))
        tree = tree.with_leaf_values(values)
        trees.append(tree)
        f = f + params.shrinkage * values[leaves]
        history.append(bce_loss(yf, sigmoid(f)))

    return BoostingModel(
        spec=spec,
        n_features=x.shape[1],
        training_log=history,
        initial_log_odds=f0,
        shrinkage=params.shrinkage,
        trees=trees,
    )
