"""Random forest: bagged Gini trees with a fresh feature subset at each split."""

import math
from typing import ClassVar

import numpy as np
from joblib import Parallel, delayed

from defect_bench.classifiers.base import TrainedModel, check_training_data
from defect_bench.classifiers.tree import Tree, grow_tree
from defect_bench.constants import UINT64_MASK
from defect_bench.models.specs import ForestParams, ModelKind, ModelSpec
from defect_bench.numerics.random import RandomSource, scramble_seed
from defect_bench.utils.logger import get_logger

logger = get_logger(__name__)


class ForestModel(TrainedModel):
    kind: ClassVar[ModelKind] = ModelKind.RANDOM_FOREST

    trees: list[Tree]
    max_features: int
    oob_accuracy: float | None = None

    def _proba(self, x: np.ndarray) -> np.ndarray:
        return np.mean([tree.predict_value(x) for tree in self.trees], axis=0)


def _grow_one(x: np.ndarray, y: np.ndarray, params: ForestParams, max_features: int, seed: int) -> tuple[Tree, np.ndarray]:
    rng = RandomSource(seed)
    n = y.size
    rows = rng.bootstrap_indices(n) if params.bootstrap else np.arange(n)
    tree = grow_tree(
        x[rows],
        y[rows],
        criterion="gini",
        max_depth=params.max_depth,
        min_samples_split=params.min_samples_split,
        max_features=max_features,
        rng=rng,
    )
    return tree, rows


def _oob_accuracy(x: np.ndarray, y: np.ndarray, grown: list[tuple[Tree, np.ndarray]]) -> float | None:
    n = y.size
    votes = np.zeros(n)
    counts = np.zeros(n)
    for tree, rows in grown:
        out_of_bag = np.ones(n, dtype=bool)
        out_of_bag[rows] = False
        if out_of_bag.any():
            votes[out_of_bag] += tree.predict_value(x[out_of_bag])
            counts[out_of_bag] += 1
    scored = counts > 0
    if not scored.any():
        return None
    predicted = (votes[scored] / counts[scored] >= 0.5).astype(np.int64)
    return float(np.mean(predicted == y[scored]))


def tree_seeds(seed: int, n_trees: int) -> list[int]:
    """Per-tree seeds: scrambled model seed plus tree index.

    Fixed per tree, so the forest does not depend on the worker count. The
    scramble keeps the trees of models with adjacent seeds (consecutive CV
    folds) on disjoint streams.
    """
    base = scramble_seed(seed)
    return [(base + t) & UINT64_MASK for t in range(n_trees)]


def train_random_forest(x, y, spec: ModelSpec) -> ForestModel:
    params: ForestParams = spec.hyperparameters
    x, y = check_training_data(x, y)
    p = x.shape[1]
    max_features = min(params.max_features or max(1, math.isqrt(p)), p)

    seeds = tree_seeds(spec.seed, params.n_trees)
    if params.n_jobs == 1:
        grown = [_grow_one(x, y, params, max_features, s) for s in seeds]
    else:
        grown = Parallel(n_jobs=params.n_jobs)(delayed(_grow_one)(x, y, params, max_features, s) for s in seeds)

    oob = _oob_accuracy(x, y, grown) if params.bootstrap else None
    logger.debug(
        "Forest trained",
        extra={"trees": params.n_trees, "max_features": max_features, "oob_accuracy": oob},
    )
    return ForestModel(
        spec=spec,
        n_features=p,
        trees=[tree for tree, _ in grown],
        max_features=max_features,
        oob_accuracy=oob,
    )
