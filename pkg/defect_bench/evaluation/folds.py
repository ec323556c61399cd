"""Stratified k-fold assignment."""

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from defect_bench.errors import EvaluationError
from defect_bench.models.arrays import IntArray
from defect_bench.numerics.random import RandomSource


class FoldAssignment(BaseModel):
    """Fold index of every instance."""

    model_config = ConfigDict(frozen=True)

    k: int = Field(..., ge=2)
    fold_of: IntArray
    seed: int

    @model_validator(mode="after")
    def _check_range(self) -> "FoldAssignment":
        if self.fold_of.size and (self.fold_of.min() < 0 or self.fold_of.max() >= self.k):
            raise ValueError(f"fold indices must lie in [0, {self.k})")
        return self

    def test_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.fold_of == fold)

    def train_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.fold_of != fold)

    @property
    def fold_sizes(self) -> np.ndarray:
        return np.bincount(self.fold_of, minlength=self.k)


def stratified_kfold(labels, k: int, rng: RandomSource, dataset: str = "") -> FoldAssignment:
    """Shuffle each class with `rng` and deal it round-robin over the folds.

    Dealing continues from the fold where the previous class stopped, so
    fold sizes differ by at most one overall as well as per class.
    """
    labels = np.asarray(labels)
    where = f"{dataset}: " if dataset else ""
    if k < 2:
        raise EvaluationError(f"{where}k must be at least 2, got {k}")

    fold_of = np.empty(labels.size, dtype=np.int64)
    start = 0
    for c in (0, 1):
        members = np.flatnonzero(labels == c)
        if members.size < k:
            raise EvaluationError(f"{where}class {c} has {members.size} instances, fewer than k={k}")
        shuffled = rng.shuffle(members)
        fold_of[shuffled] = (start + np.arange(shuffled.size)) % k
        start = (start + shuffled.size) % k

    return FoldAssignment(k=k, fold_of=fold_of, seed=rng.seed)
