"""CART trees stored as flat arrays.

Both children of a node are numbered together, after their parent, and
subtrees are grown left first. A node with
`feature == -1` is a leaf. Rows with `x[feature] <= threshold` go left;
thresholds are midpoints between adjacent distinct training values.
"""

from dataclasses import dataclass
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from defect_bench.errors import ModelError
from defect_bench.models.arrays import FloatArray, IntArray
from defect_bench.numerics.random import RandomSource

LEAF = -1

Criterion = Literal["gini", "squared_error"]

# Splits that improve the criterion by less than this are not taken
_MIN_GAIN = 1e-12


def gini_impurity(y) -> float:
    """1 - sum of squared class proportions; 0 for an empty vector."""
    y = np.asarray(y)
    if y.size == 0:
        return 0.0
    p = float(np.mean(y == 1))
    return 1.0 - p * p - (1.0 - p) * (1.0 - p)


def split_gain(y, left_mask) -> float:
    """Parent Gini minus the size-weighted Gini of the two children."""
    y = np.asarray(y)
    left_mask = np.asarray(left_mask, dtype=bool)
    n = y.size
    if n == 0:
        return 0.0
    left, right = y[left_mask], y[~left_mask]
    weighted = (left.size * gini_impurity(left) + right.size * gini_impurity(right)) / n
    return gini_impurity(y) - weighted


@dataclass(frozen=True)
class TreeNode:
    """Read-only view of one node."""

    index: int
    feature_index: int
    threshold: float
    left: int
    right: int
    value: float

    @property
    def is_leaf(self) -> bool:
        return self.feature_index == LEAF


class Tree(BaseModel):
    """Flattened binary tree."""

    model_config = ConfigDict(frozen=True)

    feature: IntArray
    threshold: FloatArray
    left: IntArray
    right: IntArray
    value: FloatArray
    n_samples: IntArray

    @model_validator(mode="after")
    def _check_arrays(self) -> "Tree":
        n = self.feature.size
        if n == 0:
            raise ValueError("a tree needs at least one node")
        for name in ("threshold", "left", "right", "value", "n_samples"):
            if getattr(self, name).shape != (n,):
                raise ValueError(f"{name} must have {n} entries")
        internal = self.feature != LEAF
        children = np.concatenate([self.left[internal], self.right[internal]])
        if children.size and (children.min() <= 0 or children.max() >= n):
            raise ValueError("child index out of range")
        return self

    @property
    def node_count(self) -> int:
        return int(self.feature.size)

    @property
    def leaf_count(self) -> int:
        return int(np.sum(self.feature == LEAF))

    @property
    def depth(self) -> int:
        depths = np.zeros(self.node_count, dtype=np.int64)
        # children are always numbered after their parent
        for i in range(self.node_count):
            if self.feature[i] != LEAF:
                depths[self.left[i]] = depths[self.right[i]] = depths[i] + 1
        return int(depths.max())

    def node(self, index: int) -> TreeNode:
        return TreeNode(
            index=index,
            feature_index=int(self.feature[index]),
            threshold=float(self.threshold[index]),
            left=int(self.left[index]),
            right=int(self.right[index]),
            value=float(self.value[index]),
        )

    def apply(self, x) -> np.ndarray:
        """Leaf index reached by each row."""
        x = np.asarray(x, dtype=np.float64)
        idx = np.zeros(x.shape[0], dtype=np.int64)
        active = np.flatnonzero(self.feature[idx] != LEAF)
        while active.size:
            nodes = idx[active]
            go_left = x[active, self.feature[nodes]] <= self.threshold[nodes]
            idx[active] = np.where(go_left, self.left[nodes], self.right[nodes])
            active = active[self.feature[idx[active]] != LEAF]
        return idx

    def predict_value(self, x) -> np.ndarray:
        return self.value[self.apply(x)]

    def with_leaf_values(self, leaf_values: np.ndarray) -> "Tree":
        """Copy with `value` replaced at the leaves (internal values kept)."""
        values = np.where(self.feature == LEAF, leaf_values, self.value)
        return self.model_copy(update={"value": _frozen_copy(values)})


def _frozen_copy(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=np.float64)
    out.setflags(write=False)
    return out


def _best_split(
    x: np.ndarray,
    target: np.ndarray,
    features: np.ndarray,
    criterion: Criterion,
    min_samples_leaf: int,
) -> tuple[int, float, float]:
    """(feature, threshold, gain) of the best split, or (-1, nan, 0) if none."""
    n = target.size
    best_feature, best_threshold, best_gain = LEAF, float("nan"), _MIN_GAIN
    sizes_left = np.arange(1, n, dtype=np.float64)
    sizes_right = n - sizes_left
    total = float(target.sum())

    if criterion == "gini":
        parent = gini_impurity(target)
    else:
        parent = float(np.sum((target - target.mean()) ** 2))
        total_sq = float(np.sum(target * target))

    for f in features:
        order = np.argsort(x[:, f], kind="stable")
        xs = x[order, f]
        ts = target[order]
        csum = np.cumsum(ts)[:-1]

        if criterion == "gini":
            p_left = csum / sizes_left
            p_right = (total - csum) / sizes_right
            g_left = 2.0 * p_left * (1.0 - p_left)
            g_right = 2.0 * p_right * (1.0 - p_right)
            gains = parent - (sizes_left * g_left + sizes_right * g_right) / n
        else:
            csq = np.cumsum(ts * ts)[:-1]
            sse_left = csq - csum * csum / sizes_left
            sse_right = (total_sq - csq) - (total - csum) ** 2 / sizes_right
            gains = parent - sse_left - sse_right

        valid = xs[:-1] < xs[1:]
        if min_samples_leaf > 1:
            valid &= (sizes_left >= min_samples_leaf) & (sizes_right >= min_samples_leaf)
        if not valid.any():
            continue
        gains = np.where(valid, gains, -np.inf)
        i = int(np.argmax(gains))
        if gains[i] > best_gain:
            best_feature = int(f)
            best_gain = float(gains[i])
            best_threshold = float((xs[i] + xs[i + 1]) / 2.0)
            # adjacent doubles: the midpoint may round up onto the right value
            if not best_threshold < xs[i + 1]:
                best_threshold = float(xs[i])

    return best_feature, best_threshold, best_gain


def grow_tree(
    x,
    target,
    criterion: Criterion = "gini",
    max_depth: int = 16,
    min_samples_split: int = 2,
    min_samples_leaf: int = 1,
    max_features: int | None = None,
    rng: RandomSource | None = None,
) -> Tree:
    """Grow a tree greedily.

    `criterion="gini"` expects 0/1 targets and stores the class-1 fraction in
    each leaf; `"squared_error"` stores the leaf mean. When `max_features` is
    below the column count, a fresh feature subset is drawn from `rng` at
    every split; otherwise all features are tried in index order.
    """
    x = np.asarray(x, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    n, p = x.shape
    if n == 0:
        raise ModelError("cannot grow a tree on zero rows")
    subsample = max_features is not None and max_features < p
    if subsample and rng is None:
        raise ModelError("feature subsampling needs a RandomSource")
    all_features = np.arange(p)

    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    value: list[float] = []
    n_samples: list[int] = []

    def new_node(rows: np.ndarray) -> int:
        feature.append(LEAF)
        threshold.append(float("nan"))
        left.append(LEAF)
        right.append(LEAF)
        value.append(float(target[rows].mean()))
        n_samples.append(int(rows.size))
        return len(feature) - 1

    # depth-first, left child popped before right
    stack = [(new_node(np.arange(n)), np.arange(n), 0)]
    while stack:
        node, rows, depth = stack.pop()
        t = target[rows]
        if depth >= max_depth or rows.size < min_samples_split or np.all(t == t[0]):
            continue
        features = rng.sample_without_replacement(p, max_features) if subsample else all_features
        f, thr, _ = _best_split(x[rows], t, features, criterion, min_samples_leaf)
        if f == LEAF:
            continue
        go_left = x[rows, f] <= thr
        left_rows, right_rows = rows[go_left], rows[~go_left]
        feature[node] = f
        threshold[node] = thr
        left[node] = new_node(left_rows)
        right[node] = new_node(right_rows)
        stack.append((right[node], right_rows, depth + 1))
        stack.append((left[node], left_rows, depth + 1))

    return Tree(
        feature=feature,
        threshold=threshold,
        left=left,
        right=right,
        value=value,
        n_samples=n_samples,
    )
