"""Soft-margin SVM on the dual, solved by SMO.

Labels are mapped to -1/+1. Decision value f(x) = sum_i alpha_i y_i K(x_i, x) + b.
The probability reported through the uniform contract is sigmoid(f); it is
not calibrated.

Each SMO step updates one pair of dual variables. The first of the pair is
the maximal KKT violator; the second maximizes the second-order decrease of
the dual objective among the violators on the other side. Training stops
when the violation gap drops to `tol`.
"""

from functools import lru_cache
from typing import Callable, ClassVar, Literal

import numpy as np

from defect_bench.classifiers.base import TrainedModel, check_training_data, sigmoid
from defect_bench.errors import ModelError
from defect_bench.models.arrays import FloatArray
from defect_bench.models.specs import ModelKind, ModelSpec, SvmParams
from defect_bench.utils.logger import get_logger

logger = get_logger(__name__)

# Up to this many rows the Gram matrix is computed once; above it rows are cached
FULL_GRAM_MAX_ROWS = 2500
KERNEL_ROW_CACHE = 1024
PREDICT_BATCH = 2048

# Floor on the pair curvature K_ii + K_jj - 2 K_ij
_TAU = 1e-12


def kernel_matrix(a: np.ndarray, b: np.ndarray, kernel: Literal["rbf", "linear"], gamma: float) -> np.ndarray:
    """K(a_i, b_j) for every pair of rows."""
    dots = a @ b.T
    if kernel == "linear":
        return dots
    sq = np.sum(a * a, axis=1)[:, None] + np.sum(b * b, axis=1)[None, :] - 2.0 * dots
    return np.exp(-gamma * np.maximum(sq, 0.0))


class SvmModel(TrainedModel):
    kind: ClassVar[ModelKind] = ModelKind.SVM

    kernel: Literal["rbf", "linear"]
    gamma: float
    C: float
    bias: float
    alphas: FloatArray
    signed_labels: FloatArray
    support_vectors: FloatArray
    support_coef: FloatArray
    iterations: int
    kkt_gap: float
    converged: bool

    @property
    def weights(self) -> np.ndarray:
        """Primal weight vector; only defined for the linear kernel."""
        if self.kernel != "linear":
            raise ModelError("weights exist only for the linear kernel")
        if self.support_coef.size == 0:
            return np.zeros(self.n_features)
        return self.support_coef @ self.support_vectors

    def _decision(self, x: np.ndarray) -> np.ndarray:
        if self.support_coef.size == 0:
            return np.full(x.shape[0], self.bias)
        out = np.empty(x.shape[0])
        for start in range(0, x.shape[0], PREDICT_BATCH):
            chunk = x[start : start + PREDICT_BATCH]
            k = kernel_matrix(chunk, self.support_vectors, self.kernel, self.gamma)
            out[start : start + PREDICT_BATCH] = k @ self.support_coef + self.bias
        return out

    def _proba(self, x: np.ndarray) -> np.ndarray:
        return sigmoid(self._decision(x))


def _kernel_rows(x: np.ndarray, kernel: Literal["rbf", "linear"], gamma: float) -> Callable[[int], np.ndarray]:
    if x.shape[0] <= FULL_GRAM_MAX_ROWS:
        gram = kernel_matrix(x, x, kernel, gamma)
        return gram.__getitem__

    sq = np.sum(x * x, axis=1)

    @lru_cache(maxsize=KERNEL_ROW_CACHE)
    def row(i: int) -> np.ndarray:
        dots = x @ x[i]
        if kernel == "linear":
            return dots
        return np.exp(-gamma * np.maximum(sq + sq[i] - 2.0 * dots, 0.0))

    return row


class _Smo:
    """Mutable solver state for one training run.

    `grad` is the gradient of the dual objective 0.5 a'Qa - sum(a), with
    Q_ij = y_i y_j K_ij.
    """

    def __init__(self, x: np.ndarray, y: np.ndarray, params: SvmParams, gamma: float):
        self.n = y.size
        self.y = y
        self.C = params.C
        self.row = _kernel_rows(x, params.kernel, gamma)
        self.kernel_diag = np.ones(self.n) if params.kernel == "rbf" else np.sum(x * x, axis=1)
        self.alphas = np.zeros(self.n)
        self.grad = -np.ones(self.n)
        self.gap = np.inf

    def select_pair(self, tol: float) -> tuple[int, int] | None:
        """Working pair, or None once the KKT violation gap is within `tol`."""
        y, a, C = self.y, self.alphas, self.C
        score = -y * self.grad
        up = ((y > 0) & (a < C)) | ((y < 0) & (a > 0))
        low = ((y < 0) & (a < C)) | ((y > 0) & (a > 0))
        if not up.any() or not low.any():
            self.gap = 0.0
            return None

        i = int(np.argmax(np.where(up, score, -np.inf)))
        g_max = float(score[i])
        self.gap = g_max - float(np.min(score[low]))
        if self.gap <= tol:
            return None

        drop = g_max - score
        curvature = self.kernel_diag[i] + self.kernel_diag - 2.0 * self.row(i)
        curvature = np.where(curvature > 0.0, curvature, _TAU)
        gain = np.where(low & (drop > 0.0), -(drop * drop) / curvature, np.inf)
        return i, int(np.argmin(gain))

    def update(self, i: int, j: int) -> None:
        y, a, C, g = self.y, self.alphas, self.C, self.grad
        ki, kj = self.row(i), self.row(j)
        curvature = max(ki[i] + kj[j] - 2.0 * ki[j], _TAU)
        ai, aj = a[i], a[j]

        # clip to the box along the line y_i a_i + y_j a_j = const
        if y[i] != y[j]:
            delta = (-g[i] - g[j]) / curvature
            diff = ai - aj
            ai_new, aj_new = ai + delta, aj + delta
            if diff > 0.0:
                if aj_new < 0.0:
                    ai_new, aj_new = diff, 0.0
                if ai_new > C:
                    ai_new, aj_new = C, C - diff
            else:
                if ai_new < 0.0:
                    ai_new, aj_new = 0.0, -diff
                if aj_new > C:
                    ai_new, aj_new = C + diff, C
        else:
            delta = (g[i] - g[j]) / curvature
            total = ai + aj
            ai_new, aj_new = ai - delta, aj + delta
            if total > C:
                if ai_new > C:
                    ai_new, aj_new = C, total - C
                if aj_new > C:
                    ai_new, aj_new = total - C, C
            else:
                if aj_new < 0.0:
                    ai_new, aj_new = total, 0.0
                if ai_new < 0.0:
                    ai_new, aj_new = 0.0, total

        g += y * (y[i] * (ai_new - ai) * ki + y[j] * (aj_new - aj) * kj)
        a[i], a[j] = ai_new, aj_new

    def bias(self) -> float:
        """b from the free support vectors, or the midpoint of the feasible range."""
        y, a, C = self.y, self.alphas, self.C
        yg = y * self.grad
        at_upper, at_lower = a >= C, a <= 0.0
        free = ~(at_upper | at_lower)
        if free.any():
            rho = float(np.mean(yg[free]))
        else:
            ub_mask = (at_upper & (y < 0)) | (at_lower & (y > 0))
            lb_mask = (at_upper & (y > 0)) | (at_lower & (y < 0))
            ub = float(np.min(yg[ub_mask])) if ub_mask.any() else float(np.max(yg))
            lb = float(np.max(yg[lb_mask])) if lb_mask.any() else float(np.min(yg))
            rho = (ub + lb) / 2.0
        return -rho


def train_svm(x, y, spec: ModelSpec) -> SvmModel:
    params: SvmParams = spec.hyperparameters
    x, y01 = check_training_data(x, y)
    y = np.where(y01 == 1, 1.0, -1.0)
    gamma = params.gamma if params.gamma is not None else 1.0 / x.shape[1]

    smo = _Smo(x, y, params, gamma)
    iterations = 0
    converged = False
    while iterations < params.max_iter:
        pair = smo.select_pair(params.tol)
        if pair is None:
            converged = True
            break
        smo.update(*pair)
        iterations += 1

    if not converged:
        logger.warning(
            "SMO stopped at the iteration cap",
            extra={"iterations": iterations, "rows": smo.n, "kkt_gap": smo.gap},
        )

    alphas = np.clip(smo.alphas, 0.0, params.C)
    support = alphas > 0.0
    return SvmModel(
        spec=spec,
        n_features=x.shape[1],
        kernel=params.kernel,
        gamma=gamma,
        C=params.C,
        bias=smo.bias(),
        alphas=alphas,
        signed_labels=y,
        support_vectors=x[support],
        support_coef=alphas[support] * y[support],
        iterations=iterations,
        kkt_gap=float(smo.gap),
        converged=converged,
    )
