"""Gaussian naive Bayes."""

from typing import ClassVar

import numpy as np

from defect_bench.classifiers.base import TrainedModel, check_training_data
from defect_bench.models.arrays import FloatArray
from defect_bench.models.specs import ModelKind, ModelSpec, NaiveBayesParams


class NaiveBayesModel(TrainedModel):
    """Class priors plus per-class, per-feature normal densities.

    Variances are maximum-likelihood (divide by the class count) and floored.
    Row order of `means`/`variances` is class 0 then class 1.
    """

    kind: ClassVar[ModelKind] = ModelKind.NAIVE_BAYES

    priors: FloatArray
    means: FloatArray
    variances: FloatArray

    def joint_log_likelihood(self, x: np.ndarray) -> np.ndarray:
        """(n, 2) array of log P(c) + sum_j log N(x_j; mu_cj, var_cj)."""
        out = np.empty((x.shape[0], 2))
        for c in (0, 1):
            var = self.variances[c]
            log_norm = -0.5 * np.sum(np.log(2.0 * np.pi * var))
            out[:, c] = np.log(self.priors[c]) + log_norm - 0.5 * np.sum((x - self.means[c]) ** 2 / var, axis=1)
        return out

    def _proba(self, x: np.ndarray) -> np.ndarray:
        jll = self.joint_log_likelihood(x)
        return np.exp(jll[:, 1] - np.logaddexp(jll[:, 0], jll[:, 1]))


def train_gaussian_naive_bayes(x, y, spec: ModelSpec) -> NaiveBayesModel:
    params: NaiveBayesParams = spec.hyperparameters
    x, y = check_training_data(x, y)

    priors = np.array([np.mean(y == 0), np.mean(y == 1)])
    means = np.vstack([x[y == c].mean(axis=0) for c in (0, 1)])
    variances = np.vstack([x[y == c].var(axis=0) for c in (0, 1)])
    variances = np.maximum(variances, params.variance_floor)

    return NaiveBayesModel(
        spec=spec,
        n_features=x.shape[1],
        priors=priors,
        means=means,
        variances=variances,
    )
