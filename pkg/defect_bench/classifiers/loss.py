"""Binary cross-entropy.

Standard form: mean of -(y log p + (1 - y) log(1 - p)). The study prints the
second coefficient as (1 - p), which does not depend on the label; the
label-weighted form is the one implemented.
"""

import numpy as np

from defect_bench.constants import PROBA_EPS
from defect_bench.errors import ModelError


def bce_loss(y, y_hat) -> float:
    """Mean binary cross-entropy with probabilities clamped to [1e-12, 1 - 1e-12]."""
    y = np.asarray(y, dtype=np.float64).ravel()
    y_hat = np.asarray(y_hat, dtype=np.float64).ravel()
    if y.size == 0:
        raise ModelError("bce_loss of an empty vector")
    if y.shape != y_hat.shape:
        raise ModelError(f"bce_loss length mismatch: {y.size} labels, {y_hat.size} predictions")
    p = np.clip(y_hat, PROBA_EPS, 1.0 - PROBA_EPS)
    losses = -(y * np.log(p) + (1.0 - y) * np.log1p(-p))
    return max(float(losses.mean()), 0.0)
