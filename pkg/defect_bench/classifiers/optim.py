"""Adam optimizer as a pure function over a list of parameter arrays."""

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from defect_bench.errors import ModelError


@dataclass(frozen=True)
class AdamState:
    """Moment estimates and step count; one m/v array per parameter array."""

    m: tuple[np.ndarray, ...]
    v: tuple[np.ndarray, ...]
    t: int = 0
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    @classmethod
    def fresh(
        cls,
        params: Sequence[np.ndarray],
        learning_rate: float = 1e-3,
        beta1: float = 0.9,
        beta2: float = 0.999,
        epsilon: float = 1e-8,
    ) -> "AdamState":
        zeros = tuple(np.zeros_like(np.asarray(p, dtype=np.float64)) for p in params)
        return cls(
            m=zeros,
            v=tuple(z.copy() for z in zeros),
            learning_rate=learning_rate,
            beta1=beta1,
            beta2=beta2,
            epsilon=epsilon,
        )

    def with_learning_rate(self, learning_rate: float) -> "AdamState":
        return replace(self, learning_rate=learning_rate)


def adam_step(
    params: Sequence[np.ndarray],
    grads: Sequence[np.ndarray],
    state: AdamState,
) -> tuple[list[np.ndarray], AdamState]:
    """One bias-corrected Adam update; inputs are not modified."""
    if len(params) != len(grads) or len(params) != len(state.m):
        raise ModelError("adam_step: params, grads and state differ in length")

    t = state.t + 1
    correction1 = 1.0 - state.beta1**t
    correction2 = 1.0 - state.beta2**t
    new_params, new_m, new_v = [], [], []
    for p, g, m, v in zip(params, grads, state.m, state.v):
        p = np.asarray(p, dtype=np.float64)
        g = np.asarray(g, dtype=np.float64)
        if g.shape != p.shape or m.shape != p.shape:
            raise ModelError(f"adam_step: shape mismatch {p.shape} vs {g.shape}")
        if not np.isfinite(g).all():
            raise ModelError("adam_step: non-finite gradient")
        m = state.beta1 * m + (1.0 - state.beta1) * g
        v = state.beta2 * v + (1.0 - state.beta2) * g * g
        m_hat = m / correction1
        v_hat = v / correction2
        new_params.append(p - state.learning_rate * m_hat / (np.sqrt(v_hat) + state.epsilon))
        new_m.append(m)
        new_v.append(v)

    return new_params, replace(state, m=tuple(new_m), v=tuple(new_v), t=t)
