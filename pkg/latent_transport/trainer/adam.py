"""Functional Adam: the state is an immutable value returned by every step."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from latent_transport.common.errors import DimMismatch


@dataclass(frozen=True, eq=False)
class AdamState:
    m: np.ndarray
    v: np.ndarray
    t: int = 0

    @classmethod
    def zeros(cls, size: int) -> "AdamState":
        return cls(np.zeros(size), np.zeros(size), 0)


def adam_step(
    state: AdamState,
    params: ArrayLike,
    grad: ArrayLike,
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> tuple[AdamState, np.ndarray]:
    """One bias-corrected Adam update; returns the new state and parameters."""
    x = np.asarray(params, dtype=float)
    g = np.asarray(grad, dtype=float)
    if not (x.shape == g.shape == state.m.shape):
        raise DimMismatch(f"shapes differ: params {x.shape}, grad {g.shape}, state {state.m.shape}")
    t = state.t + 1
    m = beta1 * state.m + (1.0 - beta1) * g
    v = beta2 * state.v + (1.0 - beta2) * (g * g)
    m_hat = m / (1.0 - beta1**t)
    v_hat = v / (1.0 - beta2**t)
    return AdamState(m, v, t), x - lr * m_hat / (np.sqrt(v_hat) + eps)


__all__ = ["AdamState", "adam_step"]
