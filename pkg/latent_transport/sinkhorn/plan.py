"""Entropic optimal transport by log-domain Sinkhorn iterations."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike
from scipy.special import logsumexp

from latent_transport.common.errors import DimMismatch, NumericOverflow
from latent_transport.measures import ParticleCloud
from latent_transport.numkit import as_matrix, frozen_array
from latent_transport.sinkhorn.cost import cost_matrix
from latent_transport.utils import validate_count, validate_positive


@dataclass(frozen=True, eq=False)
class TransportPlan:
    """Entropic coupling between uniform marginals after a fixed number of sweeps."""

    coupling: np.ndarray
    epsilon: float
    iterations_run: int
    marginal_error: float

    @property
    def shape(self) -> tuple[int, int]:
        return tuple(self.coupling.shape)  # type: ignore[return-value]


def _marginal_error(coupling: np.ndarray) -> float:
    n, m = coupling.shape
    row_gap = np.max(np.abs(coupling.sum(axis=1) - 1.0 / n))
    col_gap = np.max(np.abs(coupling.sum(axis=0) - 1.0 / m))
    return float(max(row_gap, col_gap))


def sinkhorn_plan(cost: ArrayLike, eps: float, iterations: int) -> TransportPlan:
    """Run exactly ``iterations`` row/column scaling sweeps in the log domain.

    The scaled potentials ``u = f / eps`` and ``v = g / eps`` are updated with
    log-sum-exp reductions, so small ``eps`` never exponentiates a large cost.
    """
    c = as_matrix(cost, name="cost")
    validate_positive("eps", eps)
    validate_count("iterations", iterations)
    if np.any(c < 0.0):
        raise ValueError("cost must be non-negative")
    n, m = c.shape
    kernel = -c / eps
    log_a = -math.log(n)
    log_b = -math.log(m)
    u = np.zeros(n)
    v = np.zeros(m)
    for _ in range(int(iterations)):
        u = log_a - logsumexp(kernel + v[None, :], axis=1)
        v = log_b - logsumexp(kernel + u[:, None], axis=0)
    coupling = np.exp(kernel + u[:, None] + v[None, :])
    if not np.all(np.isfinite(coupling)):
        raise NumericOverflow("non-finite coupling entries in log-domain Sinkhorn")
    return TransportPlan(
        coupling=frozen_array(coupling, name="coupling"),
        epsilon=float(eps),
        iterations_run=int(iterations),
        marginal_error=_marginal_error(coupling),
    )


def transport_cost(plan: TransportPlan, cost: ArrayLike) -> float:
    """Raw transport cost ``sum_ij P_ij C_ij`` (no entropy correction)."""
    c = np.asarray(cost, dtype=float)
    if c.shape != plan.coupling.shape:
        raise DimMismatch(f"cost shape {c.shape} does not match plan shape {plan.coupling.shape}")
    return float(np.sum(plan.coupling * c))


def sinkhorn_cost(x: ParticleCloud, y: ParticleCloud, eps: float, iterations: int) -> tuple[float, TransportPlan]:
    """Entropic transport cost between two clouds and the plan that produced it."""
    c = cost_matrix(x, y)
    plan = sinkhorn_plan(c, eps, iterations)
    return transport_cost(plan, c), plan


__all__ = ["TransportPlan", "sinkhorn_plan", "transport_cost", "sinkhorn_cost"]
