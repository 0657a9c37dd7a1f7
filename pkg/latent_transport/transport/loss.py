"""Closed-form transport functional on Gaussian domains and its exact gradient."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from latent_transport.common.errors import DimMismatch
from latent_transport.measures import GaussianMeasure, gaussian_kl
from latent_transport.transport.operator import pushforward_gaussian
from latent_transport.transport.params import TransportParams
from latent_transport.utils import validate_nonnegative


@dataclass(frozen=True)
class TransportLossValue:
    total: float
    cost_term: float
    kl_term: float
    lam: float

    def to_dict(self) -> dict[str, float]:
        return {"total": self.total, "cost_term": self.cost_term, "kl_term": self.kl_term, "lambda": self.lam}


def _check(params: TransportParams, g_s: GaussianMeasure, g_t: GaussianMeasure, lam: float) -> None:
    validate_nonnegative("lambda", lam)
    if not (params.dim == g_s.dim == g_t.dim):
        raise DimMismatch(f"dimensions differ: params {params.dim}, source {g_s.dim}, target {g_t.dim}")


def expected_cost(params: TransportParams, g_s: GaussianMeasure) -> float:
    """``E ||z_s - T(z_s)||^2`` under ``z_s ~ g_s``."""
    gap = params.A - np.eye(params.dim)
    residual = gap @ g_s.mean + params.b
    spread = float(np.sum((gap @ g_s.covariance) * gap))
    return float(residual @ residual) + max(spread, 0.0) + float(np.sum(params.noise_var))


def transport_loss(
    params: TransportParams, g_s: GaussianMeasure, g_t: GaussianMeasure, lam: float
) -> TransportLossValue:
    """Expected squared displacement plus ``lam`` times ``KL(T#g_s || g_t)``."""
    _check(params, g_s, g_t, lam)
    cost = expected_cost(params, g_s)
    kl = gaussian_kl(pushforward_gaussian(params, g_s), g_t)
    return TransportLossValue(total=cost + lam * kl, cost_term=cost, kl_term=kl, lam=float(lam))


def transport_loss_grad(
    params: TransportParams, g_s: GaussianMeasure, g_t: GaussianMeasure, lam: float
) -> np.ndarray:
    """Gradient over the flat ``(A, b, log_d)`` layout of ``TransportParams.to_vector``."""
    _check(params, g_s, g_t, lam)
    d = params.dim
    A, b, var = params.A, params.b, params.noise_var
    mu_s, cov_s = g_s.mean, g_s.covariance

    gap = A - np.eye(d)
    residual = gap @ mu_s + b
    grad_A = 2.0 * np.outer(residual, mu_s) + 2.0 * gap @ cov_s
    grad_b = 2.0 * residual
    grad_log_d = var.copy()

    if lam > 0.0:
        push = pushforward_gaussian(params, g_s)
        delta = push.mean - g_t.mean
        spread = g_t.precision - push.precision
        pulled = g_t.precision @ delta
        grad_A += lam * (spread @ A @ cov_s + np.outer(pulled, mu_s))
        grad_b += lam * pulled
        grad_log_d += lam * 0.5 * np.diag(spread) * var

    return np.concatenate([grad_A.ravel(), grad_b, grad_log_d])


__all__ = ["TransportLossValue", "expected_cost", "transport_loss", "transport_loss_grad"]
