"""Unified training objective: task loss plus weighted transport and PAC terms.

A term whose weight is zero is not evaluated and is reported as 0.0, so the
logged decomposition only lists the components that shape the objective.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from latent_transport.common.errors import DimMismatch
from latent_transport.measures import GaussianMeasure
from latent_transport.pacbayes import PosteriorSpec, posterior_kl, posterior_kl_grad
from latent_transport.trainer.config import TrainConfig
from latent_transport.trainer.head import LinearHead
from latent_transport.transport import TransportParams, transport_loss, transport_loss_grad


@dataclass(frozen=True)
class ObjectiveValue:
    total: float
    task: float
    transport: float
    pac: float
    alpha: float
    beta: float


def _batch(params: TransportParams, head: LinearHead, points: ArrayLike, labels: ArrayLike) -> tuple[np.ndarray, np.ndarray]:
    x = np.atleast_2d(np.asarray(points, dtype=float))
    y = np.asarray(labels, dtype=float)
    if x.shape[0] < 1:
        raise ValueError("batch must be nonempty")
    if x.shape[1] != params.dim or head.dim != params.dim:
        raise DimMismatch(f"batch dimension {x.shape[1]}, transport {params.dim}, head {head.dim}")
    if y.shape != (x.shape[0],):
        raise DimMismatch(f"expected {x.shape[0]} labels, got shape {y.shape}")
    return x, y


def task_loss_grad(
    params: TransportParams, head: LinearHead, points: ArrayLike, labels: ArrayLike
) -> tuple[float, np.ndarray, np.ndarray]:
    """MSE of the head on transported batch means, with gradients over params and head."""
    x, y = _batch(params, head, points, labels)
    m = x.shape[0]
    moved = x @ params.A.T + params.b
    residual = moved @ head.weights + head.intercept - y
    loss = float(np.mean(residual * residual))

    grad_head = np.append(2.0 / m * moved.T @ residual, 2.0 / m * np.sum(residual))
    grad_moved = 2.0 / m * np.outer(residual, head.weights)
    grad_params = np.concatenate([(grad_moved.T @ x).ravel(), grad_moved.sum(axis=0), np.zeros(params.dim)])
    return loss, grad_params, grad_head


def _posterior(params: TransportParams, config: TrainConfig) -> PosteriorSpec:
    return PosteriorSpec.around(
        params,
        posterior_var=config.posterior_var,
        prior_var=config.prior_var,
        prior_mean=TransportParams.identity(params.dim, config.init_noise_var).to_vector(),
    )


@dataclass(frozen=True, eq=False)
class ObjectiveGradient:
    """Gradient pieces of the objective.

    ``sampled`` is over the evaluated transport vector (task plus weighted
    transport), ``steering`` its transport part alone. The PAC pieces are
    over the posterior mean and log variances.
    """

    sampled: np.ndarray
    steering: np.ndarray
    head: np.ndarray
    pac_mean: np.ndarray
    pac_log_var: np.ndarray

    @property
    def params(self) -> np.ndarray:
        return self.sampled + self.pac_mean


def unified_loss_grad(
    params: TransportParams,
    head: LinearHead,
    points: ArrayLike,
    labels: ArrayLike,
    g_s: GaussianMeasure,
    g_t: GaussianMeasure,
    config: TrainConfig,
    posterior: PosteriorSpec | None = None,
) -> tuple[ObjectiveValue, ObjectiveGradient]:
    """Objective value and its exact gradient pieces on one batch.

    ``posterior`` defaults to a posterior centred at ``params`` with variance
    ``config.posterior_var`` and the prior at the training initialization
    (identity map, noise ``init_noise_var``).
    """
    task, grad_task, grad_head = task_loss_grad(params, head, points, labels)
    k = grad_task.shape[0]
    steering = np.zeros(k)
    transport = 0.0
    if config.alpha > 0.0:
        transport = transport_loss(params, g_s, g_t, config.lam).total
        steering = config.alpha * transport_loss_grad(params, g_s, g_t, config.lam)
    pac = 0.0
    pac_mean = np.zeros(k)
    pac_log_var = np.zeros(k)
    if config.beta > 0.0:
        rho = posterior if posterior is not None else _posterior(params, config)
        pac = posterior_kl(rho)
        grad_mean, grad_log_var = posterior_kl_grad(rho)
        pac_mean, pac_log_var = config.beta * grad_mean, config.beta * grad_log_var
    value = ObjectiveValue(
        total=task + config.alpha * transport + config.beta * pac,
        task=task,
        transport=transport,
        pac=pac,
        alpha=config.alpha,
        beta=config.beta,
    )
    gradient = ObjectiveGradient(
        sampled=grad_task + steering,
        steering=steering,
        head=grad_head,
        pac_mean=pac_mean,
        pac_log_var=pac_log_var,
    )
    return value, gradient


__all__ = [
    "ObjectiveValue",
    "ObjectiveGradient",
    "task_loss_grad",
    "unified_loss_grad",
]
