"""Reparameterized Monte Carlo estimate of the transport functional.

Works for Gaussian and mixture sources. With a fixed ``rng`` the source draws
and the noise are common random numbers across parameter values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from latent_transport.common.errors import DimMismatch
from latent_transport.measures import (
    GaussianMeasure,
    MixtureMeasure,
    gaussian_logpdf,
    mixture_logpdf,
    sample,
)
from latent_transport.numkit import RngStream
from latent_transport.transport.operator import pushforward_gaussian, pushforward_mixture, transport_sample
from latent_transport.transport.params import TransportParams
from latent_transport.utils import validate_count, validate_nonnegative


@dataclass(frozen=True)
class MonteCarloLoss:
    total: float
    std_error: float
    cost_term: float
    kl_term: float
    lam: float
    n: int


def transport_loss_mc(
    params: TransportParams,
    source: GaussianMeasure | MixtureMeasure,
    g_t: GaussianMeasure,
    lam: float,
    n: int,
    rng: RngStream,
) -> MonteCarloLoss:
    validate_nonnegative("lambda", lam)
    validate_count("n", n, minimum=2)
    if not (params.dim == source.dim == g_t.dim):
        raise DimMismatch(f"dimensions differ: params {params.dim}, source {source.dim}, target {g_t.dim}")

    z_s = sample(source, n, rng.child(0)).points
    z_t = transport_sample(params, z_s, rng.child(1))
    cost = np.sum((z_t - z_s) ** 2, axis=1)

    if isinstance(source, MixtureMeasure):
        log_q = mixture_logpdf(pushforward_mixture(params, source), z_t)
    else:
        log_q = gaussian_logpdf(pushforward_gaussian(params, source), z_t)
    log_ratio = np.asarray(log_q) - np.asarray(gaussian_logpdf(g_t, z_t))

    per_sample = cost + lam * log_ratio
    return MonteCarloLoss(
        total=float(per_sample.mean()),
        std_error=float(per_sample.std(ddof=1) / math.sqrt(n)),
        cost_term=float(cost.mean()),
        kl_term=float(log_ratio.mean()),
        lam=float(lam),
        n=int(n),
    )


__all__ = ["MonteCarloLoss", "transport_loss_mc"]
