"""Applying the transport operator to points, clouds and measures."""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike

from latent_transport.common.errors import DimMismatch
from latent_transport.measures import GaussianMeasure, MixtureMeasure, ParticleCloud
from latent_transport.numkit import RngStream, symmetrize
from latent_transport.transport.params import TransportParams


def _as_points(params: TransportParams, z: ArrayLike) -> np.ndarray:
    arr = np.asarray(z, dtype=float)
    if arr.shape[-1:] != (params.dim,) or arr.ndim > 2:
        raise DimMismatch(f"input of shape {arr.shape} does not match transport dimension {params.dim}")
    return arr


def _require_dim(params: TransportParams, dim: int) -> None:
    if dim != params.dim:
        raise DimMismatch(f"measure dimension {dim} does not match transport dimension {params.dim}")


def transport_mean(params: TransportParams, z: ArrayLike) -> np.ndarray:
    """Deterministic part ``A z + b`` for one point or each row of a batch."""
    pts = _as_points(params, z)
    return pts @ params.A.T + params.b


def transport_sample(params: TransportParams, z: ArrayLike, rng: RngStream) -> np.ndarray:
    """Reparameterized draw ``A z + b + sqrt(exp(log_d)) * eps``."""
    mean = transport_mean(params, z)
    noise = rng.normal(mean.shape)
    return mean + np.exp(0.5 * params.log_d) * noise


def transport_cloud(params: TransportParams, cloud: ParticleCloud, rng: RngStream) -> ParticleCloud:
    """Push every particle through the stochastic map; the result is tagged ``transported``."""
    _require_dim(params, cloud.dim)
    return ParticleCloud(transport_sample(params, cloud.points, rng), "transported")


def pushforward_gaussian(params: TransportParams, g_s: GaussianMeasure) -> GaussianMeasure:
    _require_dim(params, g_s.dim)
    mean = params.A @ g_s.mean + params.b
    cov = symmetrize(params.A @ g_s.covariance @ params.A.T) + np.diag(params.noise_var)
    return GaussianMeasure(mean, cov)


def pushforward_mixture(params: TransportParams, mixture: MixtureMeasure) -> MixtureMeasure:
    """Componentwise pushforward; the weights are unchanged."""
    return MixtureMeasure(tuple((w, pushforward_gaussian(params, g)) for w, g in mixture.components))


__all__ = [
    "transport_mean",
    "transport_sample",
    "transport_cloud",
    "pushforward_gaussian",
    "pushforward_mixture",
]
