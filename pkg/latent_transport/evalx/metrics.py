"""Evaluation protocol: geometry, covariance calibration, energy, variance and risk."""

from __future__ import annotations

import math
from dataclasses import astuple, dataclass, fields
from typing import Protocol, Sequence

import numpy as np
from numpy.typing import ArrayLike

from latent_transport.common.errors import DimMismatch
from latent_transport.measures import GaussianMeasure, ParticleCloud, gaussian_score, require_same_dim
from latent_transport.numkit import RngStream
from latent_transport.sinkhorn import sinkhorn_cost
from latent_transport.transport import TransportParams, transport_cloud


class Predictor(Protocol):
    def predict(self, points: np.ndarray) -> np.ndarray: ...


@dataclass(frozen=True)
class MetricRecord:
    """One evaluated (scenario, method, seed) cell."""

    scenario: str
    method: str
    seed: int
    geometry: float
    risk: float
    variance: float
    energy: float

    def __post_init__(self) -> None:
        for name in ("geometry", "risk", "variance", "energy"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value < 0.0:
                raise ValueError(f"{name} must be finite and >= 0, got {value}")
            object.__setattr__(self, name, value)
        object.__setattr__(self, "seed", int(self.seed))

    @classmethod
    def header(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def to_row(self) -> list[object]:
        return list(astuple(self))

    def sort_key(self) -> tuple[str, str, int]:
        return (self.scenario, self.method, self.seed)


def geometry_discrepancy(
    transported: ParticleCloud,
    target_model: GaussianMeasure,
    transported_model: GaussianMeasure,
) -> float:
    """Mean squared gap between the two Gaussian score fields over the transported cloud."""
    if transported.n < 2:
        raise ValueError("geometry discrepancy needs at least 2 transported points")
    if not (transported.dim == target_model.dim == transported_model.dim):
        raise DimMismatch(
            f"dimensions differ: cloud {transported.dim}, target {target_model.dim}, "
            f"transported {transported_model.dim}"
        )
    if target_model.same_as(transported_model):
        return 0.0
    gap = gaussian_score(target_model, transported.points) - gaussian_score(transported_model, transported.points)
    return float(np.mean(np.sum(gap * gap, axis=1)))


def covariance_mismatch(sigma_t: ArrayLike, sigma_phi: ArrayLike) -> float:
    """Squared Frobenius distance between two covariance matrices."""
    a = np.atleast_2d(np.asarray(sigma_t, dtype=float))
    b = np.atleast_2d(np.asarray(sigma_phi, dtype=float))
    if a.shape != b.shape:
        raise DimMismatch(f"covariance shapes differ: {a.shape} vs {b.shape}")
    return float(np.sum((a - b) ** 2))


def covariance_calibration(params: TransportParams, g_s: GaussianMeasure, target: GaussianMeasure) -> float:
    """``||Sigma_t - diag(exp(log_d))||_F^2``; the noise covariance does not depend on the source point."""
    if not (params.dim == g_s.dim == target.dim):
        raise DimMismatch(f"dimensions differ: params {params.dim}, source {g_s.dim}, target {target.dim}")
    return covariance_mismatch(target.covariance, np.diag(params.noise_var))


def transport_energy(
    source: ParticleCloud,
    params: TransportParams,
    target: ParticleCloud,
    eps: float,
    iterations: int,
    rng: RngStream,
) -> float:
    """Raw entropic transport cost between the pushed-forward source and the target."""
    require_same_dim(source, target)
    cost, _ = sinkhorn_cost(transport_cloud(params, source, rng), target, eps, iterations)
    return cost


def variance_trace(params: TransportParams) -> float:
    return float(np.mean(params.noise_var))


def target_risk(predictor: Predictor, cloud: ParticleCloud, labels: Sequence[float] | np.ndarray) -> float:
    """Mean squared error of ``predictor`` on labelled target samples."""
    y = np.asarray(labels, dtype=float)
    if y.shape != (cloud.n,):
        raise DimMismatch(f"expected {cloud.n} labels, got shape {y.shape}")
    residual = np.asarray(predictor.predict(cloud.points), dtype=float) - y
    return float(np.mean(residual * residual))


__all__ = [
    "Predictor",
    "MetricRecord",
    "geometry_discrepancy",
    "covariance_mismatch",
    "covariance_calibration",
    "transport_energy",
    "variance_trace",
    "target_risk",
]
