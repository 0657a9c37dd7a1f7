"""Gaussian mixtures (scenario generators) and the shared sampling entry point."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.typing import ArrayLike
from scipy.special import logsumexp

from latent_transport.common.errors import DimMismatch
from latent_transport.measures.cloud import ParticleCloud
from latent_transport.measures.gaussian import GaussianMeasure, gaussian_logpdf
from latent_transport.numkit import RngStream
from latent_transport.utils import validate_count

WEIGHT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class MixtureMeasure:
    """Finite mixture of Gaussians with positive weights summing to one."""

    components: tuple[tuple[float, GaussianMeasure], ...]

    def __post_init__(self) -> None:
        comps = tuple((float(w), g) for w, g in self.components)
        if not comps:
            raise ValueError("mixture needs at least one component")
        if any(not w > 0.0 for w, _ in comps):
            raise ValueError("mixture weights must be positive")
        total = sum(w for w, _ in comps)
        if abs(total - 1.0) > WEIGHT_TOL:
            raise ValueError(f"mixture weights must sum to 1, got {total!r}")
        dims = {g.dim for _, g in comps}
        if len(dims) != 1:
            raise DimMismatch(f"mixture components disagree on dimension: {sorted(dims)}")
        object.__setattr__(self, "components", comps)

    @classmethod
    def equal_weights(cls, gaussians: Sequence[GaussianMeasure]) -> "MixtureMeasure":
        k = len(gaussians)
        weights = [1.0 / k] * k
        weights[-1] = 1.0 - sum(weights[:-1])
        return cls(tuple(zip(weights, gaussians)))

    @property
    def dim(self) -> int:
        return self.components[0][1].dim

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for w, _ in self.components])

    @property
    def gaussians(self) -> tuple[GaussianMeasure, ...]:
        return tuple(g for _, g in self.components)


def mixture_logpdf(mixture: MixtureMeasure, z: ArrayLike) -> float | np.ndarray:
    """Log density of the mixture via log-sum-exp over components."""
    parts = [np.log(w) + np.atleast_1d(gaussian_logpdf(g, z)) for w, g in mixture.components]
    values = logsumexp(np.vstack(parts), axis=0)
    return float(values[0]) if np.asarray(z).ndim <= 1 else values


def sample(
    measure: GaussianMeasure | MixtureMeasure,
    n: int,
    rng: RngStream,
    *,
    domain_tag: str = "source",
) -> ParticleCloud:
    """Draw ``n`` points; Gaussians are affine transforms of standard normals."""
    validate_count("n", n)
    if isinstance(measure, GaussianMeasure):
        noise = rng.normal((n, measure.dim))
        return ParticleCloud(measure.mean + noise @ measure.chol.T, domain_tag)
    if isinstance(measure, MixtureMeasure):
        labels = rng.choice(len(measure.components), n, p=measure.weights)
        noise = rng.normal((n, measure.dim))
        points = np.empty((n, measure.dim))
        for k, g in enumerate(measure.gaussians):
            mask = labels == k
            points[mask] = g.mean + noise[mask] @ g.chol.T
        return ParticleCloud(points, domain_tag)
    raise TypeError(f"cannot sample from {type(measure).__name__}")


__all__ = ["MixtureMeasure", "mixture_logpdf", "sample"]
