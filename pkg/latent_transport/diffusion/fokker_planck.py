"""Explicit finite-volume solver for the 1-D Fokker-Planck equation.

Fluxes live on cell faces: upwind advection, central diffusion and zero flux
through both boundaries, so the update conserves mass to round-off.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from latent_transport.common.errors import UnstableStep
from latent_transport.measures import ParticleCloud
from latent_transport.numkit import frozen_array
from latent_transport.utils import norm_cdf, validate_count, validate_nonnegative, validate_positive

MASS_TOL = 1e-6
DIFFUSION_LIMIT = 0.4
ADVECTION_LIMIT = 0.5


@dataclass(frozen=True, eq=False)
class DensityGrid:
    lo: float
    hi: float
    cells: int
    values: np.ndarray

    def __post_init__(self) -> None:
        if not self.hi > self.lo:
            raise ValueError(f"grid needs hi > lo, got [{self.lo}, {self.hi}]")
        validate_count("cells", self.cells, minimum=2)
        values = frozen_array(self.values, name="values")
        if values.shape != (self.cells,):
            raise ValueError(f"values must have {self.cells} entries, got shape {values.shape}")
        if np.any(values < 0.0):
            raise ValueError("density values must be >= 0")
        mass = float(values.sum()) * (self.hi - self.lo) / self.cells
        if abs(mass - 1.0) > MASS_TOL:
            raise ValueError(f"density must integrate to 1 within {MASS_TOL:g}, got {mass!r}")
        object.__setattr__(self, "values", values)

    @classmethod
    def from_cdf(cls, lo: float, hi: float, cells: int, cdf: Callable[[float], float]) -> "DensityGrid":
        """Cell averages of a distribution, renormalized to unit mass on ``[lo, hi]``."""
        edges = np.linspace(lo, hi, cells + 1)
        probs = np.diff([cdf(float(e)) for e in edges])
        probs = np.maximum(probs, 0.0)
        return cls(lo, hi, cells, probs / probs.sum() * cells / (hi - lo))

    @classmethod
    def normal(cls, lo: float, hi: float, cells: int, mean: float = 0.0, variance: float = 1.0) -> "DensityGrid":
        validate_positive("variance", variance)
        sd = float(np.sqrt(variance))
        return cls.from_cdf(lo, hi, cells, lambda x: norm_cdf((x - mean) / sd))

    @property
    def width(self) -> float:
        return (self.hi - self.lo) / self.cells

    @property
    def centers(self) -> np.ndarray:
        return self.lo + (np.arange(self.cells) + 0.5) * self.width

    @property
    def edges(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.cells + 1)

    def mass(self) -> float:
        return float(self.values.sum()) * self.width

    def mean(self) -> float:
        return float(np.sum(self.centers * self.values) * self.width)

    def variance(self) -> float:
        gap = self.centers - self.mean()
        return float(np.sum(gap * gap * self.values) * self.width)


def fokker_planck_1d(
    theta: float,
    mean: float,
    sigma: float,
    grid: DensityGrid,
    step: float,
    steps: int,
    *,
    offset: float = 0.0,
) -> DensityGrid:
    """Evolve ``dp/dt = -d/dz(mu p) + 0.5 sigma^2 d2p/dz2`` with ``mu(z) = -theta (z - mean) + offset``."""
    validate_positive("step", step)
    validate_count("steps", steps, minimum=0)
    validate_nonnegative("sigma", sigma)
    dz = grid.width
    diffusion = 0.5 * sigma * sigma
    if sigma > 0.0 and step > DIFFUSION_LIMIT * dz * dz / (sigma * sigma):
        raise UnstableStep(
            f"step {step:g} exceeds the diffusive limit {DIFFUSION_LIMIT * dz * dz / (sigma * sigma):g}"
        )
    faces = grid.edges[1:-1]
    velocity = -theta * (faces - mean) + offset
    if step * float(np.max(np.abs(velocity), initial=0.0)) / dz > ADVECTION_LIMIT:
        raise UnstableStep(f"step {step:g} violates the advective CFL limit {ADVECTION_LIMIT}")
    forward = np.maximum(velocity, 0.0)
    backward = np.minimum(velocity, 0.0)

    p = np.array(grid.values, dtype=float)
    flux = np.zeros(grid.cells + 1)
    ratio = step / dz
    for _ in range(int(steps)):
        flux[1:-1] = forward * p[:-1] + backward * p[1:] - diffusion * (p[1:] - p[:-1]) / dz
        p = p - ratio * (flux[1:] - flux[:-1])
    p = np.maximum(p, 0.0)
    return DensityGrid(grid.lo, grid.hi, grid.cells, p)


def histogram_tv_distance(cloud: ParticleCloud, grid: DensityGrid, bins: int) -> float:
    """Total-variation distance between a 1-D particle histogram and a grid density.

    Both are binned on ``bins`` equal intervals of ``[lo, hi]``; particles outside
    the grid count fully toward the distance.
    """
    validate_count("bins", bins)
    if cloud.dim != 1:
        raise ValueError(f"histogram comparison needs a 1-D cloud, got dim {cloud.dim}")
    pts = cloud.points[:, 0]
    bin_edges = np.linspace(grid.lo, grid.hi, bins + 1)
    counts, _ = np.histogram(pts, bins=bin_edges)
    empirical = counts / pts.shape[0]
    outside = 1.0 - float(empirical.sum())
    cumulative = np.concatenate(([0.0], np.cumsum(grid.values) * grid.width))
    model = np.diff(np.interp(bin_edges, grid.edges, cumulative))
    return 0.5 * (float(np.sum(np.abs(empirical - model))) + outside)


__all__ = ["DensityGrid", "fokker_planck_1d", "histogram_tv_distance"]
