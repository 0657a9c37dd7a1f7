"""Euler-Maruyama simulation of affine (Ornstein-Uhlenbeck form) dynamics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numpy.typing import ArrayLike

from latent_transport.common.errors import DimMismatch, Divergence, NonpositiveTheta
from latent_transport.measures import ParticleCloud
from latent_transport.numkit import RngStream, as_matrix, as_vector
from latent_transport.reporting.export import write_csv
from latent_transport.transport import TransportParams
from latent_transport.utils import moving_average, validate_count, validate_positive

DIVERGENCE_LIMIT = 1e9


@dataclass(frozen=True, eq=False)
class SdeSpec:
    """``dz = (-theta (z - mean) + offset) dt + diag(sigma) dW`` on a fixed step grid."""

    theta: np.ndarray
    mean: np.ndarray
    sigma: np.ndarray
    step: float
    steps: int
    offset: np.ndarray | None = None

    def __post_init__(self) -> None:
        theta = np.asarray(self.theta, dtype=float)
        if theta.ndim < 2:
            theta = np.atleast_1d(theta)
            theta = np.diag(theta) if theta.shape[0] > 1 else theta.reshape(1, 1)
        theta = as_matrix(theta, name="theta")
        d = theta.shape[0]
        if theta.shape != (d, d):
            raise DimMismatch(f"theta must be square, got shape {theta.shape}")
        mean = as_vector(np.broadcast_to(np.asarray(self.mean, dtype=float), (d,)), name="mean", dim=d)
        sigma = as_vector(np.broadcast_to(np.asarray(self.sigma, dtype=float), (d,)), name="sigma", dim=d)
        if np.any(sigma < 0.0):
            raise ValueError("sigma must be >= 0")
        validate_positive("step", self.step)
        validate_count("steps", self.steps, minimum=0)
        offset = np.zeros(d) if self.offset is None else self.offset
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "step", float(self.step))
        object.__setattr__(self, "steps", int(self.steps))
        object.__setattr__(self, "offset", as_vector(offset, name="offset", dim=d))

    @classmethod
    def from_transport(cls, params: TransportParams, steps: int = 1, step: float = 1.0) -> "SdeSpec":
        """Dynamics whose single unit step is the transport map: ``theta = I - A``, offset ``b``."""
        d = params.dim
        return cls(
            theta=np.eye(d) - params.A,
            mean=np.zeros(d),
            sigma=np.exp(0.5 * params.log_d),
            step=step,
            steps=steps,
            offset=params.b,
        )

    @property
    def dim(self) -> int:
        return int(self.mean.shape[0])

    @property
    def horizon(self) -> float:
        return self.step * self.steps

    def drift(self, z: np.ndarray) -> np.ndarray:
        return -(z - self.mean) @ self.theta.T + self.offset


@dataclass(frozen=True)
class Trajectory:
    """Snapshots of a particle ensemble at recorded times."""

    times: tuple[float, ...]
    snapshots: tuple[np.ndarray, ...] = field(repr=False)

    @property
    def final(self) -> np.ndarray:
        return self.snapshots[-1]

    def rows(self) -> list[list[float | int]]:
        out: list[list[float | int]] = []
        for t, snap in zip(self.times, self.snapshots):
            for pid, point in enumerate(snap):
                out.append([t, pid, *point.tolist()])
        return out


def simulate(spec: SdeSpec, z0: ParticleCloud, rng: RngStream, *, record_every: int | None = None) -> Trajectory:
    """Advance every particle ``spec.steps`` times; optionally record every ``record_every`` steps.

    The noise comes from one dedicated stream as an ``n x d`` block per step.
    """
    if z0.dim != spec.dim:
        raise DimMismatch(f"cloud dimension {z0.dim} does not match SDE dimension {spec.dim}")
    if record_every is not None:
        validate_count("record_every", record_every)
    z = np.array(z0.points, dtype=float)
    scale = spec.sigma * math.sqrt(spec.step)
    times = [0.0]
    snapshots = [z.copy()]
    for k in range(1, spec.steps + 1):
        z = z + spec.drift(z) * spec.step + scale * rng.normal(z.shape)
        if not np.all(np.abs(z) <= DIVERGENCE_LIMIT):
            raise Divergence(f"particles left the +-{DIVERGENCE_LIMIT:g} box at step {k}; reduce the step")
        if record_every is not None and (k % record_every == 0 or k == spec.steps):
            times.append(k * spec.step)
            snapshots.append(z.copy())
    if record_every is None:
        times.append(spec.horizon)
        snapshots.append(z)
    return Trajectory(tuple(times), tuple(snapshots))


def euler_maruyama(spec: SdeSpec, z0: ParticleCloud, rng: RngStream) -> ParticleCloud:
    return ParticleCloud(simulate(spec, z0, rng).final, z0.domain_tag)


def ou_stationary_variance(theta: float, sigma: float) -> float:
    """``sigma^2 / (2 theta)`` for the scalar OU process."""
    if not theta > 0.0:
        raise NonpositiveTheta(f"theta must be > 0, got {theta}")
    return sigma * sigma / (2.0 * theta)


def variance_trace_series(trajectory: Trajectory, window: int) -> np.ndarray:
    """Trailing moving average of the total sample variance at each snapshot."""
    totals = [float(np.sum(np.var(snap, axis=0))) for snap in trajectory.snapshots]
    return moving_average(totals, window)


def write_trajectory(trajectory: Trajectory, path: str | Path) -> Path:
    dim = trajectory.snapshots[0].shape[1]
    header = ["time", "particle_id", *[f"z{i}" for i in range(dim)]]
    return write_csv(path, header, trajectory.rows())


__all__ = [
    "SdeSpec",
    "Trajectory",
    "simulate",
    "euler_maruyama",
    "ou_stationary_variance",
    "variance_trace_series",
    "write_trajectory",
]
