"""Gaussian measures: fitting, densities, scores, KL and the Bures-Wasserstein oracle."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.typing import ArrayLike
from scipy import linalg as sla

from latent_transport.common.errors import Asymmetric, DimMismatch, NotPSD
from latent_transport.measures.cloud import ParticleCloud
from latent_transport.numkit import (
    RIDGE_SCALE,
    SYMMETRY_TOL,
    as_matrix,
    as_vector,
    cholesky,
    psd_inv_sqrt,
    psd_sqrt,
    symmetrize,
)

_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True, eq=False)
class GaussianMeasure:
    """Multivariate normal with mean vector and symmetric PSD covariance."""

    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self) -> None:
        mean = as_vector(self.mean, name="mean")
        d = mean.shape[0]
        cov = np.asarray(self.covariance, dtype=float)
        if cov.ndim == 0:
            cov = cov.reshape(1, 1)
        cov = as_matrix(cov, name="covariance", shape=(d, d))
        scale = max(1.0, float(np.max(np.abs(cov))))
        if float(np.max(np.abs(cov - cov.T))) > SYMMETRY_TOL * scale:
            raise Asymmetric("covariance is not symmetric")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "covariance", as_matrix(symmetrize(cov), name="covariance"))

    @classmethod
    def isotropic(cls, dim: int, *, mean: ArrayLike | float = 0.0, variance: float = 1.0) -> "GaussianMeasure":
        loc = np.broadcast_to(np.asarray(mean, dtype=float), (dim,))
        return cls(loc, variance * np.eye(dim))

    @property
    def dim(self) -> int:
        return int(self.mean.shape[0])

    @cached_property
    def chol(self) -> np.ndarray:
        return cholesky(self.covariance)

    @cached_property
    def _pd_chol(self) -> np.ndarray:
        lower = self.chol
        if np.any(np.diag(lower) <= 0.0):
            raise NotPSD("covariance is singular; density and score are undefined")
        return lower

    @cached_property
    def precision(self) -> np.ndarray:
        lower = self._pd_chol
        return symmetrize(sla.cho_solve((lower, True), np.eye(self.dim), check_finite=False))

    @cached_property
    def logdet(self) -> float:
        return float(2.0 * np.sum(np.log(np.diag(self._pd_chol))))

    def same_as(self, other: "GaussianMeasure") -> bool:
        return bool(np.array_equal(self.mean, other.mean) and np.array_equal(self.covariance, other.covariance))


def _points(g: GaussianMeasure, z: ArrayLike) -> tuple[np.ndarray, bool]:
    arr = np.asarray(z, dtype=float)
    single = arr.ndim <= 1
    arr = np.atleast_2d(arr.reshape(1, -1) if single else arr)
    if arr.shape[1] != g.dim:
        raise DimMismatch(f"point dimension {arr.shape[1]} does not match measure dimension {g.dim}")
    return arr, single


def _require_same_dim(g0: GaussianMeasure, g1: GaussianMeasure) -> None:
    if g0.dim != g1.dim:
        raise DimMismatch(f"measure dimensions differ: {g0.dim} vs {g1.dim}")


def gaussian_fit(cloud: ParticleCloud, ridge: float | None = None) -> GaussianMeasure:
    """Sample mean and population (divide-by-n) covariance plus ``ridge * I``.

    ``ridge=None`` uses ``1e-6`` times the mean diagonal of the sample covariance.
    """
    pts = cloud.points
    mean = pts.mean(axis=0)
    centered = pts - mean
    cov = symmetrize(centered.T @ centered / pts.shape[0])
    if ridge is None:
        ridge = max(RIDGE_SCALE * float(np.mean(np.diag(cov))), 1e-12)
    if ridge < 0.0:
        raise ValueError(f"ridge must be >= 0, got {ridge}")
    return GaussianMeasure(mean, cov + ridge * np.eye(cloud.dim))


def gaussian_logpdf(g: GaussianMeasure, z: ArrayLike) -> float | np.ndarray:
    """Exact log density at one point (float) or at each row of an ``n x d`` array."""
    pts, single = _points(g, z)
    white = sla.solve_triangular(g._pd_chol, (pts - g.mean).T, lower=True, check_finite=False)
    values = -0.5 * (g.dim * _LOG_2PI + g.logdet + np.sum(white * white, axis=0))
    return float(values[0]) if single else values


def gaussian_score(g: GaussianMeasure, z: ArrayLike) -> np.ndarray:
    """Score ``-Sigma^{-1} (z - mu)`` at one point or at each row."""
    pts, single = _points(g, z)
    score = -sla.cho_solve((g._pd_chol, True), (pts - g.mean).T, check_finite=False).T
    return score[0] if single else score


def gaussian_kl(g0: GaussianMeasure, g1: GaussianMeasure) -> float:
    """Closed-form ``KL(g0 || g1)``."""
    _require_same_dim(g0, g1)
    if g0.same_as(g1):
        return 0.0
    delta = g1.mean - g0.mean
    value = 0.5 * (
        float(np.sum(g1.precision * g0.covariance))
        + float(delta @ g1.precision @ delta)
        - g0.dim
        + g1.logdet
        - g0.logdet
    )
    return max(value, 0.0)


def bures_w2_squared(g0: GaussianMeasure, g1: GaussianMeasure) -> float:
    _require_same_dim(g0, g1)
    root1 = psd_sqrt(g1.covariance)
    cross = psd_sqrt(symmetrize(root1 @ g0.covariance @ root1))
    gap = g0.mean - g1.mean
    value = float(gap @ gap) + float(np.trace(g0.covariance) + np.trace(g1.covariance) - 2.0 * np.trace(cross))
    return max(value, 0.0)


def bures_w2(g0: GaussianMeasure, g1: GaussianMeasure) -> float:
    """Closed-form 2-Wasserstein distance between Gaussians."""
    return math.sqrt(bures_w2_squared(g0, g1))


def monge_map(g_s: GaussianMeasure, g_t: GaussianMeasure) -> tuple[np.ndarray, np.ndarray]:
    """Optimal affine map ``z -> A z + b`` pushing ``g_s`` onto ``g_t``."""
    _require_same_dim(g_s, g_t)
    root_s = psd_sqrt(g_s.covariance)
    inv_root_s = psd_inv_sqrt(g_s.covariance)
    middle = psd_sqrt(symmetrize(root_s @ g_t.covariance @ root_s))
    linear = symmetrize(inv_root_s @ middle @ inv_root_s)
    offset = g_t.mean - linear @ g_s.mean
    return linear, offset


__all__ = [
    "GaussianMeasure",
    "gaussian_fit",
    "gaussian_logpdf",
    "gaussian_score",
    "gaussian_kl",
    "bures_w2",
    "bures_w2_squared",
    "monge_map",
]
