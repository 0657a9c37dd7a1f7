"""Particle clouds: finite samples of a latent distribution."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from latent_transport.common.errors import DimMismatch
from latent_transport.common.types import DOMAIN_TAGS
from latent_transport.numkit import frozen_array


@dataclass(frozen=True, eq=False)
class ParticleCloud:
    """``n x dim`` latent samples with a domain tag (the empirical measure)."""

    points: np.ndarray
    domain_tag: str = "source"

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2:
            raise DimMismatch(f"points must be 2-D (n x dim), got shape {pts.shape}")
        if pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ValueError("cloud must contain at least one point of dimension >= 1")
        if self.domain_tag not in DOMAIN_TAGS:
            raise ValueError(f"domain_tag must be one of {DOMAIN_TAGS}, got {self.domain_tag!r}")
        object.__setattr__(self, "points", frozen_array(pts, name="points"))

    @property
    def dim(self) -> int:
        return int(self.points.shape[1])

    @property
    def n(self) -> int:
        return int(self.points.shape[0])

    def __len__(self) -> int:
        return self.n

    def with_tag(self, domain_tag: str) -> "ParticleCloud":
        return ParticleCloud(self.points, domain_tag)

    def subset(self, indices: ArrayLike) -> "ParticleCloud":
        return ParticleCloud(self.points[np.asarray(indices)], self.domain_tag)


def require_same_dim(first: ParticleCloud, second: ParticleCloud) -> int:
    if first.dim != second.dim:
        raise DimMismatch(f"cloud dimensions differ: {first.dim} vs {second.dim}")
    return first.dim


__all__ = ["ParticleCloud", "require_same_dim"]
