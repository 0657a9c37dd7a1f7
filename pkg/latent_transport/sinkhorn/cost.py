"""Ground cost between particle clouds."""

from __future__ import annotations

from scipy.spatial.distance import cdist

from latent_transport.common.types import Matrix
from latent_transport.measures import ParticleCloud, require_same_dim
from latent_transport.numkit import as_matrix


def cost_matrix(x: ParticleCloud, y: ParticleCloud) -> Matrix:
    """Squared Euclidean costs ``C[i, j] = ||x_i - y_j||^2``."""
    require_same_dim(x, y)
    return as_matrix(cdist(x.points, y.points, metric="sqeuclidean"), name="cost")


__all__ = ["cost_matrix"]
