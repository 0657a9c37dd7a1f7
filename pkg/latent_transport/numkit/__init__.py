"""Dense linear algebra and deterministic seeded randomness."""

from .linalg import (
    PSD_TOL,
    RIDGE_SCALE,
    SYMMETRY_TOL,
    as_matrix,
    as_vector,
    cholesky,
    frozen_array,
    psd_inv_sqrt,
    psd_sqrt,
    symmetrize,
)
from .rng import RngStream, make_rng

__all__ = [
    "PSD_TOL",
    "RIDGE_SCALE",
    "SYMMETRY_TOL",
    "as_matrix",
    "as_vector",
    "cholesky",
    "frozen_array",
    "psd_inv_sqrt",
    "psd_sqrt",
    "symmetrize",
    "RngStream",
    "make_rng",
]
