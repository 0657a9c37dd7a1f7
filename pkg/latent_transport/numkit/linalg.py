"""Dense linear algebra primitives on validated, read-only float64 arrays."""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike
from scipy import linalg as sla

from latent_transport.common.errors import Asymmetric, DimMismatch, NotPSD
from latent_transport.common.types import Matrix, Vector

SYMMETRY_TOL = 1e-10
PSD_TOL = 1e-8
RIDGE_SCALE = 1e-6


def frozen_array(values: ArrayLike, *, name: str = "array") -> np.ndarray:
    """Copy to float64, require finite entries, and mark read-only."""
    arr = np.array(values, dtype=float, copy=True)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must contain only finite values")
    arr.setflags(write=False)
    return arr


def as_vector(values: ArrayLike, *, name: str = "vector", dim: int | None = None) -> Vector:
    arr = frozen_array(np.atleast_1d(np.asarray(values, dtype=float)), name=name)
    if arr.ndim != 1:
        raise DimMismatch(f"{name} must be 1-D, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise DimMismatch(f"{name} must have length {dim}, got {arr.shape[0]}")
    return arr


def as_matrix(values: ArrayLike, *, name: str = "matrix", shape: tuple[int, int] | None = None) -> Matrix:
    """Validated read-only Matrix (rows x cols, finite entries)."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    arr = frozen_array(arr, name=name)
    if arr.ndim != 2:
        raise DimMismatch(f"{name} must be 2-D, got shape {arr.shape}")
    if shape is not None and arr.shape != shape:
        raise DimMismatch(f"{name} must have shape {shape}, got {arr.shape}")
    return arr


def symmetrize(matrix: ArrayLike) -> np.ndarray:
    m = np.asarray(matrix, dtype=float)
    return 0.5 * (m + m.T)



def _check_square_symmetric(m: np.ndarray) -> float:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimMismatch(f"matrix must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix must contain only finite values")
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    if m.size and float(np.max(np.abs(m - m.T))) > SYMMETRY_TOL * scale:
        raise Asymmetric(f"matrix is not symmetric (max deviation {np.max(np.abs(m - m.T)):.3e})")
    return scale


def cholesky(matrix: ArrayLike) -> Matrix:
    """Lower-triangular ``L`` with ``L @ L.T == M`` for symmetric PSD ``M``.

    Positive definite inputs go through LAPACK. Semidefinite inputs (zero
    pivots within tolerance) use an outer-product sweep that leaves the
    degenerate columns at zero, so zero-variance directions still factor.
    """
    m = np.asarray(matrix, dtype=float)
    scale = _check_square_symmetric(m)
    m = symmetrize(m)
    try:
        lower = sla.cholesky(m, lower=True, check_finite=False)
    except sla.LinAlgError:
        lower = _semidefinite_cholesky(m, PSD_TOL * scale)
    return as_matrix(lower, name="cholesky factor")


def _semidefinite_cholesky(m: np.ndarray, tol: float) -> np.ndarray:
    d = m.shape[0]
    lower = np.zeros_like(m)
    for j in range(d):
        pivot = m[j, j] - lower[j, :j] @ lower[j, :j]
        if pivot < -tol:
            raise NotPSD(f"negative pivot {pivot:.3e} at index {j}")
        if pivot <= tol:
            continue
        root = np.sqrt(pivot)
        lower[j, j] = root
        lower[j + 1 :, j] = (m[j + 1 :, j] - lower[j + 1 :, :j] @ lower[j, :j]) / root
    return lower


def _psd_eigh(matrix: ArrayLike) -> tuple[np.ndarray, np.ndarray]:
    m = np.asarray(matrix, dtype=float)
    _check_square_symmetric(m)
    eigvals, eigvecs = sla.eigh(symmetrize(m), check_finite=False)
    floor = PSD_TOL * max(1.0, float(np.max(np.abs(eigvals)))) if eigvals.size else PSD_TOL
    if eigvals.size and eigvals[0] < -floor:
        raise NotPSD(f"matrix has negative eigenvalue {eigvals[0]:.3e}")
    return np.clip(eigvals, 0.0, None), eigvecs


def psd_sqrt(matrix: ArrayLike) -> Matrix:
    """Symmetric PSD square root via the symmetric eigendecomposition."""
    eigvals, eigvecs = _psd_eigh(matrix)
    root = (eigvecs * np.sqrt(eigvals)) @ eigvecs.T
    return as_matrix(symmetrize(root), name="psd_sqrt")


def psd_inv_sqrt(matrix: ArrayLike) -> Matrix:
    """Inverse symmetric square root; requires a positive definite input."""
    eigvals, eigvecs = _psd_eigh(matrix)
    if eigvals.size and eigvals[0] <= 0.0:
        raise NotPSD("matrix is singular; inverse square root undefined")
    root = (eigvecs / np.sqrt(eigvals)) @ eigvecs.T
    return as_matrix(symmetrize(root), name="psd_inv_sqrt")


__all__ = [
    "SYMMETRY_TOL",
    "PSD_TOL",
    "RIDGE_SCALE",
    "frozen_array",
    "as_vector",
    "as_matrix",
    "symmetrize",
    "cholesky",
    "psd_sqrt",
    "psd_inv_sqrt",
]
