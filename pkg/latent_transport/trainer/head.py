"""Linear regression readout on latent vectors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from latent_transport.common.errors import DimMismatch
from latent_transport.numkit import as_vector


@dataclass(frozen=True, eq=False)
class LinearHead:
    """``y = weights . z + intercept``."""

    weights: np.ndarray
    intercept: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "weights", as_vector(self.weights, name="weights"))
        object.__setattr__(self, "intercept", float(self.intercept))

    @classmethod
    def fit(cls, points: ArrayLike, labels: ArrayLike) -> "LinearHead":
        """Ordinary least squares with an intercept column."""
        x = np.atleast_2d(np.asarray(points, dtype=float))
        y = np.asarray(labels, dtype=float)
        if y.shape != (x.shape[0],):
            raise DimMismatch(f"expected {x.shape[0]} labels, got shape {y.shape}")
        design = np.hstack([x, np.ones((x.shape[0], 1))])
        coef, *_ = np.linalg.lstsq(design, y, rcond=None)
        return cls(coef[:-1], coef[-1])

    @classmethod
    def from_vector(cls, vector: ArrayLike) -> "LinearHead":
        vec = np.asarray(vector, dtype=float).ravel()
        return cls(vec[:-1], vec[-1])

    @property
    def dim(self) -> int:
        return int(self.weights.shape[0])

    def predict(self, points: ArrayLike) -> np.ndarray:
        x = np.atleast_2d(np.asarray(points, dtype=float))
        if x.shape[1] != self.dim:
            raise DimMismatch(f"points have dimension {x.shape[1]}, head expects {self.dim}")
        return x @ self.weights + self.intercept

    def to_vector(self) -> np.ndarray:
        return np.append(self.weights, self.intercept)

    def to_dict(self) -> dict[str, object]:
        return {"weights": [float(w) for w in self.weights], "intercept": self.intercept}


__all__ = ["LinearHead"]
