"""Parameters of the affine-Gaussian transport operator."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np
from numpy.typing import ArrayLike

from latent_transport.common.errors import DimMismatch
from latent_transport.numkit import as_matrix, as_vector
from latent_transport.utils import validate_count

LOG_VAR_MIN = math.log(1e-12)
LOG_VAR_MAX = math.log(1e6)


def parameter_count(dim: int) -> int:
    """Length of the flat parameter vector ``(A, b, log_d)``."""
    return dim * dim + 2 * dim


@dataclass(frozen=True, eq=False)
class TransportParams:
    """``T(z) = A z + b + diag(exp(log_d / 2)) eps``.

    ``log_d`` is clipped to ``[ln 1e-12, ln 1e6]``; ``-inf`` therefore means the
    smallest admissible noise rather than an error.
    """

    A: np.ndarray
    b: np.ndarray
    log_d: np.ndarray

    def __post_init__(self) -> None:
        linear = np.asarray(self.A, dtype=float)
        if linear.ndim == 0:
            linear = linear.reshape(1, 1)
        linear = as_matrix(linear, name="A")
        d = linear.shape[0]
        if linear.shape != (d, d):
            raise DimMismatch(f"A must be square, got shape {linear.shape}")
        log_d = np.atleast_1d(np.asarray(self.log_d, dtype=float))
        if np.any(np.isnan(log_d)):
            raise ValueError("log_d must not contain NaN")
        object.__setattr__(self, "A", linear)
        object.__setattr__(self, "b", as_vector(self.b, name="b", dim=d))
        object.__setattr__(
            self, "log_d", as_vector(np.clip(log_d, LOG_VAR_MIN, LOG_VAR_MAX), name="log_d", dim=d)
        )

    @classmethod
    def identity(cls, dim: int, noise_var: float = 1e-12) -> "TransportParams":
        validate_count("dim", dim)
        return cls(np.eye(dim), np.zeros(dim), np.full(dim, math.log(noise_var)))

    @classmethod
    def from_vector(cls, vector: ArrayLike, dim: int) -> "TransportParams":
        vec = np.asarray(vector, dtype=float).ravel()
        if vec.shape[0] != parameter_count(dim):
            raise DimMismatch(f"parameter vector must have length {parameter_count(dim)}, got {vec.shape[0]}")
        k = dim * dim
        return cls(vec[:k].reshape(dim, dim), vec[k : k + dim], vec[k + dim :])

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> "TransportParams":
        try:
            dim = int(payload["dim"])
            linear = np.asarray(payload["A"], dtype=float).reshape(dim, dim)
            return cls(linear, payload["b"], payload["log_d"])
        except KeyError as exc:
            raise ValueError(f"transport parameters missing field {exc.args[0]!r}") from exc

    @classmethod
    def from_json(cls, text: str) -> "TransportParams":
        return cls.from_dict(json.loads(text))

    @property
    def dim(self) -> int:
        return int(self.b.shape[0])

    @property
    def noise_var(self) -> np.ndarray:
        return np.exp(self.log_d)

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.A.ravel(), self.b, self.log_d])

    def to_dict(self) -> dict[str, Any]:
        return {
            "A": [float(x) for x in self.A.ravel()],
            "b": [float(x) for x in self.b],
            "log_d": [float(x) for x in self.log_d],
            "dim": self.dim,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


__all__ = ["TransportParams", "parameter_count", "LOG_VAR_MIN", "LOG_VAR_MAX"]
