"""Diagonal Gaussian posterior over transport parameters and its KL to an isotropic prior."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from latent_transport.common.errors import DimMismatch
from latent_transport.numkit import as_vector
from latent_transport.transport import TransportParams
from latent_transport.utils import validate_positive


@dataclass(frozen=True, eq=False)
class PosteriorSpec:
    """``rho = N(mean, diag(exp(log_var)))`` against the prior ``pi = N(prior_mean, prior_var I)``."""

    mean: np.ndarray
    log_var: np.ndarray
    prior_mean: np.ndarray
    prior_var: float

    def __post_init__(self) -> None:
        mean = as_vector(self.mean, name="mean")
        k = mean.shape[0]
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "log_var", as_vector(self.log_var, name="log_var", dim=k))
        object.__setattr__(self, "prior_mean", as_vector(self.prior_mean, name="prior_mean", dim=k))
        validate_positive("prior_var", self.prior_var)
        object.__setattr__(self, "prior_var", float(self.prior_var))

    @classmethod
    def around(
        cls,
        params: TransportParams,
        *,
        posterior_var: float,
        prior_var: float,
        prior_mean: ArrayLike | None = None,
    ) -> "PosteriorSpec":
        """Posterior centred at ``params`` with a common variance; the prior defaults to the same centre."""
        validate_positive("posterior_var", posterior_var)
        mean = params.to_vector()
        centre = mean if prior_mean is None else np.asarray(prior_mean, dtype=float)
        if centre.shape != mean.shape:
            raise DimMismatch(f"prior mean has shape {centre.shape}, parameters have {mean.shape}")
        return cls(mean, np.full(mean.shape, math.log(posterior_var)), centre, prior_var)

    @property
    def size(self) -> int:
        return int(self.mean.shape[0])

    @property
    def variance(self) -> np.ndarray:
        return np.exp(self.log_var)


def posterior_kl(rho: PosteriorSpec) -> float:
    """``0.5 sum(v/v0 - 1 - ln(v/v0)) + 0.5 sum((mu - mu0)^2) / v0``."""
    ratio = rho.variance / rho.prior_var
    log_ratio = rho.log_var - math.log(rho.prior_var)
    gap = rho.mean - rho.prior_mean
    value = 0.5 * float(np.sum(ratio - 1.0 - log_ratio)) + 0.5 * float(gap @ gap) / rho.prior_var
    return max(value, 0.0)


def posterior_kl_grad(rho: PosteriorSpec) -> tuple[np.ndarray, np.ndarray]:
    """Gradients of ``posterior_kl`` with respect to ``mean`` and ``log_var``."""
    grad_mean = (rho.mean - rho.prior_mean) / rho.prior_var
    grad_log_var = 0.5 * (rho.variance / rho.prior_var - 1.0)
    return grad_mean, grad_log_var


__all__ = ["PosteriorSpec", "posterior_kl", "posterior_kl_grad"]
