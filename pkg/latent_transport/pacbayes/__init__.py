"""PAC-Bayesian posterior, transfer bounds and sample complexity."""

from .bounds import BoundReport, sample_complexity, theorem3_bound, transfer_bound
from .posterior import PosteriorSpec, posterior_kl, posterior_kl_grad

__all__ = [
    "PosteriorSpec",
    "posterior_kl",
    "posterior_kl_grad",
    "BoundReport",
    "transfer_bound",
    "theorem3_bound",
    "sample_complexity",
]
