"""Shared helper utilities used across the latent transport engine."""

from .numeric import (
    moving_average,
    norm_cdf,
    norm_sf,
    two_sided_p,
    validate_count,
    validate_nonnegative,
    validate_positive,
)

__all__ = [
    "norm_cdf",
    "norm_sf",
    "two_sided_p",
    "validate_positive",
    "validate_nonnegative",
    "validate_count",
    "moving_average",
]
