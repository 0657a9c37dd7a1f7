"""Lightweight numeric helpers shared across transport, evaluation and training."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

try:  # Prefer SciPy when available for speed/accuracy
    from scipy.stats import norm as _scipy_norm  # type: ignore

    _HAS_SCIPY = True
except Exception:  # pragma: no cover - SciPy is optional
    _scipy_norm = None
    _HAS_SCIPY = False


def norm_cdf(x: float) -> float:
    """Standard normal cumulative distribution function."""
    if _HAS_SCIPY:
        return float(_scipy_norm.cdf(x))  # type: ignore[union-attr]
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


def norm_sf(x: float) -> float:
    """Standard normal survival function, accurate in the upper tail."""
    if _HAS_SCIPY:
        return float(_scipy_norm.sf(x))  # type: ignore[union-attr]
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def two_sided_p(z: float) -> float:
    """Two-sided p-value of a standard normal statistic."""
    return min(1.0, 2.0 * norm_sf(abs(z)))


def validate_positive(name: str, value: float) -> None:
    """Raise ValueError if value is not strictly positive."""
    if not value > 0.0:
        raise ValueError(f"{name} must be > 0, got {value}")


def validate_nonnegative(name: str, value: float) -> None:
    """Raise ValueError if value is negative or NaN."""
    if not value >= 0.0:
        raise ValueError(f"{name} must be >= 0, got {value}")


def validate_count(name: str, value: int, minimum: int = 1) -> None:
    """Raise ValueError if an integer count is below ``minimum``."""
    if int(value) != value or value < minimum:
        raise ValueError(f"{name} must be an integer >= {minimum}, got {value}")


def moving_average(values: Sequence[float] | np.ndarray, window: int) -> np.ndarray:
    """Trailing moving average; the first ``window - 1`` entries average what is available."""
    validate_count("window", window)
    data = np.asarray(values, dtype=float)
    if data.size == 0:
        return data.copy()
    csum = np.cumsum(np.concatenate(([0.0], data)))
    idx = np.arange(1, data.size + 1)
    lo = np.maximum(idx - window, 0)
    return (csum[idx] - csum[lo]) / (idx - lo)


__all__ = [
    "norm_cdf",
    "norm_sf",
    "two_sided_p",
    "validate_positive",
    "validate_nonnegative",
    "validate_count",
    "moving_average",
]
