"""Lyapunov-energy monitoring of a loss trace."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from latent_transport.common.errors import EmptyTrace
from latent_transport.trainer.trace import TraceLog
from latent_transport.utils import moving_average, validate_count

# allowed rise of V per step, relative to the largest smoothed loss
LYAPUNOV_RTOL = 1e-3


@dataclass(frozen=True, eq=False)
class LyapunovResult:
    series: np.ndarray
    verdict: bool
    window: int
    worst_increase: float
    tolerance: float


def lyapunov_trace(
    trace: TraceLog | Sequence[float] | np.ndarray, window: int = 20, rtol: float = LYAPUNOV_RTOL
) -> LyapunovResult:
    """Smoothed excess loss ``V(t) = MA(t) - min_{s<=t} MA(s)``.

    The verdict holds when no increment of ``V`` after the first full window
    exceeds ``rtol`` times the largest absolute smoothed loss, so the check
    reads the same whatever the loss scale.
    """
    validate_count("window", window)
    if not rtol >= 0.0:
        raise ValueError(f"rtol must be >= 0, got {rtol}")
    losses = trace.total_losses() if isinstance(trace, TraceLog) else list(np.asarray(trace, dtype=float))
    if len(losses) == 0:
        raise EmptyTrace("cannot build a Lyapunov series from an empty trace")
    smooth = moving_average(losses, window)
    series = smooth - np.minimum.accumulate(smooth)
    tail = series[window - 1 :]
    increments = np.diff(tail)
    worst = float(increments.max()) if increments.size else 0.0
    tolerance = rtol * float(np.max(np.abs(smooth)))
    series.setflags(write=False)
    return LyapunovResult(
        series=series,
        verdict=worst <= tolerance,
        window=int(window),
        worst_increase=worst,
        tolerance=tolerance,
    )


__all__ = ["LyapunovResult", "lyapunov_trace", "LYAPUNOV_RTOL"]
