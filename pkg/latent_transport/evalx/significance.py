"""One-sample Z statistic over per-seed improvements."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from latent_transport.common.errors import ZeroVariance
from latent_transport.evalx.metrics import MetricRecord
from latent_transport.utils import two_sided_p


@dataclass(frozen=True)
class ZTestResult:
    scenario: str
    metric: str
    baseline: str
    candidate: str
    z: float
    p_value: float
    mean_delta: float
    n: int

    def to_dict(self) -> dict[str, float | int | str]:
        return {
            "scenario": self.scenario,
            "metric": self.metric,
            "baseline": self.baseline,
            "candidate": self.candidate,
            "z": self.z,
            "p_value": self.p_value,
            "mean_delta": self.mean_delta,
            "n": self.n,
        }


def z_statistic(deltas: Sequence[float] | np.ndarray) -> tuple[float, float]:
    """``Z = mean / (s / sqrt(n))`` with the unbiased sample deviation; two-sided normal p-value."""
    values = np.asarray(deltas, dtype=float)
    if values.ndim != 1 or values.shape[0] < 2:
        raise ValueError("z_statistic needs at least 2 values")
    spread = float(np.std(values, ddof=1))
    if spread == 0.0:
        raise ZeroVariance("improvements have zero sample variance; the Z statistic is undefined")
    z = float(np.mean(values)) / (spread / math.sqrt(values.shape[0]))
    return z, two_sided_p(z)


def compare_methods(
    records: Iterable[MetricRecord],
    *,
    scenario: str,
    metric: str,
    baseline: str,
    candidate: str,
) -> ZTestResult:
    """Paired test on seeds present for both methods; delta = baseline - candidate (positive favours the candidate)."""
    by_key: dict[tuple[str, int], float] = {}
    for rec in records:
        if rec.scenario == scenario and rec.method in (baseline, candidate):
            by_key[(rec.method, rec.seed)] = float(getattr(rec, metric))
    seeds = sorted({seed for method, seed in by_key if method == baseline} & {seed for method, seed in by_key if method == candidate})
    deltas = [by_key[(baseline, s)] - by_key[(candidate, s)] for s in seeds]
    z, p = z_statistic(deltas)
    return ZTestResult(
        scenario=scenario,
        metric=metric,
        baseline=baseline,
        candidate=candidate,
        z=z,
        p_value=p,
        mean_delta=float(np.mean(deltas)),
        n=len(deltas),
    )


__all__ = ["ZTestResult", "z_statistic", "compare_methods"]
