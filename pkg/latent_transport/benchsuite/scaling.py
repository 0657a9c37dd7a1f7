"""Wall-time scaling of the Sinkhorn solver with the number of particles."""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass
from typing import Sequence

from latent_transport.measures import GaussianMeasure, sample
from latent_transport.numkit import make_rng
from latent_transport.sinkhorn import cost_matrix, sinkhorn_plan
from latent_transport.utils import validate_count

STREAM_SCALING = 31


@dataclass(frozen=True)
class ScalingReport:
    sizes: tuple[int, ...]
    median_seconds: tuple[float, ...]
    trials: int
    eps: float
    iterations: int

    @property
    def ratios(self) -> tuple[float, ...]:
        """Time ratio of each size to the previous one."""
        t = self.median_seconds
        return tuple(t[i] / t[i - 1] for i in range(1, len(t)))

    def to_dict(self) -> dict[str, object]:
        return {
            "sizes": list(self.sizes),
            "median_seconds": list(self.median_seconds),
            "ratios": list(self.ratios),
            "trials": self.trials,
            "eps": self.eps,
            "iterations": self.iterations,
        }


def sinkhorn_scaling(
    sizes: Sequence[int] = (500, 1000),
    trials: int = 5,
    eps: float = 0.05,
    iterations: int = 20,
    seed: int = 0,
) -> ScalingReport:
    """Median solve time per cloud size; the cost-matrix build is excluded from the timing."""
    validate_count("trials", trials)
    medians = []
    for m in sizes:
        validate_count("size", m)
        rng = make_rng(seed, STREAM_SCALING).child(m)
        x = sample(GaussianMeasure.isotropic(2), m, rng.child(0))
        y = sample(GaussianMeasure.isotropic(2, mean=[2.0, 0.0]), m, rng.child(1), domain_tag="target")
        cost = cost_matrix(x, y)
        timings = []
        for _ in range(trials):
            tic = time.perf_counter()
            sinkhorn_plan(cost, eps, iterations)
            timings.append(time.perf_counter() - tic)
        medians.append(statistics.median(timings))
    return ScalingReport(tuple(int(s) for s in sizes), tuple(medians), int(trials), float(eps), int(iterations))


__all__ = ["ScalingReport", "sinkhorn_scaling"]
