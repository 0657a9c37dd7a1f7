"""Uncertainty propagation: SDE simulation and the 1-D Fokker-Planck oracle."""

from .fokker_planck import DensityGrid, fokker_planck_1d, histogram_tv_distance
from .sde import (
    SdeSpec,
    Trajectory,
    euler_maruyama,
    ou_stationary_variance,
    simulate,
    variance_trace_series,
    write_trajectory,
)

__all__ = [
    "SdeSpec",
    "Trajectory",
    "simulate",
    "euler_maruyama",
    "ou_stationary_variance",
    "variance_trace_series",
    "write_trajectory",
    "DensityGrid",
    "fokker_planck_1d",
    "histogram_tv_distance",
]
