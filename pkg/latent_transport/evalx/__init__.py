"""Evaluation metrics and significance testing."""

from .metrics import (
    MetricRecord,
    Predictor,
    covariance_calibration,
    covariance_mismatch,
    geometry_discrepancy,
    target_risk,
    transport_energy,
    variance_trace,
)
from .significance import ZTestResult, compare_methods, z_statistic

__all__ = [
    "MetricRecord",
    "Predictor",
    "geometry_discrepancy",
    "covariance_mismatch",
    "covariance_calibration",
    "transport_energy",
    "variance_trace",
    "target_risk",
    "ZTestResult",
    "z_statistic",
    "compare_methods",
]
