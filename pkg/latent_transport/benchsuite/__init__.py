"""Synthetic shift scenarios, baseline methods and the experiment runner."""

from .baselines import METHODS, BaselineResult, evaluate_method, moment_matching_map, run_baseline
from .runner import (
    ABLATIONS,
    MATCH_RTOL,
    SUITE_CONFIG,
    ExperimentReport,
    ablation_suite,
    content_hash,
    run_suite,
    write_report,
)
from .scaling import ScalingReport, sinkhorn_scaling
from .scenarios import (
    DEFAULT_SEVERITIES,
    SEVERITIES,
    Scenario,
    ScenarioDraw,
    draw_domains,
    generate_scenario,
    random_rotation,
)

SUITES = ("default", "ablation", "scaling")

__all__ = [
    "SUITES",
    "METHODS",
    "ABLATIONS",
    "MATCH_RTOL",
    "SUITE_CONFIG",
    "SEVERITIES",
    "DEFAULT_SEVERITIES",
    "Scenario",
    "ScenarioDraw",
    "generate_scenario",
    "draw_domains",
    "random_rotation",
    "BaselineResult",
    "moment_matching_map",
    "evaluate_method",
    "run_baseline",
    "ExperimentReport",
    "run_suite",
    "ablation_suite",
    "content_hash",
    "write_report",
    "ScalingReport",
    "sinkhorn_scaling",
]
