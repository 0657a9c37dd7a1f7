"""Experiment-level behaviour at reduced but representative scale."""

import time

import pytest

from latent_transport.benchsuite import (
    METHODS,
    SEVERITIES,
    SUITE_CONFIG,
    ablation_suite,
    draw_domains,
    generate_scenario,
    run_suite,
    sinkhorn_scaling,
)
from latent_transport.benchsuite.runner import VARIANCE_BAND, SuiteCell, run_cell
from latent_transport.cli import main
from latent_transport.trainer import DomainPair, TrainConfig, lyapunov_trace, train

pytestmark = pytest.mark.slow

SEEDS = (1, 2, 3, 4, 5)


def _train(severity, dim, n, seed, config):
    draw = draw_domains(generate_scenario(severity, dim, n, n, seed))
    return train(DomainPair(draw.source, draw.source_labels, draw.target), config)


@pytest.mark.parametrize("severity", ["moderate", "severe"])
def test_default_training_halves_energy(severity):
    passed = 0
    for seed in SEEDS:
        model, trace = _train(severity, 2, 2000, seed, TrainConfig())
        summary = model.summary
        halved = summary.final_energy <= 0.5 * summary.initial_energy
        passed += bool(halved and lyapunov_trace(trace, window=20).verdict)
    assert passed >= 4


@pytest.mark.parametrize("severity", sorted(SEVERITIES))
def test_default_training_keeps_variance_in_band(severity):
    lo, hi = VARIANCE_BAND
    config = TrainConfig(eval_size=300)
    for seed in SEEDS:
        model, _ = _train(severity, 4, 2000, seed, config)
        assert lo <= model.summary.variance_ratio_min, (severity, seed)
        assert model.summary.variance_ratio_max <= hi, (severity, seed)


@pytest.mark.parametrize("severity", ["moderate", "severe"])
def test_removing_transport_is_worse_for_every_seed(severity):
    config = SUITE_CONFIG.with_override(eval_size=300)
    report = ablation_suite(severity, config, (1, 2, 3), dim=4, n_s=1000, n_t=1000)
    assert report.checks[severity]["alpha_direction"]


def test_severe_suite_orders_methods():
    config = SUITE_CONFIG.with_override(eval_size=500)
    report = run_suite(("severe",), METHODS, SEEDS, config, dim=16, n_s=2000, n_t=2000)
    checks = report.checks["severe"]
    assert checks["ordering_risk"]
    assert checks["ordering_geometry"]
    assert checks["risk_significant_vs_finetune"]
    assert checks["energy_below_finetune"]


def test_default_cell_runs_within_a_minute():
    cell = SuiteCell("severe", "proposed", 1, 16, 2000, 2000, SUITE_CONFIG)
    tic = time.perf_counter()
    result = run_cell(cell)
    assert time.perf_counter() - tic < 60.0
    assert result.summary.steps_run > 0


def test_sinkhorn_time_grows_quadratically():
    report = sinkhorn_scaling(sizes=(500, 1000))
    (ratio,) = report.ratios
    assert 3.2 <= ratio <= 5.0


def test_bench_output_is_identical_across_worker_counts(capsys, tmp_path):
    argv = [
        "bench",
        "--seeds", "1,2",
        "--severities", "moderate",
        "--dim", "2",
        "--ns", "80",
        "--nt", "80",
        "--epochs", "3",
        "--batch", "40",
        "--eval-size", "60",
    ]
    runs = []
    for jobs in ("1", "2"):
        root = tmp_path / f"jobs{jobs}"
        assert main([*argv, "--jobs", jobs, "--output", str(root)]) == 0
        capsys.readouterr()
        (run_dir,) = root.iterdir()
        runs.append({p.relative_to(run_dir): p.read_bytes() for p in sorted(run_dir.rglob("*")) if p.is_file()})
    serial, parallel = runs
    assert len(serial) == 2 + 2 * len(METHODS) * 2
    assert serial.keys() == parallel.keys()
    for name in serial:
        assert serial[name] == parallel[name], name
