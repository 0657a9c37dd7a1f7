"""Adaptation methods compared by the suite and their held-out evaluation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from latent_transport.benchsuite.scenarios import Scenario, ScenarioDraw, draw_domains
from latent_transport.common.errors import UnknownMethod
from latent_transport.evalx import MetricRecord, geometry_discrepancy, target_risk, variance_trace
from latent_transport.measures import GaussianMeasure, ParticleCloud, bures_w2, gaussian_fit, monge_map
from latent_transport.numkit import make_rng, psd_inv_sqrt, psd_sqrt, symmetrize
from latent_transport.pacbayes import BoundReport, PosteriorSpec, posterior_kl, theorem3_bound, transfer_bound
from latent_transport.sinkhorn import sinkhorn_cost
from latent_transport.trainer import (
    DomainPair,
    EpochEvaluator,
    LinearHead,
    TraceLog,
    TraceSummary,
    TrainConfig,
    train,
)
from latent_transport.transport import TransportParams, transport_cloud, transport_loss, transport_mean

METHODS = ("finetune_det", "mmd_align", "det_ot", "proposed")
ZERO_NOISE_VAR = 1e-12
BOUND_DELTA = 0.05
STREAM_HELDOUT_NOISE = 21


@dataclass(frozen=True, eq=False)
class BaselineResult:
    record: MetricRecord
    trace: TraceLog
    params: TransportParams
    head: LinearHead
    summary: TraceSummary
    bounds: dict[str, BoundReport] = field(default_factory=dict)


def moment_matching_map(g_s: GaussianMeasure, g_t: GaussianMeasure) -> tuple[np.ndarray, np.ndarray]:
    """``A = S_t^1/2 (S_t^1/2 S_s S_t^1/2)^-1/2 S_t^1/2`` and ``b = mu_t - A mu_s``.

    ``A S_s A = S_t``, so the image of ``g_s`` has the first two moments of ``g_t``.
    """
    root_t = psd_sqrt(g_t.covariance)
    middle = psd_inv_sqrt(symmetrize(root_t @ g_s.covariance @ root_t))
    linear = symmetrize(root_t @ middle @ root_t)
    return linear, g_t.mean - linear @ g_s.mean


def _readout(params: TransportParams, draw: ScenarioDraw) -> LinearHead:
    return LinearHead.fit(transport_mean(params, draw.source.points), draw.source_labels)


def _closed_form_trace(params: TransportParams, draw: ScenarioDraw, config: TrainConfig) -> TraceLog:
    """Epoch records for a method fitted in one shot: the identity at epoch 0, the fitted map at the last epoch."""
    domains = DomainPair(draw.source, draw.source_labels, draw.target)
    g_s, g_t = gaussian_fit(draw.source), gaussian_fit(draw.target)
    evaluator = EpochEvaluator(domains, g_t, config)
    start = TransportParams.identity(params.dim, ZERO_NOISE_VAR)
    trace = TraceLog()
    trace.add_epoch(evaluator(0, start, transport_loss(start, g_s, g_t, config.lam).total, 0.0))
    if config.epochs > 0:
        trace.add_epoch(evaluator(config.epochs, params, transport_loss(params, g_s, g_t, config.lam).total, 0.0))
    return trace


def evaluate_method(
    method: str,
    scenario: Scenario,
    draw: ScenarioDraw,
    params: TransportParams,
    head: LinearHead,
    config: TrainConfig,
) -> MetricRecord:
    """Held-out metrics: geometry, target risk, noise variance and transport energy."""
    rng = make_rng(scenario.seed, STREAM_HELDOUT_NOISE)
    moved = transport_cloud(params, draw.heldout_source, rng)
    target = draw.heldout_target
    geometry = geometry_discrepancy(moved, gaussian_fit(target), gaussian_fit(moved))
    energy, _ = sinkhorn_cost(moved, target, config.sinkhorn_eps, config.sinkhorn_k)
    variance = variance_trace(params)
    return MetricRecord(
        scenario=scenario.name,
        method=method,
        seed=scenario.seed,
        geometry=geometry,
        risk=target_risk(head, target, draw.heldout_labels),
        variance=variance,
        energy=energy,
    )


def _bounds(
    params: TransportParams, head: LinearHead, posterior: PosteriorSpec, draw: ScenarioDraw
) -> dict[str, BoundReport]:
    """Both transfer bounds at the trained point: empirical source risk, Bures W2 of the fits, posterior KL."""
    g_s, g_t = gaussian_fit(draw.source), gaussian_fit(draw.target)
    moved = ParticleCloud(transport_mean(params, draw.source.points), "transported")
    source_risk = target_risk(head, moved, draw.source_labels)
    w2 = bures_w2(g_s, g_t)
    kl = posterior_kl(posterior)
    n_s = draw.source.n
    return {
        "transfer": transfer_bound(source_risk, w2, kl, n_s, BOUND_DELTA),
        "theorem3": theorem3_bound(source_risk, w2, kl, n_s, BOUND_DELTA),
    }


def run_baseline(
    method: str,
    scenario: Scenario,
    config: TrainConfig,
    *,
    draw: ScenarioDraw | None = None,
    label: str | None = None,
) -> BaselineResult:
    """Fit ``method`` on the scenario's training clouds and evaluate on held-out samples.

    ``label`` replaces the method name in the record (ablation variants all run
    the trained method).
    """
    if method not in METHODS:
        raise UnknownMethod(f"unknown method {method!r}; expected one of {list(METHODS)}")
    draw = draw or draw_domains(scenario, heldout=min(scenario.n_t, config.eval_size))
    d = scenario.dim
    bounds: dict[str, BoundReport] = {}
    if method == "proposed":
        model, trace = train(DomainPair(draw.source, draw.source_labels, draw.target), config)
        params, head = model.params, model.head
        bounds = _bounds(params, head, model.posterior, draw)
        summary = model.summary
    else:
        if method == "finetune_det":
            params = TransportParams.identity(d, ZERO_NOISE_VAR)
            head = LinearHead.fit(draw.source.points, draw.source_labels)
        else:
            fit = monge_map if method == "det_ot" else moment_matching_map
            A, b = fit(gaussian_fit(draw.source), gaussian_fit(draw.target))
            params = TransportParams(A, b, np.full(d, math.log(ZERO_NOISE_VAR)))
            head = _readout(params, draw)
        trace = _closed_form_trace(params, draw, config)
        summary = trace.summary()

    record = evaluate_method(label or method, scenario, draw, params, head, config)
    return BaselineResult(record=record, trace=trace, params=params, head=head, summary=summary, bounds=bounds)


def result_payload(result: BaselineResult) -> dict[str, Any]:
    return {
        "params": result.params.to_dict(),
        "head": result.head.to_dict(),
        "bounds": {name: report.to_dict() for name, report in sorted(result.bounds.items())},
    }


__all__ = [
    "METHODS",
    "BaselineResult",
    "moment_matching_map",
    "evaluate_method",
    "run_baseline",
    "result_payload",
]
