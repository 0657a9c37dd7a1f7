"""Minibatch training of the transport operator with Adam."""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from latent_transport.common.errors import DimMismatch, Divergence
from latent_transport.evalx import geometry_discrepancy, variance_trace
from latent_transport.measures import GaussianMeasure, ParticleCloud, gaussian_fit, require_same_dim
from latent_transport.numkit import make_rng
from latent_transport.pacbayes import PosteriorSpec
from latent_transport.sinkhorn import sinkhorn_cost
from latent_transport.trainer.adam import AdamState, adam_step
from latent_transport.trainer.config import TrainConfig
from latent_transport.trainer.head import LinearHead
from latent_transport.trainer.objective import unified_loss_grad
from latent_transport.trainer.trace import EpochRecord, StepRecord, TraceLog, TraceSummary
from latent_transport.transport import (
    TransportParams,
    parameter_count,
    transport_loss,
    transport_mean,
)

logger = logging.getLogger(__name__)

STREAM_SHUFFLE = 1
STREAM_POSTERIOR = 2
STREAM_EVAL_INDEX = 3
STREAM_EVAL_NOISE = 4


@dataclass(frozen=True, eq=False)
class DomainPair:
    """Labelled source cloud and unlabelled target cloud."""

    source: ParticleCloud
    labels: np.ndarray
    target: ParticleCloud

    def __post_init__(self) -> None:
        require_same_dim(self.source, self.target)
        labels = np.asarray(self.labels, dtype=float)
        if labels.shape != (self.source.n,):
            raise DimMismatch(f"expected {self.source.n} source labels, got shape {labels.shape}")
        labels = labels.copy()
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return self.source.dim


@dataclass(frozen=True, eq=False)
class TrainedModel:
    params: TransportParams
    head: LinearHead
    config: TrainConfig
    summary: TraceSummary
    posterior: PosteriorSpec
    initial_params: TransportParams = field(repr=False)

    def to_dict(self) -> dict[str, Any]:
        return {
            "params": self.params.to_dict(),
            "head": self.head.to_dict(),
            "config": self.config.to_dict(),
            "summary": self.summary.to_dict(),
            "posterior_mean_var": float(np.mean(self.posterior.variance)),
        }


class EpochEvaluator:
    """Frozen evaluation subsets and noise draws, so epoch metrics see no training randomness."""

    def __init__(self, domains: DomainPair, g_t: GaussianMeasure, config: TrainConfig) -> None:
        index_rng = make_rng(config.eval_seed, STREAM_EVAL_INDEX)
        n_s = min(config.eval_size, domains.source.n)
        n_t = min(config.eval_size, domains.target.n)
        self.source = domains.source.points[np.sort(index_rng.child(0).permutation(domains.source.n)[:n_s])]
        self.target = domains.target.subset(np.sort(index_rng.child(1).permutation(domains.target.n)[:n_t]))
        self.noise = make_rng(config.eval_seed, STREAM_EVAL_NOISE).normal(self.source.shape)
        self.g_t = g_t
        self.config = config

    def __call__(self, epoch: int, params: TransportParams, transport: float, param_var: float) -> EpochRecord:
        moved = transport_mean(params, self.source) + np.exp(0.5 * params.log_d) * self.noise
        cloud = ParticleCloud(moved, "transported")
        energy, _ = sinkhorn_cost(cloud, self.target, self.config.sinkhorn_eps, self.config.sinkhorn_k)
        geometry = geometry_discrepancy(cloud, self.g_t, gaussian_fit(cloud))
        return EpochRecord(
            epoch=epoch,
            transport_loss=float(transport),
            w2_energy=float(energy),
            geometry=float(geometry),
            variance_trace=variance_trace(params),
            param_var=float(param_var),
        )


def _plateaued(losses: list[float], patience: int, tol: float) -> bool:
    if len(losses) <= patience:
        return False
    before, now = losses[-1 - patience], losses[-1]
    return (before - now) / max(abs(before), 1e-12) < tol


def train(domains: DomainPair, config: TrainConfig | None = None) -> tuple[TrainedModel, TraceLog]:
    """Fit transport parameters and the readout head by minibatch Adam on the unified objective.

    Initialization: identity map, noise ``init_noise_var``, prior centred there,
    head fitted by least squares on the source. Training stops after
    ``config.epochs`` or when the transport loss stops improving by the
    relative tolerance over ``config.patience`` epochs.
    """
    config = config or TrainConfig()
    d = domains.dim
    k = parameter_count(d)
    g_s = gaussian_fit(domains.source)
    g_t = gaussian_fit(domains.target)

    init = TransportParams.identity(d, config.init_noise_var)
    prior_mean = init.to_vector()
    head = LinearHead.fit(domains.source.points, domains.labels)
    log_var = np.full(k, math.log(config.posterior_var))
    x = np.concatenate([prior_mean, head.to_vector()] + ([log_var] if config.variational else []))
    mask = np.ones_like(x)
    if not config.train_noise:
        mask[d * d + d : k] = 0.0
    adam = AdamState.zeros(x.shape[0])

    evaluator = EpochEvaluator(domains, g_t, config)
    trace = TraceLog()
    losses = [transport_loss(init, g_s, g_t, config.lam).total]
    trace.add_epoch(evaluator(0, init, losses[0], config.posterior_var))

    shuffle_rng = make_rng(config.seed, STREAM_SHUFFLE)
    posterior_rng = make_rng(config.seed, STREAM_POSTERIOR)
    n = domains.source.n
    step = 0
    stopped_early = False
    smoothness = 0.0
    previous: tuple[np.ndarray, np.ndarray] | None = None

    for epoch in range(1, config.epochs + 1):
        order = shuffle_rng.permutation(n)
        for start in range(0, n, config.batch):
            idx = order[start : start + config.batch]
            if idx.shape[0] < 2:
                continue
            tic = time.perf_counter()
            mean_vec, head_vec = x[:k], x[k : k + d + 1]
            rho = PosteriorSpec(
                mean_vec, x[k + d + 1 :] if config.variational else log_var, prior_mean, config.prior_var
            )
            if config.variational:
                noise = posterior_rng.normal(k)
                phi_vec = mean_vec + np.exp(0.5 * rho.log_var) * noise
            else:
                phi_vec = mean_vec
            phi = TransportParams.from_vector(phi_vec, d)
            current_head = LinearHead.from_vector(head_vec)

            value, gradient = unified_loss_grad(
                phi, current_head, domains.source.points[idx], domains.labels[idx], g_s, g_t, config, rho
            )

            if previous is not None:
                moved = float(np.linalg.norm(phi_vec - previous[0]))
                if moved > 0.0:
                    smoothness = max(smoothness, float(np.linalg.norm(gradient.steering - previous[1])) / moved)
            previous = (phi_vec.copy(), gradient.steering)

            parts = [gradient.params, gradient.head]
            if config.variational:
                parts.append(gradient.sampled * noise * 0.5 * np.exp(0.5 * rho.log_var) + gradient.pac_log_var)
            grad = np.concatenate(parts) * mask
            grad_norm = float(np.linalg.norm(grad))
            if not (math.isfinite(value.total) and math.isfinite(grad_norm)):
                raise Divergence(f"non-finite objective at step {step + 1} (epoch {epoch})")

            adam, x = adam_step(adam, x, grad, config.lr, config.adam_beta1, config.adam_beta2, config.adam_eps)
            step += 1
            trace.add_step(
                StepRecord(
                    step=step,
                    total_loss=value.total,
                    task_loss=value.task,
                    transport_loss=value.transport,
                    pac_kl=value.pac,
                    grad_norm=grad_norm,
                    wall_ms=(time.perf_counter() - tic) * 1e3,
                )
            )

        params = TransportParams.from_vector(x[:k], d)
        losses.append(transport_loss(params, g_s, g_t, config.lam).total)
        if not math.isfinite(losses[-1]):
            raise Divergence(f"non-finite transport loss after epoch {epoch}")
        stopped_early = _plateaued(losses, config.patience, config.plateau_tol)
        if epoch % config.eval_every == 0 or epoch == config.epochs or stopped_early:
            param_var = float(np.mean(np.exp(x[k + d + 1 :]))) if config.variational else config.posterior_var
            record = evaluator(epoch, params, losses[-1], param_var)
            trace.add_epoch(record)
            logger.info(
                "epoch %d: transport=%.6g energy=%.6g geometry=%.6g variance=%.6g",
                epoch,
                record.transport_loss,
                record.w2_energy,
                record.geometry,
                record.variance_trace,
            )
        if stopped_early:
            logger.info("transport loss plateaued at epoch %d; stopping", epoch)
            break

    params = TransportParams.from_vector(x[:k], d)
    head = LinearHead.from_vector(x[k : k + d + 1])
    if step > 0 and config.refit_head:
        head = LinearHead.fit(transport_mean(params, domains.source.points), domains.labels)
    posterior = PosteriorSpec(
        x[:k], x[k + d + 1 :] if config.variational else log_var, prior_mean, config.prior_var
    )
    model = TrainedModel(
        params=params,
        head=head,
        config=config,
        summary=trace.summary(stopped_early=stopped_early, smoothness=smoothness),
        posterior=posterior,
        initial_params=init,
    )
    return model, trace


__all__ = ["DomainPair", "TrainedModel", "EpochEvaluator", "train", "STREAM_SHUFFLE", "STREAM_POSTERIOR"]
