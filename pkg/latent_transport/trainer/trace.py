"""Per-step and per-epoch training records."""

from __future__ import annotations

import math
from dataclasses import astuple, dataclass, field, fields
from typing import Any

from latent_transport.common.errors import EmptyTrace
from latent_transport.reporting.export import csv_text


@dataclass(frozen=True)
class StepRecord:
    step: int
    total_loss: float
    task_loss: float
    transport_loss: float
    pac_kl: float
    grad_norm: float
    wall_ms: float = 0.0


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    transport_loss: float
    w2_energy: float
    geometry: float
    variance_trace: float
    param_var: float


@dataclass(frozen=True)
class TraceSummary:
    steps_run: int
    epochs_run: int
    stopped_early: bool
    initial_energy: float
    final_energy: float
    initial_geometry: float
    final_geometry: float
    initial_variance: float
    final_variance: float
    variance_ratio_min: float
    variance_ratio_max: float
    final_transport_loss: float
    smoothness: float

    def to_dict(self) -> dict[str, Any]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _check_finite(record: Any) -> None:
    for f in fields(record):
        value = getattr(record, f.name)
        if isinstance(value, float) and not math.isfinite(value):
            raise ValueError(f"{type(record).__name__}.{f.name} is not finite")


@dataclass
class TraceLog:
    steps: list[StepRecord] = field(default_factory=list)
    epochs: list[EpochRecord] = field(default_factory=list)

    def add_step(self, record: StepRecord) -> None:
        if self.steps and record.step <= self.steps[-1].step:
            raise ValueError(f"step {record.step} does not follow step {self.steps[-1].step}")
        _check_finite(record)
        self.steps.append(record)

    def add_epoch(self, record: EpochRecord) -> None:
        if self.epochs and record.epoch <= self.epochs[-1].epoch:
            raise ValueError(f"epoch {record.epoch} does not follow epoch {self.epochs[-1].epoch}")
        _check_finite(record)
        self.epochs.append(record)

    def total_losses(self) -> list[float]:
        return [s.total_loss for s in self.steps]

    def steps_csv(self, *, include_timing: bool = False) -> str:
        """One row per step; wall time is left out by default so reruns compare byte-for-byte."""
        header = [f.name for f in fields(StepRecord)]
        rows = [list(astuple(s)) for s in self.steps]
        if not include_timing:
            header = header[:-1]
            rows = [row[:-1] for row in rows]
        return csv_text(header, rows)

    def epochs_csv(self) -> str:
        return csv_text([f.name for f in fields(EpochRecord)], [list(astuple(e)) for e in self.epochs])

    def summary(self, *, stopped_early: bool = False, smoothness: float = 0.0) -> TraceSummary:
        if not self.epochs:
            raise EmptyTrace("trace has no evaluated epochs")
        first, last = self.epochs[0], self.epochs[-1]
        base = first.variance_trace
        ratios = [e.variance_trace / base for e in self.epochs]
        return TraceSummary(
            steps_run=len(self.steps),
            epochs_run=last.epoch,
            stopped_early=stopped_early,
            initial_energy=first.w2_energy,
            final_energy=last.w2_energy,
            initial_geometry=first.geometry,
            final_geometry=last.geometry,
            initial_variance=base,
            final_variance=last.variance_trace,
            variance_ratio_min=min(ratios),
            variance_ratio_max=max(ratios),
            final_transport_loss=last.transport_loss,
            smoothness=float(smoothness),
        )


__all__ = ["StepRecord", "EpochRecord", "TraceSummary", "TraceLog"]
