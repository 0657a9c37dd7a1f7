"""Matplotlib helpers for training curves, Lyapunov series and variance traces."""

from __future__ import annotations

from pathlib import Path
from typing import Any, Sequence

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["plot_training_curves", "plot_epoch_metrics", "plot_lyapunov", "save_figure"]


def plot_training_curves(trace: Any, *, ax=None):
    """Total loss and its components per step (any object with a ``steps`` list)."""
    if ax is None:
        _, ax = plt.subplots(figsize=(7, 4))
    steps = [s.step for s in trace.steps]
    ax.plot(steps, [s.total_loss for s in trace.steps], label="total")
    ax.plot(steps, [s.task_loss for s in trace.steps], label="task")
    ax.plot(steps, [s.transport_loss for s in trace.steps], label="transport")
    ax.set_xlabel("Step")
    ax.set_ylabel("Loss")
    ax.set_yscale("symlog")
    ax.legend()
    ax.set_title("Training objective")
    return ax


def plot_epoch_metrics(trace: Any, *, ax=None):
    if ax is None:
        _, ax = plt.subplots(figsize=(7, 4))
    epochs = [e.epoch for e in trace.epochs]
    ax.plot(epochs, [e.w2_energy for e in trace.epochs], marker="o", label="transport energy")
    ax.plot(epochs, [e.geometry for e in trace.epochs], marker="s", label="geometry")
    ax.set_xlabel("Epoch")
    ax.legend()
    twin = ax.twinx()
    twin.plot(epochs, [e.variance_trace for e in trace.epochs], color="gray", linestyle="--", label="variance")
    twin.set_ylabel("Noise variance")
    ax.set_title("Evaluation metrics")
    return ax


def plot_lyapunov(series: Sequence[float] | np.ndarray, *, window: int | None = None, ax=None):
    if ax is None:
        _, ax = plt.subplots(figsize=(6, 3))
    values = np.asarray(series, dtype=float)
    ax.plot(np.arange(values.shape[0]), values, label="V(t)")
    if window is not None:
        ax.axvline(window - 1, color="gray", linestyle=":", label=f"window={window}")
    ax.set_xlabel("Step")
    ax.set_ylabel("Smoothed excess loss")
    ax.legend()
    return ax


def save_figure(ax_or_fig, path: str | Path) -> Path:
    fig = ax_or_fig.figure if hasattr(ax_or_fig, "figure") and not hasattr(ax_or_fig, "savefig") else ax_or_fig
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=100)
    plt.close(fig)
    return path
