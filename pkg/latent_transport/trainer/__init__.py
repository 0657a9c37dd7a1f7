"""Training loop, objective, optimizer and convergence monitoring."""

from .adam import AdamState, adam_step
from .config import TrainConfig
from .head import LinearHead
from .loop import DomainPair, EpochEvaluator, TrainedModel, train
from .lyapunov import LYAPUNOV_RTOL, LyapunovResult, lyapunov_trace
from .objective import (
    ObjectiveGradient,
    ObjectiveValue,
    task_loss_grad,
    unified_loss_grad,
)
from .trace import EpochRecord, StepRecord, TraceLog, TraceSummary

__all__ = [
    "TrainConfig",
    "LinearHead",
    "AdamState",
    "adam_step",
    "ObjectiveValue",
    "ObjectiveGradient",
    "task_loss_grad",
    "unified_loss_grad",
    "StepRecord",
    "EpochRecord",
    "TraceSummary",
    "TraceLog",
    "DomainPair",
    "TrainedModel",
    "EpochEvaluator",
    "train",
    "LyapunovResult",
    "lyapunov_trace",
    "LYAPUNOV_RTOL",
]
