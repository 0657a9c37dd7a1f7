"""The Bayesian latent transport operator: parameters, pushforwards and loss."""

from .loss import TransportLossValue, expected_cost, transport_loss, transport_loss_grad
from .montecarlo import MonteCarloLoss, transport_loss_mc
from .operator import (
    pushforward_gaussian,
    pushforward_mixture,
    transport_cloud,
    transport_mean,
    transport_sample,
)
from .params import LOG_VAR_MAX, LOG_VAR_MIN, TransportParams, parameter_count

__all__ = [
    "TransportParams",
    "parameter_count",
    "LOG_VAR_MIN",
    "LOG_VAR_MAX",
    "transport_mean",
    "transport_sample",
    "transport_cloud",
    "pushforward_gaussian",
    "pushforward_mixture",
    "TransportLossValue",
    "expected_cost",
    "transport_loss",
    "transport_loss_grad",
    "MonteCarloLoss",
    "transport_loss_mc",
]
