"""Entropic optimal transport between particle clouds."""

from .cost import cost_matrix
from .plan import TransportPlan, sinkhorn_cost, sinkhorn_plan, transport_cost

__all__ = ["cost_matrix", "TransportPlan", "sinkhorn_plan", "transport_cost", "sinkhorn_cost"]
