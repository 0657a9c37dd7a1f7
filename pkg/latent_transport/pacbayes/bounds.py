"""PAC-Bayesian transfer bounds and the sample-complexity calculator."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from latent_transport.common.errors import BadDelta, BadEpsilon
from latent_transport.utils import validate_count, validate_nonnegative


@dataclass(frozen=True)
class BoundReport:
    source_risk: float
    w2_term: float
    kl_term: float
    confidence_term: float
    bound: float
    n_s: int
    delta: float

    def to_dict(self) -> dict[str, float | int]:
        return asdict(self)


def _check_inputs(w2: float, kl: float, n_s: int, delta: float, *, allow_unit_delta: bool = False) -> None:
    upper_ok = delta <= 1.0 if allow_unit_delta else delta < 1.0
    if not (delta > 0.0 and upper_ok):
        interval = "(0, 1]" if allow_unit_delta else "(0, 1)"
        raise BadDelta(f"delta must lie in {interval}, got {delta}")
    validate_count("n_s", n_s)
    validate_nonnegative("w2", w2)
    validate_nonnegative("kl", kl)


def _report(source_risk: float, w2: float, kl: float, n_s: int, delta: float, log_term: float) -> BoundReport:
    confidence = math.sqrt((kl + log_term) / (2.0 * n_s))
    return BoundReport(
        source_risk=float(source_risk),
        w2_term=float(w2),
        kl_term=float(kl),
        confidence_term=confidence,
        bound=float(source_risk) + float(w2) + confidence,
        n_s=int(n_s),
        delta=float(delta),
    )


def transfer_bound(source_risk: float, w2: float, kl: float, n_s: int, delta: float) -> BoundReport:
    """Source risk plus W2 plus ``sqrt((KL + ln(2 sqrt(n_s) / delta)) / (2 n_s))``."""
    _check_inputs(w2, kl, n_s, delta)
    return _report(source_risk, w2, kl, n_s, delta, math.log(2.0 * math.sqrt(n_s) / delta))


def theorem3_bound(source_risk: float, w2: float, kl: float, n_s: int, delta: float) -> BoundReport:
    """Variant with confidence term ``sqrt((KL + ln(1 / delta)) / (2 n_s))``; ``delta = 1`` is allowed."""
    _check_inputs(w2, kl, n_s, delta, allow_unit_delta=True)
    return _report(source_risk, w2, kl, n_s, delta, -math.log(delta))


def sample_complexity(d: int, epsilon: float, kl: float) -> int:
    """``ceil((d ln(1/eps) + KL) / eps^2)`` with unit constants, at least 1 (illustrative units)."""
    if not 0.0 < epsilon < 1.0:
        raise BadEpsilon(f"epsilon must lie in (0, 1), got {epsilon}")
    validate_count("d", d)
    validate_nonnegative("kl", kl)
    return max(1, math.ceil((d * math.log(1.0 / epsilon) + kl) / (epsilon * epsilon)))


__all__ = ["BoundReport", "transfer_bound", "theorem3_bound", "sample_complexity"]
