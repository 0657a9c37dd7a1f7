"""Domain-specific exceptions."""

from __future__ import annotations


class LatentTransportError(Exception):
    """Base error for latent transport failures."""


class DimMismatch(LatentTransportError, ValueError):
    """Operands disagree on latent dimension or shape."""


class Asymmetric(LatentTransportError, ValueError):
    """Matrix expected symmetric is not, within tolerance."""


class NotPSD(LatentTransportError, ValueError):
    """Matrix expected positive semidefinite has a negative pivot or eigenvalue."""


class BadDelta(LatentTransportError, ValueError):
    """Confidence parameter outside (0, 1)."""


class BadEpsilon(LatentTransportError, ValueError):
    """Accuracy parameter outside (0, 1)."""


class NonpositiveTheta(LatentTransportError, ValueError):
    """Mean-reversion rate must be strictly positive."""


class EmptyTrace(LatentTransportError, ValueError):
    """Trace has no records to analyse."""


class ZeroVariance(LatentTransportError, ValueError):
    """Sample standard deviation is zero; the statistic is undefined."""


class UnknownMethod(LatentTransportError, ValueError):
    """Adaptation method name not recognised."""


class UnknownSuite(LatentTransportError, ValueError):
    """Benchmark suite name not recognised."""


class CloudFormatError(LatentTransportError, ValueError):
    """Malformed particle-cloud file."""

    def __init__(self, message: str, *, line: int | None = None) -> None:
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class ConfigError(LatentTransportError, ValueError):
    """Invalid or unreadable configuration."""

    def __init__(self, message: str, *, path: str | None = None) -> None:
        self.path = path
        super().__init__(message)


class NumericalError(LatentTransportError, ArithmeticError):
    """Numerical failure during a computation."""


class NumericOverflow(NumericalError):
    """Overflow or non-finite value inside an iterative solver."""


class Divergence(NumericalError):
    """Simulation or optimisation left the finite range."""


class UnstableStep(NumericalError):
    """Explicit scheme step violates its stability bound."""


__all__ = [
    "LatentTransportError",
    "DimMismatch",
    "Asymmetric",
    "NotPSD",
    "BadDelta",
    "BadEpsilon",
    "NonpositiveTheta",
    "EmptyTrace",
    "ZeroVariance",
    "UnknownMethod",
    "UnknownSuite",
    "CloudFormatError",
    "ConfigError",
    "NumericalError",
    "NumericOverflow",
    "Divergence",
    "UnstableStep",
]
