"""Shared common utilities for the latent transport engine."""

from .config import ConfigStore, load_config_file, parse_config_text
from .errors import (
    Asymmetric,
    BadDelta,
    BadEpsilon,
    CloudFormatError,
    ConfigError,
    DimMismatch,
    Divergence,
    EmptyTrace,
    LatentTransportError,
    NonpositiveTheta,
    NotPSD,
    NumericalError,
    NumericOverflow,
    UnknownMethod,
    UnknownSuite,
    UnstableStep,
    ZeroVariance,
)
from .types import DOMAIN_TAGS, DomainTag, Matrix, Vector

__all__ = [
    "ConfigStore",
    "load_config_file",
    "parse_config_text",
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
    "Matrix",
    "Vector",
    "DomainTag",
    "DOMAIN_TAGS",
]
