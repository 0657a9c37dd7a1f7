"""Shared type aliases and small value types."""

from __future__ import annotations

from typing import Literal, TypeAlias

import numpy as np
from numpy.typing import NDArray

Matrix: TypeAlias = NDArray[np.float64]
Vector: TypeAlias = NDArray[np.float64]

DomainTag = Literal["source", "target", "transported"]
DOMAIN_TAGS: tuple[str, ...] = ("source", "target", "transported")

__all__ = ["Matrix", "Vector", "DomainTag", "DOMAIN_TAGS"]
