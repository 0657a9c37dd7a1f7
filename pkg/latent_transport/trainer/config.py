"""Training hyperparameters.

Defaults for lr, batch, alpha, beta, the Sinkhorn step count and epochs are the
reference training settings; the rest are engine defaults. ``lam`` = 500 keeps the
trained pushforward close to the target fit; ``prior_var`` = 0.04 holds the
noise variances near their starting value.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, fields
from typing import Any, Mapping

from latent_transport.common.errors import ConfigError

_ALIASES = {"lambda": "lam", "k": "sinkhorn_k"}
_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


@dataclass(frozen=True)
class TrainConfig:
    lr: float = 1e-3
    batch: int = 256
    alpha: float = 0.8
    beta: float = 0.2
    lam: float = 500.0
    epochs: int = 200
    seed: int = 0
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    sinkhorn_eps: float = 0.05
    sinkhorn_k: int = 20
    posterior_var: float = 1e-2
    prior_var: float = 0.04
    init_noise_var: float = 1e-2
    eval_size: int = 1000
    eval_every: int = 20
    eval_seed: int = 2024
    patience: int = 10
    plateau_tol: float = 1e-6
    train_noise: bool = True
    variational: bool = False
    refit_head: bool = True

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        for name in ("alpha", "beta", "lam", "plateau_tol"):
            if not getattr(self, name) >= 0.0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")
        for name in ("lr", "adam_eps", "sinkhorn_eps", "posterior_var", "prior_var", "init_noise_var"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")
        for name in ("adam_beta1", "adam_beta2"):
            if not 0.0 <= getattr(self, name) < 1.0:
                raise ValueError(f"{name} must lie in [0, 1), got {getattr(self, name)}")
        if self.batch < 2:
            raise ValueError(f"batch must be >= 2, got {self.batch}")
        if self.epochs < 0:
            raise ValueError(f"epochs must be >= 0, got {self.epochs}")
        for name in ("sinkhorn_k", "eval_size", "eval_every", "patience"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")

    @classmethod
    def field_names(cls) -> frozenset[str]:
        return frozenset(f.name for f in fields(cls))

    @classmethod
    def from_mapping(cls, values: Mapping[str, Any], *, base: "TrainConfig | None" = None) -> "TrainConfig":
        """Build from (possibly textual) values; unknown keys raise ConfigError."""
        base = base or cls()
        types = {f.name: f.type for f in fields(cls)}
        updates: dict[str, Any] = {}
        for raw_key, raw in values.items():
            key = _ALIASES.get(raw_key, raw_key)
            if key not in types:
                raise ConfigError(f"unknown training option {raw_key!r}")
            updates[key] = _coerce(key, types[key], raw)
        return dataclasses.replace(base, **updates)

    def with_override(self, **kwargs: Any) -> "TrainConfig":
        """Copy with the given non-None fields replaced."""
        return dataclasses.replace(self, **{k: v for k, v in kwargs.items() if v is not None})

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)


def _coerce(key: str, kind: Any, raw: Any) -> Any:
    kind = kind if isinstance(kind, str) else getattr(kind, "__name__", str(kind))
    if not isinstance(raw, str):
        return raw
    text = raw.strip()
    try:
        if kind == "bool":
            lowered = text.lower()
            if lowered in _TRUE:
                return True
            if lowered in _FALSE:
                return False
            raise ValueError(text)
        if kind == "int":
            return int(text)
        if kind == "float":
            return float(text)
    except ValueError as exc:
        raise ConfigError(f"option {key!r} expects {kind}, got {raw!r}") from exc
    return text


__all__ = ["TrainConfig"]
