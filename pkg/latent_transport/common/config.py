"""Configuration store and the flat ``key = value`` file format."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from latent_transport.common.errors import ConfigError


@dataclass(frozen=True)
class ConfigStore:
    """Immutable mapping of configuration values with override helpers."""

    defaults: Mapping[str, Any] = field(default_factory=dict)

    def get(self, key: str, default: Any = None) -> Any:
        return self.defaults.get(key, default)

    def with_override(self, **kwargs: Any) -> "ConfigStore":
        merged = dict(self.defaults)
        merged.update({key: value for key, value in kwargs.items() if value is not None})
        return ConfigStore(defaults=merged)

    def restricted(self, keys: set[str] | frozenset[str]) -> dict[str, Any]:
        """Return only the entries whose key is in ``keys``."""
        return {key: value for key, value in self.defaults.items() if key in keys}


def parse_config_text(text: str, *, source: str = "<string>") -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}", path=source)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"{source}:{lineno}: empty key", path=source)
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}", path=source)
        values[key] = value
    return values


def load_config_file(path: str | Path) -> ConfigStore:
    """Read a flat config file into a ConfigStore of raw string values."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}", path=str(path))
    return ConfigStore(defaults=parse_config_text(path.read_text(encoding="utf-8"), source=str(path)))


__all__ = ["ConfigStore", "parse_config_text", "load_config_file"]
