"""Build parameters and the flat ``key=value`` config file format."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, fields
from pathlib import Path

from .errors import ConfigError
from .storage.streams import DEFAULT_SEGMENT_CAP

KEY_CODECS = ("huffman", "varint")


@dataclass(frozen=True)
class IngestConfig:
    min_length: int = 2
    max_length: int = 5
    max_distance_frequent: int = 5
    max_distance_ordinary: int = 7
    processing_distance_top: int = 7
    processing_distance_rest: int = 5
    top_tier_fraction: float = 1 / 3
    ordinary_distance: int = 5
    rare_doc_threshold: int = 16
    cartesian_cap: int = 64
    key_codec: str = "huffman"
    build_baseline: bool = True
    segment_cap: int = DEFAULT_SEGMENT_CAP
    stop_size: int = 700
    frequent_size: int = 2100

    def __post_init__(self):
        if not 2 <= self.min_length <= self.max_length <= 255:
            raise ConfigError(f"need 2 <= min_length <= max_length <= 255, got {self.min_length}, {self.max_length}")
        for name in ("max_distance_frequent", "max_distance_ordinary", "processing_distance_top",
                     "processing_distance_rest", "ordinary_distance"):
            if not 2 <= getattr(self, name) <= 255:
                raise ConfigError(f"{name} must lie in 2..255")
        if not 0.0 <= self.top_tier_fraction <= 1.0:
            raise ConfigError("top_tier_fraction must lie in [0, 1]")
        if self.key_codec not in KEY_CODECS:
            raise ConfigError(f"key_codec must be one of {KEY_CODECS}")
        if self.cartesian_cap < 1 or self.rare_doc_threshold < 0 or self.segment_cap < 1:
            raise ConfigError("cartesian_cap, rare_doc_threshold and segment_cap must be positive")
        if self.stop_size < 0 or self.frequent_size < 0:
            raise ConfigError("list sizes must be non-negative")

    def replace(self, **changes) -> "IngestConfig":
        return dataclasses.replace(self, **changes)

    def to_text(self) -> str:
        return "".join(f"{f.name}={_format(getattr(self, f.name))}\n" for f in fields(self))

    @classmethod
    def from_mapping(cls, values: dict) -> "IngestConfig":
        known = {f.name: f for f in fields(cls)}
        kwargs = {}
        for key, raw in values.items():
            if key not in known:
                raise ConfigError(f"unknown config key {key!r}")
            kwargs[key] = _coerce(known[key].type, raw, key)
        return cls(**kwargs)

    @classmethod
    def from_text(cls, text: str) -> "IngestConfig":
        values = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ConfigError(f"line {lineno}: expected key=value")
            values[key.strip()] = value.strip()
        return cls.from_mapping(values)

    @classmethod
    def from_file(cls, path) -> "IngestConfig":
        return cls.from_text(Path(path).read_text(encoding="utf-8"))


def _format(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    return repr(value) if isinstance(value, float) else str(value)


def _coerce(type_name, raw, key):
    if not isinstance(raw, str):
        return raw
    try:
        if type_name in ("int", int):
            return int(raw, 0)
        if type_name in ("float", float):
            return float(raw)
        if type_name in ("bool", bool):
            low = raw.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {raw!r}") from None
    return raw
