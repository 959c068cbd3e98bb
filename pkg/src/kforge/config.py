"""Run configuration: bounds, caps, output format, and the suite seed.

Values come from defaults, then an optional config file (the KFORGE_CONFIG
environment variable or --config points at it), then per-flag overrides.
The file uses flat TOML-style `key = value` lines; ints, booleans, and
quoted strings are understood.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional

from .errors import ParseError

CONFIG_ENV_VAR = "KFORGE_CONFIG"


@dataclass
class Config:
    brute_force_point_bound: int = 5
    partition_oracle_bound: int = 6
    stage_point_cap: int = 10_000
    subframe_enum_bound: int = 20
    output_format: str = "json"
    seed: int = 2357
    threads: int = 1

    def __post_init__(self):
        for name in ("brute_force_point_bound", "partition_oracle_bound",
                     "stage_point_cap", "subframe_enum_bound", "threads"):
            if getattr(self, name) <= 0:
                raise ParseError(f"config: {name} must be positive")
        if self.output_format not in ("json", "dot"):
            raise ParseError("config: output_format must be json or dot")


def _parse_value(raw: str):
    raw = raw.strip()
    if raw.startswith('"') and raw.endswith('"') and len(raw) >= 2:
        return raw[1:-1]
    if raw in ("true", "false"):
        return raw == "true"
    try:
        return int(raw)
    except ValueError:
        raise ParseError(f"config: cannot parse value {raw!r}")


def parse_config_text(text: str) -> dict:
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ParseError(f"config line {lineno}: expected key = value")
        key, raw = stripped.split("=", 1)
        out[key.strip()] = _parse_value(raw)
    return out


def load_config(path: Optional[str] = None, **overrides) -> Config:
    """Defaults, then the config file if any, then keyword overrides."""
    values = {}
    chosen = path or os.environ.get(CONFIG_ENV_VAR)
    if chosen:
        file_path = Path(chosen)
        if not file_path.exists():
            raise ParseError(f"config file not found: {file_path}")
        parsed = parse_config_text(file_path.read_text())
        known = {f.name for f in fields(Config)}
        for key, value in parsed.items():
            if key not in known:
                raise ParseError(f"config: unknown key {key!r}")
            values[key] = value
    for key, value in overrides.items():
        if value is not None:
            values[key] = value
    return Config(**values)
