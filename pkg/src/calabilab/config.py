"""Flat dotted-key run configuration: parse, validate, canonical render.

Format: one "key=value" per line; '#' starts a comment; unknown keys are
rejected.  Command-line flags override file values.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

from .errors import ConfigError
from .serialize import fmt

_KEYS = {
    "geometry": str,
    "profile": str,
    "f": str,
    "h": str,
    "normalization.target": float,
    "grid.nodes": int,
    "seed": int,
    "tol": float,
    "amplitude": float,
    "samples": int,
    "iterate.max_steps": int,
    "out": str,
}

_FIELD_BY_KEY = {
    "geometry": "geometry",
    "profile": "profile",
    "f": "f_expr",
    "h": "h_expr",
    "normalization.target": "target",
    "grid.nodes": "nodes",
    "seed": "seed",
    "tol": "tol",
    "amplitude": "amplitude",
    "samples": "samples",
    "iterate.max_steps": "max_steps",
    "out": "out",
}
_KEY_BY_FIELD = {v: k for k, v in _FIELD_BY_KEY.items()}


@dataclass
class RunConfig:
    geometry: str = "cp1"
    profile: str = "round"
    f_expr: str = "id"
    h_expr: str = "const:1"
    target: float | None = None
    nodes: int = 129
    seed: int = 0
    tol: float = 1e-8
    amplitude: float = 0.3
    samples: int = 50
    max_steps: int = 8
    out: str = "."

    def render(self) -> str:
        lines = []
        for key in sorted(_KEYS):
            value = getattr(self, _FIELD_BY_KEY[key])
            if value is None:
                continue
            if isinstance(value, float):
                value = fmt(value)
            lines.append(f"{key}={value}")
        return "\n".join(lines) + "\n"

    def override(self, **kwargs) -> "RunConfig":
        for name, value in kwargs.items():
            if value is not None:
                if name not in {f.name for f in fields(self)}:
                    raise ConfigError(f"unknown config field {name!r}")
                setattr(self, name, value)
        return self


def parse_config(text: str) -> RunConfig:
    cfg = RunConfig()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        caster = _KEYS[key]
        try:
            cast = caster(value)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {value!r}") from exc
        setattr(cfg, _FIELD_BY_KEY[key], cast)
    return cfg


def load_config(path) -> RunConfig:
    with open(path) as fh:
        return parse_config(fh.read())
