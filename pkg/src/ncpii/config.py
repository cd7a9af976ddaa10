"""Flat key = value run configuration.

    # comment
    n = 2
    pair = 1, 2, 0.5, 0        # c_12 = 0.5 + 0i (1-based indices)
    pair = 2, 1, 0.3, 0
    eps = 0, 0                 # ray offsets for connect/sweep
    delta = 0, 0               # fixed offsets for fredholm
    s_grid = -10:-4:13         # start:stop:count, or a comma list
    tol = 1e-10
    nodes = 100
    t0 = 6

Every error carries the offending line number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

__all__ = ["RunConfig", "parse_config", "load_config", "parse_grid"]

_SCALARS = {"n": int, "tol": float, "nodes": int, "t0": float}
_VECTORS = ("eps", "delta")
_KNOWN = set(_SCALARS) | set(_VECTORS) | {"pair", "s_grid"}


@dataclass
class RunConfig:
    n: int
    pairs: list = field(default_factory=list)     # (i, j, value), 0-based
    eps: tuple | None = None
    delta: tuple | None = None
    s_grid: tuple | None = None
    tol: float = 1e-10
    nodes: int = 100
    t0: float | None = None
    lines: dict = field(default_factory=dict)     # key -> first line number

    @property
    def C(self) -> np.ndarray:
        c = np.zeros((self.n, self.n), dtype=complex)
        for i, j, v in self.pairs:
            c[i, j] = v
        return c

    def eps_or_zero(self):
        return self.eps if self.eps is not None else (0.0,) * self.n

    def delta_or_zero(self):
        return self.delta if self.delta is not None else (0.0,) * self.n

    def echo(self) -> dict:
        return {
            "n": self.n,
            "pairs": [[i + 1, j + 1, v.real, v.imag] for i, j, v in self.pairs],
            "eps": list(self.eps_or_zero()),
            "delta": list(self.delta_or_zero()),
            "s_grid": list(self.s_grid) if self.s_grid is not None else None,
            "tol": self.tol,
            "nodes": self.nodes,
            "t0": self.t0,
        }


def _number(text, line, what):
    try:
        v = float(text)
    except ValueError:
        raise ConfigError(f"{what}: cannot read {text.strip()!r} as a number", line=line)
    if not math.isfinite(v):
        raise ConfigError(f"{what}: value must be finite", line=line)
    return v


def parse_grid(text, line=None):
    """``a:b:n`` (inclusive, n >= 1) or a comma-separated list."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"grid {text!r} must look like start:stop:count", line=line)
        a = _number(parts[0], line, "grid start")
        b = _number(parts[1], line, "grid stop")
        try:
            n = int(parts[2])
        except ValueError:
            raise ConfigError(f"grid count {parts[2]!r} is not an integer", line=line)
        if n < 1:
            raise ConfigError("grid count must be at least 1", line=line)
        if n == 1:
            return (a,)
        return tuple(float(x) for x in np.linspace(a, b, n))
    vals = [x for x in text.split(",") if x.strip()]
    if not vals:
        raise ConfigError("empty grid", line=line)
    return tuple(_number(x, line, "grid value") for x in vals)


def parse_config(text: str) -> RunConfig:
    values = {}
    lines = {}
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"expected 'key = value', got {body!r}", line=lineno)
        key, _, val = body.partition("=")
        key = key.strip().lower()
        val = val.strip()
        if key not in _KNOWN:
            raise ConfigError(f"unknown key {key!r}", line=lineno)
        if key == "pair":
            pairs.append((lineno, val))
            continue
        if key in values:
            raise ConfigError(f"duplicate key {key!r} (first set on line {lines[key]})",
                              line=lineno)
        values[key] = val
        lines[key] = lineno

    if "n" not in values:
        raise ConfigError("missing required key 'n'", line=len(text.splitlines()) or 1)
    try:
        n = int(values["n"])
    except ValueError:
        raise ConfigError(f"n must be an integer, got {values['n']!r}", line=lines["n"])
    if n < 1:
        raise ConfigError("n must be positive", line=lines["n"])

    cfg = RunConfig(n=n, lines=lines)
    for key in ("tol", "t0"):
        if key in values:
            setattr(cfg, key, _number(values[key], lines[key], key))
    if "nodes" in values:
        try:
            cfg.nodes = int(values["nodes"])
        except ValueError:
            raise ConfigError(f"nodes must be an integer, got {values['nodes']!r}",
                              line=lines["nodes"])
    for key in _VECTORS:
        if key in values:
            vec = tuple(_number(x, lines[key], key) for x in values[key].split(","))
            if len(vec) != n:
                raise ConfigError(f"{key} has {len(vec)} entries, expected {n}",
                                  line=lines[key])
            setattr(cfg, key, vec)
    if "s_grid" in values:
        cfg.s_grid = parse_grid(values["s_grid"], lines["s_grid"])

    seen = {}
    for lineno, val in pairs:
        parts = [p.strip() for p in val.split(",")]
        if len(parts) != 4:
            raise ConfigError("pair needs 'i, j, re, im'", line=lineno)
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError:
            raise ConfigError("pair indices must be integers", line=lineno)
        if not (1 <= i <= n and 1 <= j <= n):
            raise ConfigError(f"pair index ({i}, {j}) outside 1..{n}", line=lineno)
        if (i, j) in seen:
            raise ConfigError(f"entry ({i}, {j}) already set on line {seen[(i, j)]}",
                              line=lineno)
        seen[(i, j)] = lineno
        v = complex(_number(parts[2], lineno, "pair re"), _number(parts[3], lineno, "pair im"))
        lines.setdefault("pair", lineno)
        cfg.pairs.append((i - 1, j - 1, v))
    return cfg


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}")
    return parse_config(text)
