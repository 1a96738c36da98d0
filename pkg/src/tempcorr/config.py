"""Flat ``key = value`` experiment configuration.

Schema (every key optional except ``dim`` and ``channel``)::

    dim            = 2 | 3
    state          = vacuum | balanced_superposition | maximally_mixed | <matrix.json>
                     (comma-separated list runs one sweep per state)
    channel        = amplitude_damping | phase_damping | depolarizing | identity
    grid_start     = 0.0
    grid_stop      = 5.0
    grid_points    = 101
    measures       = comma-separated subset of f, TER, ER, TSR, TNR, LHV-TNR, g, NSIT
    settings_count = 2            number of PVM settings for TSR, TNR, NSIT
    construction   = pdo | wigner
    optimize       = false        search PVMs for TSR/TNR instead of using MUBs
    restarts       = 4
    max_evals      = 200
    seed           = 0
    output         = results      path prefix for CSV and SVG files

Lines starting with ``#`` and blank lines are ignored.  Unknown keys,
repeated keys and malformed values raise :class:`ConfigError`.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from . import qmat
from .dynamics import KINDS, Channel, _ALIASES
from .errors import ConfigError

MEASURE_LABELS = ("f", "TER", "ER", "TSR", "TNR", "LHV-TNR", "g", "NSIT")
NAMED_STATES = ("vacuum", "balanced_superposition", "maximally_mixed")
_STATE_ALIASES = {"balanced": "balanced_superposition", "mixed": "maximally_mixed"}

DEFAULT_GRID = (0.0, 5.0, 101)


@dataclass(frozen=True)
class ExperimentConfig:
    dim: int
    channel: str
    states: tuple = ("maximally_mixed",)
    grid_start: float = DEFAULT_GRID[0]
    grid_stop: float = DEFAULT_GRID[1]
    grid_points: int = DEFAULT_GRID[2]
    measures: tuple = ("f", "TER")
    settings_count: int = 2
    construction: str = "pdo"
    optimize: bool = False
    restarts: int = 4
    max_evals: int = 200
    seed: int = 0
    output: str = "results"
    base_dir: str = field(default=".", compare=False)

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ConfigError(f"dim must be 2 or 3, got {self.dim}")
        kind = _ALIASES.get(self.channel, self.channel)
        if kind not in KINDS:
            raise ConfigError(f"unknown channel {self.channel!r}; expected one of {KINDS}")
        object.__setattr__(self, "channel", kind)
        if not self.states:
            raise ConfigError("at least one initial state is required")
        if not self.measures:
            raise ConfigError("measures must name at least one of " + ", ".join(MEASURE_LABELS))
        unknown = [m for m in self.measures if m not in MEASURE_LABELS]
        if unknown:
            raise ConfigError(f"unknown measures {unknown}; expected a subset of {MEASURE_LABELS}")
        if len(set(self.measures)) != len(self.measures):
            raise ConfigError("measures repeat a label")
        if self.grid_points < 1:
            raise ConfigError("grid_points must be positive")
        if self.grid_points > 1 and not self.grid_stop > self.grid_start:
            raise ConfigError("grid must be increasing: grid_stop > grid_start")
        if self.grid_start < 0:
            raise ConfigError("grid_start must be non-negative")
        if self.settings_count < 1:
            raise ConfigError("settings_count must be at least 1")
        if self.construction not in ("pdo", "wigner"):
            raise ConfigError("construction must be pdo or wigner")
        if self.construction == "wigner" and self.dim != 3:
            raise ConfigError("the wigner construction needs dim = 3")
        if "g" in self.measures and self.dim != 3:
            raise ConfigError("the g criterion is defined for dim = 3 only")
        if self.restarts < 0 or self.max_evals < 1:
            raise ConfigError("restarts must be >= 0 and max_evals >= 1")

    def grid(self) -> np.ndarray:
        if self.grid_points == 1:
            return np.array([self.grid_start])
        return np.linspace(self.grid_start, self.grid_stop, self.grid_points)

    def channel_at(self, gamma_t: float) -> Channel:
        return Channel(self.channel, self.dim, float(gamma_t))

    def state_matrix(self, name: str) -> np.ndarray:
        return resolve_state(name, self.dim, self.base_dir)


def resolve_state(name: str, dim: int, base_dir: str = ".") -> np.ndarray:
    """Named initial state, or a density matrix read from a JSON matrix file."""
    key = _STATE_ALIASES.get(name, name)
    if key == "vacuum":
        return np.diag(np.eye(dim)[0]).astype(complex)
    if key == "balanced_superposition":
        return np.full((dim, dim), 1 / dim, dtype=complex)
    if key == "maximally_mixed":
        return np.eye(dim, dtype=complex) / dim
    path = name if os.path.isabs(name) else os.path.join(base_dir, name)
    if not os.path.exists(path):
        raise ConfigError(f"state {name!r} is neither a named state {NAMED_STATES} nor an existing file")
    try:
        rho = qmat.load_matrix(path)
    except Exception as exc:
        raise ConfigError(f"{path}: cannot read matrix: {exc}") from exc
    if rho.shape != (dim, dim) or not qmat.is_state(rho, 1e-8):
        raise ConfigError(f"{path}: not a {dim}x{dim} density matrix")
    return rho


def _canonical_measure(token: str) -> str:
    for label in MEASURE_LABELS:
        if token.lower() == label.lower() or token.lower().replace("_", "-") == label.lower():
            return label
    raise ConfigError(f"unknown measure {token!r}; expected a subset of {MEASURE_LABELS}")


def _bool(text: str) -> bool:
    low = text.lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


_PARSERS = {
    "dim": int,
    "state": lambda v: tuple(_STATE_ALIASES.get(s, s) for s in _list(v)),
    "channel": str,
    "grid_start": float,
    "grid_stop": float,
    "grid_points": int,
    "measures": lambda v: tuple(_canonical_measure(m) for m in _list(v)),
    "settings_count": int,
    "construction": str,
    "optimize": _bool,
    "restarts": int,
    "max_evals": int,
    "seed": int,
    "output": str,
}
_FIELD = {"state": "states"}


def parse_config(text: str, base_dir: str = ".") -> ExperimentConfig:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _PARSERS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}; allowed keys: {sorted(_PARSERS)}")
        name = _FIELD.get(key, key)
        if name in values:
            raise ConfigError(f"line {lineno}: key {key!r} given twice")
        try:
            values[name] = _PARSERS[key](value)
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from None
    for required in ("dim", "channel"):
        if required not in values:
            raise ConfigError(f"missing required key {required!r}")
    cfg = ExperimentConfig(base_dir=base_dir, **values)
    for s in cfg.states:
        cfg.state_matrix(s)  # fail before any computation
    return cfg


def load_config(path) -> ExperimentConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from exc
    return parse_config(text, os.path.dirname(os.path.abspath(path)))
