"""Run configuration: flat ``key = value`` files with command-line overrides.

Precedence (lowest to highest): built-in defaults (the 23Na experiment),
the file named by ``$DEVCORR_CONFIG``, a ``--config`` file, explicit flags.
"""
from __future__ import annotations

import os
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from .correlations import OptimizerConfig
from .io import fmt, parse_key_values
from .relaxation import RelaxationParams

ENV_VAR = "DEVCORR_CONFIG"

# seed for the random X state; chosen so that the state sits in the K > Q regime
DEFAULT_X_SEED = 0


@dataclass(frozen=True)
class RunConfig:
    C: float = 12e9
    J0: float = 17e-9
    J1: float = 3.0e-9
    J2: float = 3.4e-9
    epsilon: float = 1e-5
    alpha: float = 1.0
    dt: float = 1.5e-3
    n_steps: int = 40
    seed: int = DEFAULT_X_SEED
    optimizer_fatol: float = 1e-9
    optimizer_max_iter: int = 500
    fit_consistency_threshold: float = 0.25

    def __post_init__(self):
        for name in ("C", "epsilon", "alpha", "dt", "optimizer_fatol", "fit_consistency_threshold"):
            if not getattr(self, name) > 0:
                raise ValueError(f"config value {name} must be positive, got {getattr(self, name)}")
        for name in ("J0", "J1", "J2"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"config value {name} must be non-negative, got {getattr(self, name)}")
        if self.n_steps < 1:
            raise ValueError(f"n_steps must be at least 1, got {self.n_steps}")
        if self.optimizer_max_iter < 1:
            raise ValueError("optimizer_max_iter must be at least 1")

    @property
    def relaxation(self) -> RelaxationParams:
        return RelaxationParams(C=self.C, J0=self.J0, J1=self.J1, J2=self.J2)

    @property
    def optimizer(self) -> OptimizerConfig:
        return OptimizerConfig(fatol=self.optimizer_fatol, max_iter=self.optimizer_max_iter)

    def to_text(self) -> str:
        lines = []
        for k, v in asdict(self).items():
            lines.append(f"{k} = {v}" if isinstance(v, int) else f"{k} = {fmt(v)}")
        return "\n".join(lines) + "\n"


_TYPES = {f.name: (int if f.type in ("int", int) else float) for f in fields(RunConfig)}


def coerce(overrides: dict[str, str | float | int]) -> dict[str, float | int]:
    out = {}
    for key, value in overrides.items():
        if key not in _TYPES:
            raise ValueError(f"unknown config key {key!r}; known keys: {', '.join(_TYPES)}")
        typ = _TYPES[key]
        try:
            out[key] = typ(value) if typ is float else int(str(value), 10)
        except ValueError:
            raise ValueError(f"config key {key!r}: cannot parse {value!r} as {typ.__name__}") from None
    return out


def read_config_file(path) -> dict[str, float | int]:
    return coerce(parse_key_values(Path(path).read_text()))


def load_config(path=None, overrides: dict | None = None, environ=None) -> RunConfig:
    environ = os.environ if environ is None else environ
    values: dict = {}
    env_path = environ.get(ENV_VAR)
    if env_path:
        values.update(read_config_file(env_path))
    if path is not None:
        values.update(read_config_file(path))
    if overrides:
        values.update(coerce({k: v for k, v in overrides.items() if v is not None}))
    return replace(RunConfig(), **values)
