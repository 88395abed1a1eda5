"""Experiment configuration: INI-style files plus keyword overrides.

Example file::

    [model]
    b = 1
    sigma = 1
    x0 = 1

    [grid]
    T = 1
    n_values = 8, 32, 128, 512
    C_values = 4, 8, 16, 32

    [run]
    path_count = 100000
    master_seed = 42
    workers = 1
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .errors import ConfigInvalid, NonPositiveParameter
from .model import CirParams
from .streams import default_seed


def _floats(text):
    return tuple(float(v) for v in str(text).replace(",", " ").split())


def _ints(text):
    return tuple(int(float(v)) for v in str(text).replace(",", " ").split())


@dataclass(frozen=True)
class ExperimentConfig:
    params: CirParams = field(default_factory=lambda: CirParams(1.0, 1.0, 1.0))
    T: float = 1.0
    n_values: tuple = (8, 32, 128, 512)
    C_values: tuple = (4.0, 8.0, 16.0, 32.0)
    path_count: int = 100_000
    eval_times: tuple = ()
    master_seed: int = field(default_factory=default_seed)
    epsilon: float = 1e-3
    confidence: float = 0.999
    output_path: str | None = None
    workers: int = 1
    positivity_mode: bool = True
    n_se: float = 4.0
    # first-exit experiment
    alpha: float = 0.5
    beta: float = 2.0
    exit_dt: float = 1e-4
    max_time: float = 50.0
    # price experiment
    n_ref: int = 4096
    ref_path_count: int = 25_000
    price_bias_constant: float = 1.0

    def check_exit_interval(self) -> "ExperimentConfig":
        if not 0 < self.alpha < self.params.x0 < self.beta:
            raise ConfigInvalid(
                f"need 0 < alpha < x0 < beta, got {self.alpha}, {self.params.x0}, {self.beta}")
        return self

    @property
    def times(self) -> tuple:
        return self.eval_times or (self.T,)

    def validate(self) -> "ExperimentConfig":
        """Reject settings that break the preconditions of the schemes."""
        p = self.params
        if not self.T > 0:
            raise ConfigInvalid(f"T={self.T} must be positive")
        if not self.n_values:
            raise ConfigInvalid("n_values is empty")
        for n in self.n_values:
            if n < 1:
                raise ConfigInvalid(f"n={n} must be a positive integer")
            if self.positivity_mode and not n > 2 * self.T:
                raise ConfigInvalid(f"n={n} violates n > 2T = {2 * self.T} required for positivity")
        if self.positivity_mode and not p.feller_ok:
            raise ConfigInvalid(f"2b >= sigma^2 fails: 2b={2 * p.b}, sigma^2={p.sigma ** 2}")
        for C in self.C_values:
            if not C > max(p.b, 1.0):
                raise ConfigInvalid(f"C={C} violates C > max(b, 1) = {max(p.b, 1.0)}")
        if self.path_count < 100:
            raise ConfigInvalid(f"path_count={self.path_count} must be at least 100")
        if not 0 < self.confidence < 1:
            raise ConfigInvalid(f"confidence={self.confidence} must lie in (0, 1)")
        for t in self.eval_times:
            if not 0 < t <= self.T:
                raise ConfigInvalid(f"eval time {t} must lie in (0, T]")
        if self.workers < 1:
            raise ConfigInvalid("workers must be >= 1")
        if self.epsilon <= 0 or self.exit_dt <= 0 or self.max_time <= 0:
            raise ConfigInvalid("epsilon, exit_dt and max_time must be positive")
        if self.n_ref < 1 or self.ref_path_count < 2:
            raise ConfigInvalid("n_ref and ref_path_count must be positive")
        return self


_KEYS = {
    "b": float, "sigma": float, "x0": float,
    "T": float, "n_values": _ints, "C_values": _floats, "eval_times": _floats,
    "path_count": int, "master_seed": int, "workers": int,
    "epsilon": float, "confidence": float, "n_se": float, "output_path": str,
    "positivity_mode": lambda s: str(s).strip().lower() in ("1", "true", "yes", "on"),
    "alpha": float, "beta": float, "exit_dt": float, "max_time": float,
    "n_ref": int, "ref_path_count": int, "price_bias_constant": float,
}


def _read_file(path) -> dict:
    parser = configparser.ConfigParser()
    parser.optionxform = str
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigInvalid(f"cannot read config {path}: {exc}") from exc
    raw = {}
    for section in parser.sections():
        for key, value in parser.items(section):
            if key not in _KEYS:
                raise ConfigInvalid(f"unknown key {key!r} in section [{section}]")
            raw[key] = value
    return raw


def make_config(path: str | Path | None = None, **overrides) -> ExperimentConfig:
    """Build a validated config; keyword overrides win over file values."""
    raw = _read_file(path) if path else {}
    raw.update({k: v for k, v in overrides.items() if v is not None})
    unknown = set(raw) - set(_KEYS)
    if unknown:
        raise ConfigInvalid(f"unknown settings {sorted(unknown)}")
    try:
        values = {k: (v if not isinstance(v, str) else _KEYS[k](v)) for k, v in raw.items()}
        for k in ("n_values", "C_values", "eval_times"):
            if k in values and not isinstance(values[k], tuple):
                values[k] = tuple(values[k])
        base = ExperimentConfig()
        params = CirParams(
            float(values.pop("b", base.params.b)),
            float(values.pop("sigma", base.params.sigma)),
            float(values.pop("x0", base.params.x0)),
        )
    except (ValueError, NonPositiveParameter) as exc:
        raise ConfigInvalid(str(exc)) from exc
    names = {f.name for f in fields(ExperimentConfig)}
    return replace(base, params=params, **{k: v for k, v in values.items() if k in names}).validate()
