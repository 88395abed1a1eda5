"""CIR parameters and closed-form analytics.

The process is ``dX = (b - X) dt + sigma sqrt(X) dW`` with unit mean
reversion speed. Everything here is a pure function of its inputs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import DegenerateTime, NonPositiveParameter

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class CirParams:
    """Coefficients of the CIR equation.

    ``sigma = 0`` is accepted here so that deterministic limits can be
    simulated; :func:`validate_params` enforces the strict standing
    assumptions.
    """

    b: float
    sigma: float
    x0: float

    def __post_init__(self):
        for name in ("b", "x0"):
            value = getattr(self, name)
            if not value > 0:
                raise NonPositiveParameter(name, value)
        if not self.sigma >= 0:
            raise NonPositiveParameter("sigma", self.sigma)

    @property
    def feller_ok(self) -> bool:
        # a few ulps of slack so that sigma = sqrt(2 b) counts as the boundary case
        return 2.0 * self.b * (1.0 + 4 * np.finfo(float).eps) >= self.sigma ** 2


@dataclass(frozen=True)
class NoncentralChiSqSpec:
    """Law of ``scale * chi2'(df, noncentrality)``."""

    df: float
    noncentrality: float
    scale: float = 1.0

    def __post_init__(self):
        if not self.df > 0:
            raise ValueError(f"df must be positive, got {self.df!r}")
        if not self.noncentrality >= 0:
            raise ValueError(f"noncentrality must be >= 0, got {self.noncentrality!r}")
        if not self.scale > 0:
            raise ValueError(f"scale must be positive, got {self.scale!r}")

    @property
    def mean(self) -> float:
        return self.scale * (self.df + self.noncentrality)

    @property
    def variance(self) -> float:
        return self.scale ** 2 * (2.0 * self.df + 4.0 * self.noncentrality)


@dataclass(frozen=True)
class MomentBounds:
    B: float
    horizon: float


def validate_params(raw: Mapping[str, float] | None = None, *, allow_zero_sigma=False, **kwargs) -> CirParams:
    """Build :class:`CirParams` from raw numbers, rejecting nonpositive entries.

    Raises
    ------
    NonPositiveParameter
        Names the first offending field among ``b``, ``sigma``, ``x0``.
    """
    values = dict(raw or {})
    values.update(kwargs)
    for name in ("b", "sigma", "x0"):
        if name not in values:
            raise KeyError(name)
        v = float(values[name])
        if name == "sigma" and allow_zero_sigma and v == 0.0:
            continue
        if not v > 0:
            raise NonPositiveParameter(name, values[name])
    return CirParams(float(values["b"]), float(values["sigma"]), float(values["x0"]))


def _one_minus_exp(t):
    return -np.expm1(-np.asarray(t, dtype=float))


def _check_time(t):
    if np.any(np.asarray(t) < 0):
        raise ValueError("t must be nonnegative")


def mean_at(params: CirParams, t):
    """E X_t = x0 e^{-t} + b (1 - e^{-t})."""
    _check_time(t)
    t = np.asarray(t, dtype=float)
    out = params.x0 * np.exp(-t) + params.b * _one_minus_exp(t)
    return float(out) if out.ndim == 0 else out


def variance_at(params: CirParams, t):
    _check_time(t)
    t = np.asarray(t, dtype=float)
    s2 = params.sigma ** 2
    w = _one_minus_exp(t)
    out = params.x0 * s2 * np.exp(-t) * w + 0.5 * params.b * s2 * w * w
    return float(out) if out.ndim == 0 else out


def second_moment_at(params: CirParams, t):
    """E X_t^2.

    Evaluated as ``mean**2 + variance`` which is algebraically the
    three-term expression but free of the cancellation near t = 0; it
    returns exactly ``x0**2`` at t = 0.
    """
    m = mean_at(params, t)
    v = variance_at(params, t)
    return m * m + v


def marginal_law(params: CirParams, t: float, x: float | None = None) -> NoncentralChiSqSpec:
    """Law of X_t started from ``x`` (default x0) as a scaled noncentral chi-square.

    ``X_t = scale * chi2'(df, noncentrality)`` with ``df = 4 b / sigma^2``,
    ``scale = sigma^2 (1 - e^{-t}) / 4`` and
    ``noncentrality = x e^{-t} / scale``.
    """
    if t == 0:
        raise DegenerateTime("X_0 is a point mass; sample it deterministically")
    if t < 0:
        raise ValueError("t must be positive")
    if params.sigma == 0:
        raise ValueError("sigma = 0 has no chi-square representation")
    start = params.x0 if x is None else float(x)
    s2 = params.sigma ** 2
    scale = s2 * float(_one_minus_exp(t)) / 4.0
    return NoncentralChiSqSpec(
        df=4.0 * params.b / s2,
        noncentrality=start * math.exp(-t) / scale,
        scale=scale,
    )


def _golden_max(f, lo, hi, iters=80):
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
        if b - a < 1e-15 * max(1.0, abs(b)):
            break
    return max(fc, fd)


def second_moment_sup(params: CirParams, T: float, grid_points: int = 2049) -> MomentBounds:
    """Upper bound B >= sup_{0<=t<=T} E X_t^2.

    Grid maximum refined by golden-section search on the bracketing cells,
    then inflated by a 1e-9 relative margin.
    """
    if not T > 0:
        raise ValueError("T must be positive")
    ts = np.linspace(0.0, T, grid_points)
    vals = second_moment_at(params, ts)
    i = int(np.argmax(vals))
    best = float(vals[i])
    lo = ts[max(i - 1, 0)]
    hi = ts[min(i + 1, grid_points - 1)]
    if hi > lo:
        best = max(best, _golden_max(lambda s: float(second_moment_at(params, s)), lo, hi))
    return MomentBounds(B=best * (1.0 + 1e-9), horizon=T)
