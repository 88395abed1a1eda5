"""Multiplicative price processes built on the CIR schemes.

Prelimit prices are products ``e^{x0} prod_{k <= [tn/T]} (1 + Q_k)``; the
limits are ``exp(X_t - sigma^2/2 int_0^t X)`` and ``exp(X_t)``.  Paths are
held as logarithms so that large ``x0`` does not overflow.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridMismatch, NonPositiveFactor
from .model import CirParams
from .paths import ContinuousPath, cumulative_time_integral
from .schemes import SchemePath

KINDS = ("product_trunc", "product_full", "product_corrected", "limit_trunc", "limit_full", "exponential")


@dataclass(frozen=True)
class PricePath:
    times: np.ndarray
    log_values: np.ndarray
    kind: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown price kind {self.kind!r}")

    @property
    def values(self) -> np.ndarray:
        return np.exp(self.log_values)

    def at(self, t: float) -> float:
        """Value of the right-continuous step interpolant at t."""
        k = int(np.searchsorted(self.times, t, side="right")) - 1
        return float(np.exp(self.log_values[max(k, 0)]))


def _log_factors(increments):
    q = np.asarray(increments, dtype=float)
    bad = np.flatnonzero(1.0 + q <= 0)
    if bad.size:
        k = int(bad[0])
        raise NonPositiveFactor(k + 1, float(1.0 + q[k]))
    return np.log1p(q)


def log_product(x0: float, increments) -> np.ndarray:
    """x0 + cumulative sums of log(1 + Q_k) along the last axis, starting at x0."""
    logs = _log_factors(increments)
    out = np.empty(logs.shape[:-1] + (logs.shape[-1] + 1,))
    out[..., 0] = x0
    np.cumsum(logs, axis=-1, out=out[..., 1:])
    out[..., 1:] += x0
    return out


def product_price(scheme: SchemePath) -> PricePath:
    kind = "product_full" if scheme.truncation is None else "product_trunc"
    return PricePath(scheme.grid.times(), log_product(scheme.x0, scheme.increments), kind)


def corrected_product_price(scheme: SchemePath, params: CirParams,
                            mixed_states: SchemePath | None = None) -> PricePath:
    """Product of ``(1 + Q_k) exp(sigma^2 X_k / (2n))``.

    By default ``X_k`` are the states of ``scheme`` itself.  Passing the full
    scheme as ``mixed_states`` pairs truncated increments with untruncated
    states instead.
    """
    states = scheme if mixed_states is None else mixed_states
    if states.grid != scheme.grid:
        raise GridMismatch(f"{states.grid} != {scheme.grid}")
    n = scheme.grid.n
    logs = log_product(scheme.x0, scheme.increments)
    correction = np.concatenate([[0.0], np.cumsum(params.sigma ** 2 * states.values[1:] / (2.0 * n))])
    return PricePath(scheme.grid.times(), logs + correction, "product_corrected")


def log_limit_price(values: np.ndarray, dt: float, sigma: float, C: float | None = None) -> np.ndarray:
    """log S_t on a uniform grid for a batch of paths (last axis is time)."""
    integrand = values if C is None else np.minimum(values, C)
    return values - 0.5 * sigma ** 2 * cumulative_time_integral(integrand, dt)


def limit_price(path: ContinuousPath, params: CirParams, C=None) -> PricePath:
    """exp(X_t - sigma^2/2 int_0^t X_s ds), with X ^ C in the integral when C is given."""
    x = path.values
    integrand = x if C is None else np.minimum(x, float(C))
    widths = np.diff(path.times)
    integral = np.concatenate([[0.0], np.cumsum(integrand[:-1] * widths)])
    kind = "limit_full" if C is None else "limit_trunc"
    return PricePath(path.times, x - 0.5 * params.sigma ** 2 * integral, kind)


def exponential_price(path: ContinuousPath) -> PricePath:
    return PricePath(path.times, np.asarray(path.values, dtype=float).copy(), "exponential")
