"""Truncated CIR coefficients, scale function and exit probabilities.

The truncated equation replaces the drift by ``b - (x ^ C)`` and the
diffusion by ``sigma sqrt((x v 0) ^ C)``.  Its scale function

    V(x) = int_1^x exp(-int_1^y 2 f(z) / g(z)^2 dz) dy

has the density ``y^{-2b/sigma^2} exp(2 (y - 1) / sigma^2)`` below C and an
exponential density above C, so V is available in closed form past C.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DomainTooSmall, InvalidTruncation, OrderingViolation, QuadratureFailure
from .model import CirParams

MIN_X = 1e-12
REL_TOL = 1e-10


@dataclass(frozen=True)
class TruncationLevel:
    C: float

    def __post_init__(self):
        if not self.C > 0:
            raise InvalidTruncation(f"C must be positive, got {self.C!r}")

    def __float__(self):
        return float(self.C)


def truncation_level(C, params: CirParams) -> TruncationLevel:
    """Validate ``C > max(b, 1)``, the range where the truncated process stays positive."""
    level = C if isinstance(C, TruncationLevel) else TruncationLevel(float(C))
    if not level.C > max(params.b, 1.0):
        raise InvalidTruncation(
            f"C={level.C!r} violates C > max(b, 1) = {max(params.b, 1.0)!r}"
        )
    return level


@dataclass(frozen=True)
class ScaleFunctionEval:
    x: float
    value: float
    method: str  # "quadrature" or "closed_form_tail"


@dataclass(frozen=True)
class HittingProbabilities:
    p_alpha_first: float
    p_beta_first: float


def truncated_drift(x, params: CirParams, C):
    out = params.b - np.minimum(x, float(C))
    return float(out) if np.ndim(out) == 0 else out


def truncated_diffusion(x, params: CirParams, C):
    out = params.sigma * np.sqrt(np.clip(x, 0.0, float(C)))
    return float(out) if np.ndim(out) == 0 else out


def _log_density(y, params, C):
    s2 = params.sigma ** 2
    p = 2.0 * params.b / s2
    y = np.asarray(y, dtype=float)
    inner = -p * np.log(np.minimum(y, C)) + 2.0 * (np.minimum(y, C) - 1.0) / s2
    tail = -2.0 * (params.b - C) * np.maximum(y - C, 0.0) / (s2 * C)
    return inner + tail


def scale_density(y, params: CirParams, C):
    """V'(y); continuous at y = C with a kink in its derivative."""
    if np.any(np.asarray(y) <= 0):
        raise ValueError("scale density is defined for y > 0")
    out = np.exp(_log_density(y, params, float(C)))
    return float(out) if np.ndim(out) == 0 else out


def _quad(f, lo, hi):
    val, err = integrate.quad(f, lo, hi, epsabs=0.0, epsrel=1e-13, limit=200)
    if not np.isfinite(val) or err > REL_TOL * abs(val) + 1e-300:
        raise QuadratureFailure(f"quadrature on [{lo}, {hi}] gave {val} +/- {err}")
    return val


def _density_integral(lo, hi, params, C):
    """int_lo^hi V'(y) dy for 0 < lo <= hi <= C."""
    if lo == hi:
        return 0.0
    if hi <= 1.0 or lo < 1.0:
        # y = e^u removes the y^{-2b/sigma^2} blow-up near zero
        def g(u):
            return math.exp(u + float(_log_density(math.exp(u), params, C)))

        if hi <= 1.0:
            return _quad(g, math.log(lo), math.log(hi))
        return _quad(g, math.log(lo), 0.0) + _density_integral(1.0, hi, params, C)
    return _quad(lambda y: math.exp(float(_log_density(y, params, C))), lo, hi)


def _tail_integral(x, params, C):
    """int_C^x V'(y) dy in closed form, x >= C."""
    s2 = params.sigma ** 2
    p = 2.0 * params.b / s2
    rate = 2.0 * (C - params.b) / (s2 * C)
    lead = C ** (1.0 - p) * s2 / (2.0 * (C - params.b)) * math.exp(2.0 * (C - 1.0) / s2)
    return lead * math.expm1(rate * (x - C))


def _scale_increment(a, x, params, C):
    """V(x) - V(a) for a <= x."""
    if a > x:
        return -_scale_increment(x, a, params, C)
    if x <= C:
        return _density_integral(a, x, params, C)
    if a >= C:
        return _tail_integral(x, params, C) - _tail_integral(a, params, C)
    return _density_integral(a, C, params, C) + _tail_integral(x, params, C)


def _check_x(x):
    if not x > MIN_X:
        raise DomainTooSmall(f"x={x!r} is too close to 0 (V diverges there)")


def scale_function(x: float, params: CirParams, C) -> ScaleFunctionEval:
    """Scale function of the truncated process, normalised by V(1) = 0.

    Quadrature up to C, the closed-form exponential tail beyond it.
    """
    _check_x(x)
    C = float(truncation_level(C, params))
    x = float(x)
    if x <= C:
        return ScaleFunctionEval(x, _scale_increment(1.0, x, params, C), "quadrature")
    c1 = _density_integral(1.0, C, params, C)
    return ScaleFunctionEval(x, c1 + _tail_integral(x, params, C), "closed_form_tail")


def hitting_probability(params: CirParams, C, alpha: float, beta: float) -> HittingProbabilities:
    """Probabilities that the truncated process started at x0 leaves (alpha, beta) low or high.

    P(tau_alpha < tau_beta) = (V(beta) - V(x0)) / (V(beta) - V(alpha)).
    Differences of V are integrated directly rather than subtracted.
    """
    if not 0 < alpha < params.x0 < beta:
        raise OrderingViolation(
            f"need 0 < alpha < x0 < beta, got alpha={alpha!r}, x0={params.x0!r}, beta={beta!r}"
        )
    _check_x(alpha)
    C = float(truncation_level(C, params))
    upper = _scale_increment(params.x0, beta, params, C)
    lower = _scale_increment(alpha, params.x0, params, C)
    total = upper + lower
    return HittingProbabilities(p_alpha_first=upper / total, p_beta_first=lower / total)
