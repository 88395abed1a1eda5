"""Reference simulators for the continuous-time processes.

* exact CIR transitions through the Poisson mixture of gammas
  ``chi2'(df, lam) = 2 * Gamma(df/2 + J)``, ``J ~ Poisson(lam/2)``;
* Gaussian Euler for the truncated equation;
* path functionals (left-endpoint time integral, first exit from an interval).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from numba import njit

from .model import CirParams, marginal_law
from .schemes import GridSpec
from .streams import as_generator, stream_generators
from .truncated import truncated_diffusion, truncated_drift


@dataclass(frozen=True)
class ContinuousPath:
    times: np.ndarray
    values: np.ndarray
    clamp_count: int = 0

    def __post_init__(self):
        if self.times.shape != self.values.shape:
            raise ValueError("times and values must have the same shape")


@dataclass(frozen=True)
class ExitResult:
    side: str  # "low", "high" or "none"
    time: float


# --- samplers ---------------------------------------------------------------

@njit(cache=True)
def _gamma_draw(gen, shape):
    """Marsaglia-Tsang squeeze/rejection, unit scale."""
    boost = 1.0
    a = shape
    if a < 1.0:
        boost = gen.random() ** (1.0 / a)
        a += 1.0
    d = a - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    while True:
        z = gen.standard_normal()
        v = 1.0 + c * z
        if v <= 0.0:
            continue
        v = v * v * v
        u = gen.random()
        if u < 1.0 - 0.0331 * z ** 4:
            return d * v * boost
        if math.log(u) < 0.5 * z * z + d * (1.0 - v + math.log(v)):
            return d * v * boost


@njit(cache=True)
def _gamma_fill(gen, shape, out):
    for i in range(out.size):
        out[i] = _gamma_draw(gen, shape)


# numpy's Poisson sampler overflows near 1e19; far below that the Poisson
# law is normal to within a relative error far under double-precision noise
# of the result, so we switch to the rounded normal there
POISSON_NORMAL_CUTOFF = 1e15


@njit(cache=True)
def _ncx2_draw(gen, half_df, half_lam):
    if half_lam <= 0.0:
        j = 0.0
    elif half_lam < POISSON_NORMAL_CUTOFF:
        j = float(gen.poisson(half_lam))
    else:
        j = np.floor(half_lam + math.sqrt(half_lam) * gen.standard_normal() + 0.5)
    return 2.0 * _gamma_draw(gen, half_df + j)


@njit(cache=True)
def _ncx2_fill(gen, half_df, half_lam, scale, out):
    for i in range(out.size):
        out[i] = scale * _ncx2_draw(gen, half_df, half_lam)


@njit(cache=True)
def _exact_path_fill(gen, x0, half_df, scale, decay, out):
    # one-step transition from x: scale * chi2'(df, x * decay / scale)
    out[0] = x0
    x = x0
    for k in range(1, out.size):
        x = scale * _ncx2_draw(gen, half_df, 0.5 * x * decay / scale)
        out[k] = x


@njit(cache=True)
def _euler_fill(gen, x0, b, sigma, C, dt, out):
    sq = math.sqrt(dt)
    out[0] = x0
    x = x0
    clamps = 0
    for k in range(1, out.size):
        xc = min(x, C)
        x = x + (b - xc) * dt + sigma * math.sqrt(max(xc, 0.0)) * sq * gen.standard_normal()
        if x < 0.0:
            x = 0.0
            clamps += 1
        out[k] = x
    return clamps


@njit(cache=True)
def _euler_exit(gen, x0, b, sigma, C, alpha, beta, dt, max_steps, bridge):
    """Returns (side, step): side 0 low, 1 high, -1 none."""
    sq = math.sqrt(dt)
    x = x0
    for k in range(1, max_steps + 1):
        xc = min(max(x, 0.0), C)
        g2 = sigma * sigma * xc
        y = x + (b - min(x, C)) * dt + math.sqrt(g2) * sq * gen.standard_normal()
        if y < 0.0:
            y = 0.0
        if y <= alpha:
            return 0, k
        if y >= beta:
            return 1, k
        if bridge and g2 > 0.0:
            # crossing probability of a Brownian bridge with frozen coefficient
            p_lo = math.exp(-2.0 * (x - alpha) * (y - alpha) / (g2 * dt))
            p_hi = math.exp(-2.0 * (beta - x) * (beta - y) / (g2 * dt))
            u = gen.random()
            if u < p_lo:
                return 0, k
            if u < p_lo + p_hi:
                return 1, k
        x = y
    return -1, max_steps


def sample_gamma(shape: float, size: int, rng) -> np.ndarray:
    """Gamma(shape, 1) draws, any shape > 0."""
    if not shape > 0:
        raise ValueError("shape must be positive")
    out = np.empty(int(size))
    _gamma_fill(as_generator(rng), float(shape), out)
    return out


def sample_marginal(params: CirParams, t: float, rng, size: int | None = None):
    """Draw(s) of X_t from the exact noncentral chi-square law."""
    spec = marginal_law(params, t)
    out = np.empty(1 if size is None else int(size))
    _ncx2_fill(as_generator(rng), 0.5 * spec.df, 0.5 * spec.noncentrality, spec.scale, out)
    return float(out[0]) if size is None else out


def sample_noncentral_chisq(spec, size: int, rng) -> np.ndarray:
    out = np.empty(int(size))
    _ncx2_fill(as_generator(rng), 0.5 * spec.df, 0.5 * spec.noncentrality, spec.scale, out)
    return out


def _transition_constants(params: CirParams, dt: float):
    s2 = params.sigma ** 2
    scale = s2 * -math.expm1(-dt) / 4.0
    return 2.0 * params.b / s2, scale, math.exp(-dt)


def _deterministic_path(params: CirParams, grid: GridSpec) -> np.ndarray:
    return params.b + (params.x0 - params.b) * np.exp(-grid.times())


def exact_cir_path(params: CirParams, grid: GridSpec, rng) -> ContinuousPath:
    """Markov chain on the grid using the exact CIR transition."""
    if not params.feller_ok:
        raise ValueError("exact paths are only provided under 2b >= sigma^2")
    if params.sigma == 0:
        return ContinuousPath(grid.times(), _deterministic_path(params, grid))
    out = np.empty(grid.n + 1)
    _exact_path_fill(as_generator(rng), params.x0, *_transition_constants(params, grid.dt), out)
    return ContinuousPath(grid.times(), out)


def exact_cir_paths(params: CirParams, grid: GridSpec, master_seed: int, start: int, stop: int) -> np.ndarray:
    """Rows are ``exact_cir_path(params, grid, Rng(master_seed, i)).values``."""
    out = np.empty((stop - start, grid.n + 1))
    if params.sigma == 0:
        out[:] = _deterministic_path(params, grid)
        return out
    consts = _transition_constants(params, grid.dt)
    for row, gen in zip(out, stream_generators(master_seed, start, stop)):
        _exact_path_fill(gen, params.x0, *consts, row)
    return out


def euler_truncated_path(params: CirParams, C, grid: GridSpec, rng) -> ContinuousPath:
    """Gaussian Euler for the truncated SDE, clamped at 0 from below.

    ``clamp_count`` records how often the clamp fired.
    """
    out = np.empty(grid.n + 1)
    clamps = _euler_fill(as_generator(rng), params.x0, params.b, params.sigma, float(C), grid.dt, out)
    return ContinuousPath(grid.times(), out, int(clamps))


def time_integral(path: ContinuousPath, t: float | None = None, transform=None) -> float:
    """Integral of the piecewise-constant (left-endpoint) interpolant up to t."""
    times, values = path.times, path.values
    if transform is not None:
        values = transform(values)
    if t is None:
        t = float(times[-1])
    if t <= times[0]:
        return 0.0
    widths = np.clip(np.minimum(times[1:], t) - times[:-1], 0.0, None)
    return float(np.dot(values[:-1], widths))


def cumulative_time_integral(values: np.ndarray, dt: float) -> np.ndarray:
    """Left sums at every grid time; works on the last axis of a batch."""
    out = np.zeros_like(values, dtype=float)
    np.cumsum(values[..., :-1] * dt, axis=-1, out=out[..., 1:])
    return out


def first_exit(path_generator: Iterable[tuple[float, float]], alpha: float, beta: float,
               max_time: float) -> ExitResult:
    """First time a stream of ``(t, x)`` pairs leaves (alpha, beta)."""
    for t, x in path_generator:
        if t > max_time:
            break
        if x <= alpha:
            return ExitResult("low", float(t))
        if x >= beta:
            return ExitResult("high", float(t))
    return ExitResult("none", float(max_time))


def euler_truncated_stream(params: CirParams, C, dt: float, rng):
    """Endless ``(t, x)`` generator of the truncated Euler chain, for :func:`first_exit`."""
    gen = as_generator(rng)
    sq = math.sqrt(dt)
    x, t, k = params.x0, 0.0, 0
    yield t, x
    while True:
        x = x + truncated_drift(x, params, C) * dt + truncated_diffusion(x, params, C) * sq * gen.standard_normal()
        x = max(x, 0.0)
        k += 1
        yield k * dt, x


def euler_first_exit(params: CirParams, C, alpha: float, beta: float, max_time: float,
                     dt: float, rng, bridge: bool = True) -> ExitResult:
    """Compiled first exit of the truncated Euler chain.

    ``bridge=True`` also checks for a crossing between grid points with the
    Brownian-bridge probability, which removes the leading discrete
    monitoring bias.
    """
    max_steps = int(math.ceil(max_time / dt))
    side, k = _euler_exit(as_generator(rng), params.x0, params.b, params.sigma, float(C),
                          float(alpha), float(beta), float(dt), max_steps, bool(bridge))
    name = {0: "low", 1: "high", -1: "none"}[int(side)]
    return ExitResult(name, k * dt if side >= 0 else float(max_time))


def exit_sides(params: CirParams, C, alpha, beta, max_time, dt, master_seed, start, stop,
               bridge=True) -> np.ndarray:
    """Exit side codes (0 low, 1 high, -1 none) for streams ``start..stop``."""
    max_steps = int(math.ceil(max_time / dt))
    out = np.empty(stop - start, dtype=np.int8)
    for i, gen in enumerate(stream_generators(master_seed, start, stop)):
        out[i] = _euler_exit(gen, params.x0, params.b, params.sigma, float(C), float(alpha),
                             float(beta), float(dt), max_steps, bool(bridge))[0]
    return out
