"""Additive Euler schemes driven by Rademacher noise.

Both recursions replace the Wiener increment by iid ``q_k = +-sqrt(T/n)``:

    X_k       = X_{k-1} + (b - X_{k-1}) T/n + sigma q_k sqrt(X_{k-1})
    X_k^{(C)} = X_{k-1} + (b - X_{k-1}^C) T/n + sigma q_k sqrt(X_{k-1}^C)

where ``x^C = min(x, C)``.  Under ``2b >= sigma^2`` and ``n > 2T`` every
state is strictly positive.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GridMismatch, NegativeStateEncountered, OutOfDomain, PositivityNotGuaranteed
from .model import CirParams
from .streams import as_generator, stream_generators
from .truncated import truncation_level


@dataclass(frozen=True)
class GridSpec:
    T: float
    n: int

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError(f"T must be positive, got {self.T!r}")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")

    @property
    def dt(self) -> float:
        return self.T / self.n

    @property
    def positivity_ok(self) -> bool:
        return self.n > 2 * self.T

    def time(self, k):
        return k * self.T / self.n

    def times(self) -> np.ndarray:
        return np.arange(self.n + 1) * self.T / self.n

    def index_of(self, t):
        """floor(n t / T), consistent with :meth:`time` at the grid points."""
        t = np.asarray(t, dtype=float)
        k = np.floor(t * self.n / self.T).astype(np.int64)
        k = np.where(self.time(k + 1) <= t, k + 1, k)
        k = np.where(self.time(k) > t, k - 1, k)
        k = np.clip(k, 0, self.n)
        return int(k) if k.ndim == 0 else k


@dataclass(frozen=True)
class NoiseSequence:
    q: np.ndarray
    grid: GridSpec

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float)
        if q.shape != (self.grid.n,):
            raise ValueError(f"expected {self.grid.n} noise values, got shape {q.shape}")
        if not np.all(np.abs(q) == math.sqrt(self.grid.dt)):
            raise ValueError("noise values must be +-sqrt(T/n)")
        object.__setattr__(self, "q", q)


@dataclass(frozen=True)
class SchemePath:
    values: np.ndarray
    increments: np.ndarray
    grid: GridSpec
    truncation: float | None = None

    @property
    def x0(self) -> float:
        return float(self.values[0])


@dataclass(frozen=True)
class StepPath:
    """Piecewise-constant embedding: X_t = X_k on [kT/n, (k+1)T/n), X_T = X_n."""

    scheme: SchemePath

    def __call__(self, t):
        return step_eval(self, t)


@dataclass(frozen=True)
class PositivityCheck:
    ok: bool
    discriminant: float


@dataclass(frozen=True)
class TheoreticalBounds:
    gamma: float
    increment_bound: float
    disagreement_bound: float
    drift_residual_bound: float
    quad_residual_bound: float
    centered_quad_bound: float = field(default=math.inf)
    c2: float = field(default=math.inf)


@dataclass(frozen=True)
class Agreement:
    agree: bool
    first_divergence: int | None


def _sign_bits(gen: np.random.Generator, n: int) -> np.ndarray:
    return gen.integers(0, 2, size=n, dtype=np.int8)


def rademacher_noise(grid: GridSpec, rng) -> NoiseSequence:
    """n iid symmetric draws of magnitude sqrt(T/n)."""
    bits = _sign_bits(as_generator(rng), grid.n)
    return NoiseSequence(np.where(bits == 1, 1.0, -1.0) * math.sqrt(grid.dt), grid)


def rademacher_noise_batch(grid: GridSpec, master_seed: int, start: int, stop: int) -> np.ndarray:
    """Noise matrix whose row i is ``rademacher_noise(grid, Rng(master_seed, start + i)).q``."""
    out = np.empty((stop - start, grid.n))
    h = math.sqrt(grid.dt)
    for row, gen in zip(out, stream_generators(master_seed, start, stop)):
        row[:] = np.where(_sign_bits(gen, grid.n) == 1, h, -h)
    return out


def positivity_precondition(params: CirParams, grid: GridSpec) -> PositivityCheck:
    """Discriminant of the quadratic in sqrt(X_{k-1}) that keeps X_k > 0."""
    h = grid.dt
    disc = params.sigma ** 2 * h - 4.0 * params.b * h * (1.0 - h)
    return PositivityCheck(ok=params.feller_ok and grid.positivity_ok, discriminant=disc)


def _require_positivity(params, grid):
    check = positivity_precondition(params, grid)
    if not check.ok:
        reasons = []
        if not params.feller_ok:
            reasons.append(f"2b >= sigma^2 fails (2b={2 * params.b!r}, sigma^2={params.sigma ** 2!r})")
        if not grid.positivity_ok:
            reasons.append(f"n > 2T fails (n={grid.n}, 2T={2 * grid.T!r})")
        raise PositivityNotGuaranteed("; ".join(reasons))


def scheme_values(params: CirParams, grid: GridSpec, noise, C: float | None = None) -> np.ndarray:
    """Vectorised recursion over a batch of paths.

    ``noise`` has shape ``(..., n)``; the result has shape ``(..., n + 1)``.
    ``C=None`` gives the full scheme.  Raises if a square root of a negative
    state would be needed.
    """
    q = np.asarray(noise, dtype=float)
    h = grid.dt
    out = np.empty(q.shape[:-1] + (grid.n + 1,))
    out[..., 0] = params.x0
    x = out[..., 0]
    for k in range(1, grid.n + 1):
        xc = x if C is None else np.minimum(x, C)
        if np.any(xc < 0):
            raise NegativeStateEncountered(k, float(np.min(xc)))
        x = x + (params.b - xc) * h + params.sigma * q[..., k - 1] * np.sqrt(xc)
        out[..., k] = x
    return out


def _noise_array(noise, grid):
    if isinstance(noise, NoiseSequence):
        if noise.grid != grid:
            raise GridMismatch(f"noise grid {noise.grid} differs from {grid}")
        return noise.q
    q = np.asarray(noise, dtype=float)
    if q.shape != (grid.n,):
        raise GridMismatch(f"expected {grid.n} noise values, got shape {q.shape}")
    return q


def additive_scheme(params: CirParams, grid: GridSpec, noise, checked: bool = True) -> SchemePath:
    """Full Rademacher-Euler scheme.

    With ``checked=False`` the positivity precondition is skipped and a
    negative state surfaces as :class:`NegativeStateEncountered`.
    """
    if checked:
        _require_positivity(params, grid)
    values = scheme_values(params, grid, _noise_array(noise, grid))
    return SchemePath(values, np.diff(values), grid, None)


def truncated_scheme(params: CirParams, C, grid: GridSpec, noise, checked: bool = True) -> SchemePath:
    """Rademacher-Euler scheme for the truncated equation.

    ``C = math.inf`` reproduces :func:`additive_scheme` bit for bit.
    """
    C = float(C)
    if checked:
        _require_positivity(params, grid)
        if math.isfinite(C):
            truncation_level(C, params)
    values = scheme_values(params, grid, _noise_array(noise, grid), C)
    return SchemePath(values, np.diff(values), grid, C)


def theoretical_bounds(params: CirParams, C, grid: GridSpec) -> TheoreticalBounds:
    b, s2, x0, T, n = params.b, params.sigma ** 2, params.x0, grid.T, grid.n
    C = float(C)
    # printed with the 3/2 denominator; only ever used as an upper bound
    gamma = max((s2 + 2 * b + math.sqrt(s2 * s2 + 4 * b * s2 + 8 * b * b)) / 1.5, x0)
    return TheoreticalBounds(
        gamma=gamma,
        increment_bound=(b + C * T) / n + params.sigma * math.sqrt(T * C / n),
        disagreement_bound=2.0 * (x0 + b * T) ** 2 / C ** 2 + 8.0 * s2 * gamma * T / C ** 2,
        drift_residual_bound=(abs(b) + C) * T / n,
        quad_residual_bound=(abs(b) + C) ** 2 * T * T / n + s2 * C * T / n,
        centered_quad_bound=s2 * C * T / n,
        c2=(b + C * T) + params.sigma * math.sqrt(T * C),
    )


def agreement_check(path_full: SchemePath, path_trunc: SchemePath) -> Agreement:
    if path_full.grid != path_trunc.grid:
        raise GridMismatch(f"{path_full.grid} != {path_trunc.grid}")
    diff = np.flatnonzero(path_full.values != path_trunc.values)
    if diff.size == 0:
        return Agreement(True, None)
    return Agreement(False, int(diff[0]))


def step_eval(step, t):
    scheme = step.scheme if isinstance(step, StepPath) else step
    grid = scheme.grid
    t_arr = np.asarray(t, dtype=float)
    if np.any((t_arr < 0) | (t_arr > grid.T)) or np.any(np.isnan(t_arr)):
        raise OutOfDomain(f"t must lie in [0, {grid.T}]")
    out = scheme.values[grid.index_of(t_arr)]
    return float(out) if np.ndim(out) == 0 else out
