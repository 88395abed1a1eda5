"""Per-path residuals of the weak-convergence conditions.

For the truncated scheme the conditional moments are explicit,

    E(Q_k | F_{k-1})   = (b - X_{k-1}^C) T/n
    E(Q_k^2 | F_{k-1}) = ((b - X_{k-1}^C) T/n)^2 + sigma^2 (T/n) X_{k-1}^C,

so every residual "sum of conditional moments minus integral of the step
process" telescopes to a boundary term on the current step.  The raw sums
and the telescoped forms are both computed here, which lets tests compare
them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GridMismatch
from .model import CirParams
from .schemes import SchemePath, TheoreticalBounds, theoretical_bounds
from .stats import StatReport

SLACK = 1e-12


@dataclass(frozen=True)
class ConditionReport:
    max_increment: float
    drift_residual_sup: float
    quad_residual_sup_centered: float
    quad_residual_sup_uncentered: float
    bounds: TheoreticalBounds
    drift_identity_error: float
    quad_identity_error: float

    @property
    def passed(self) -> bool:
        b = self.bounds
        return (
            self.max_increment <= b.increment_bound + SLACK
            and self.drift_residual_sup <= b.drift_residual_bound + SLACK
            and self.quad_residual_sup_centered <= b.centered_quad_bound + SLACK
            and self.quad_residual_sup_uncentered <= b.quad_residual_bound + SLACK
        )


@dataclass(frozen=True)
class ConditionSums:
    sum_sq: float
    sum_abs_mean: float
    sum_sq_bound: float
    sum_abs_mean_bound: float

    @property
    def ok(self) -> bool:
        return self.sum_sq <= self.sum_sq_bound + SLACK and self.sum_abs_mean <= self.sum_abs_mean_bound + SLACK


def _capped(scheme: SchemePath, C):
    C = scheme.truncation if C is None else float(C)
    if C is None:
        C = math.inf
    return np.minimum(scheme.values, C), C


def conditional_moments(scheme: SchemePath, params: CirParams, C=None):
    """Arrays (E(Q_k|F), E(Q_k^2|F)) for k = 1..n."""
    xc, _ = _capped(scheme, C)
    h = scheme.grid.dt
    mean = (params.b - xc[:-1]) * h
    second = mean * mean + params.sigma ** 2 * h * xc[:-1]
    return mean, second


def condition_residuals(scheme: SchemePath, params: CirParams, C, t_grid) -> ConditionReport:
    """Residuals of the drift and quadratic-variation conditions at the times ``t_grid``.

    Each residual is obtained twice: from raw partial sums minus the exact
    integral of the step process, and from its telescoped boundary term.
    The report keeps the sup over ``t_grid`` of the raw residuals and the
    largest discrepancy between the two forms.
    """
    grid = scheme.grid
    t = np.atleast_1d(np.asarray(t_grid, dtype=float))
    if np.any((t < 0) | (t > grid.T)):
        raise GridMismatch(f"t_grid must lie in [0, {grid.T}]")
    xc, C = _capped(scheme, C)
    h = grid.dt
    s2 = params.sigma ** 2
    drift = params.b - xc
    mean, second = conditional_moments(scheme, params, C)

    zero = np.zeros(1)
    sum_mean = np.concatenate([zero, np.cumsum(mean)])
    sum_second = np.concatenate([zero, np.cumsum(second)])
    sum_var = np.concatenate([zero, np.cumsum(second - mean * mean)])
    int_drift = np.concatenate([zero, np.cumsum(drift[:-1] * h)])
    int_x = np.concatenate([zero, np.cumsum(xc[:-1] * h)])

    k = grid.index_of(t)
    tau = t - grid.time(k)
    drift_raw = sum_mean[k] - (int_drift[k] + drift[k] * tau)
    centered_raw = sum_var[k] - s2 * (int_x[k] + xc[k] * tau)
    uncentered_raw = sum_second[k] - s2 * (int_x[k] + xc[k] * tau)

    drift_closed = drift[k] * tau
    centered_closed = s2 * xc[k] * tau
    drift_err = float(np.max(np.abs(np.abs(drift_raw) - np.abs(drift_closed))))
    quad_err = float(np.max(np.abs(np.abs(centered_raw) - centered_closed)))

    return ConditionReport(
        max_increment=float(np.max(np.abs(scheme.increments))),
        drift_residual_sup=float(np.max(np.abs(drift_raw))),
        quad_residual_sup_centered=float(np.max(np.abs(centered_raw))),
        quad_residual_sup_uncentered=float(np.max(np.abs(uncentered_raw))),
        bounds=theoretical_bounds(params, C, grid),
        drift_identity_error=drift_err,
        quad_identity_error=quad_err,
    )


def exact_residual_sups(scheme: SchemePath, params: CirParams, C=None) -> tuple[float, float]:
    """sup over all of [0, T] of the drift and centered residuals.

    Both are linear in t on each step and vanish at its left end, so the
    sup is the left limit at the next grid point.
    """
    xc, _ = _capped(scheme, C)
    h = scheme.grid.dt
    return (float(np.max(np.abs(params.b - xc[:-1]))) * h,
            float(np.max(params.sigma ** 2 * xc[:-1])) * h)


def midpoints(grid) -> np.ndarray:
    return (np.arange(grid.n) + 0.5) * grid.T / grid.n


def condition_i_statistic(schemes, params: CirParams, C) -> StatReport:
    """Largest |Q_k| over a batch, against the deterministic increment bound."""
    schemes = list(schemes)
    if not schemes:
        raise ValueError("empty batch")
    grid = schemes[0].grid
    if any(s.grid != grid for s in schemes):
        raise GridMismatch("batch mixes grids")
    stat = max(float(np.max(np.abs(s.increments))) for s in schemes)
    bound = theoretical_bounds(params, C, grid).increment_bound
    return StatReport(len(schemes), stat, bound)


def conditions_ii_iii_sums(scheme: SchemePath, params: CirParams, C=None) -> ConditionSums:
    """Sums of E(Q^2|F) and |E(Q|F)| over the whole horizon with their explicit bounds."""
    _, Cv = _capped(scheme, C)
    mean, second = conditional_moments(scheme, params, Cv)
    bounds = theoretical_bounds(params, Cv, scheme.grid)
    return ConditionSums(
        sum_sq=float(np.sum(second)),
        sum_abs_mean=float(np.sum(np.abs(mean))),
        sum_sq_bound=bounds.c2 ** 2,
        sum_abs_mean_bound=(abs(params.b) + Cv) * scheme.grid.T,
    )
