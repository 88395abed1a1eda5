"""Monte Carlo experiments producing :class:`ResultRow` tables.

Rows marked ``info`` document a ladder; rows with a decision are the
checks an experiment stands or falls by.
"""
from __future__ import annotations

from functools import partial

import numpy as np

from .config import ExperimentConfig
from .errors import ConfigInvalid
from .model import CirParams, marginal_law, mean_at, second_moment_at, variance_at
from .parallel import map_blocks
from .paths import exact_cir_paths, exit_sides
from .prices import log_limit_price, log_product
from .results import ResultRow, checked_row
from .schemes import GridSpec, rademacher_noise_batch, scheme_values, theoretical_bounds
from .stats import frequency_se, ks_test, ks_two_sample, mean_test, noncentral_chisq_cdf, two_mean_test
from .streams import subseed
from .truncated import hitting_probability

# experiment tags mixed into per-cell seeds
_CONVERGE, _SANDWICH, _PRICE, _PRICE_REF, _HITPROB = 1, 2, 3, 4, 5


def nonincreasing_violations(values, slack=0.0) -> int:
    return sum(1 for a, b in zip(values, values[1:]) if b > a + slack)


# --- block kernels (module level so that worker processes can unpickle them) ---

def _scheme_block(params, grid, seed, start, stop):
    return scheme_values(params, grid, rademacher_noise_batch(grid, seed, start, stop))


def _step_values_block(params, grid, times, seed, start, stop):
    values = _scheme_block(params, grid, seed, start, stop)
    return values[:, grid.index_of(np.asarray(times))]


def _sandwich_block(params, grid, C_values, epsilon, seed, start, stop):
    noise = rademacher_noise_batch(grid, seed, start, stop)
    full = scheme_values(params, grid, noise)
    disagree = np.empty((stop - start, len(C_values)), dtype=bool)
    gap = np.empty_like(disagree)
    for j, C in enumerate(C_values):
        trunc = scheme_values(params, grid, noise, C)
        diff = np.abs(full - trunc)
        disagree[:, j] = np.any(full != trunc, axis=1)
        gap[:, j] = np.max(diff, axis=1) >= epsilon
    return disagree, gap


def _scheme_log_price_block(params, grid, seed, start, stop):
    values = _scheme_block(params, grid, seed, start, stop)
    return log_product(params.x0, np.diff(values, axis=1))[:, -1]


def _reference_log_price_block(params, grid, seed, start, stop):
    values = exact_cir_paths(params, grid, seed, start, stop)
    return log_limit_price(values, grid.dt, params.sigma)[:, -1]


def _exit_block(params, C, alpha, beta, max_time, dt, seed, start, stop):
    return exit_sides(params, C, alpha, beta, max_time, dt, seed, start, stop)


# --- experiments -------------------------------------------------------------

def terminal_samples(config: ExperimentConfig, n: int, times=None) -> np.ndarray:
    """Step-process values of the additive scheme at ``times``, one row per path."""
    grid = GridSpec(config.T, n)
    times = tuple(times or config.times)
    fn = partial(_step_values_block, config.params, grid, times, subseed(config.master_seed, _CONVERGE, n))
    return map_blocks(fn, config.path_count, config.workers)


def _law_test(params: CirParams, t, sample, confidence):
    if params.sigma == 0:
        m = mean_at(params, t)
        tol = 1e-12 * max(1.0, abs(m))
        return ks_test(sample, lambda x: (x >= m - tol).astype(float), confidence,
                       cdf_left=lambda x: (x > m + tol).astype(float))
    spec = marginal_law(params, t)
    return ks_test(sample, lambda x: noncentral_chisq_cdf(spec, x), confidence)


def convergence_experiment(config: ExperimentConfig) -> list[ResultRow]:
    """KS distance and moment gaps of X_t^{(n)} against the exact law, along the n ladder.

    Gated rows: the KS trend over n (at most one increase) and the moment
    tests at the largest n.
    """
    config.validate()
    params = config.params
    n_values = sorted(config.n_values)
    rows = []
    ks_by_time = {t: [] for t in config.times}
    for n in n_values:
        samples = terminal_samples(config, n)
        final = n == n_values[-1]
        for j, t in enumerate(config.times):
            x = samples[:, j]
            rep = _law_test(params, t, x, config.confidence)
            ks_by_time[t].append(rep.statistic)
            rows.append(ResultRow("converge", n, None, t, "ks", rep.statistic, rep.threshold, "info"))
            for metric, data, exact in (("mean", x, mean_at(params, t)),
                                        ("second_moment", x * x, second_moment_at(params, t))):
                mt = mean_test(data, exact, config.n_se)
                if final:
                    rows.append(checked_row("converge", n, None, t, f"{metric}_gap", mt.statistic, mt.threshold))
                else:
                    rows.append(ResultRow("converge", n, None, t, f"{metric}_gap", mt.statistic, mt.threshold, "info"))
    for t, series in ks_by_time.items():
        rows.append(checked_row("converge", None, None, t, "ks_increases",
                                nonincreasing_violations(series), 1))
    return rows


def truncation_sandwich(config: ExperimentConfig) -> list[ResultRow]:
    """Frequency of X^{(n)} != X^{(n,C)} per (C, n) cell against the disagreement bound.

    The full and truncated schemes share noise; all C in a row of the
    table reuse the same paths, so frequencies are monotone in C.
    """
    config.validate()
    params = config.params
    C_values = tuple(sorted(config.C_values))
    rows = []
    for n in config.n_values:
        grid = GridSpec(config.T, n)
        fn = partial(_sandwich_block, params, grid, C_values, config.epsilon,
                     subseed(config.master_seed, _SANDWICH, n))
        disagree, gap = map_blocks(fn, config.path_count, config.workers)
        freqs = disagree.mean(axis=0)
        for j, C in enumerate(C_values):
            bound = theoretical_bounds(params, C, grid).disagreement_bound
            f = float(freqs[j])
            rows.append(checked_row("sandwich", n, C, config.T, "disagreement_freq", f, bound))
            rows.append(ResultRow("sandwich", n, C, config.T, "disagreement_se",
                                  frequency_se(f, config.path_count)))
            rows.append(ResultRow("sandwich", n, C, config.T, "sup_gap_freq", float(gap[:, j].mean()),
                                  config.epsilon))
        rows.append(checked_row("sandwich", n, None, config.T, "freq_increases_in_C",
                                nonincreasing_violations(list(freqs)), 0))
    return rows


def price_samples(config: ExperimentConfig, n: int) -> np.ndarray:
    grid = GridSpec(config.T, n)
    fn = partial(_scheme_log_price_block, config.params, grid, subseed(config.master_seed, _PRICE, n))
    return map_blocks(fn, config.path_count, config.workers)


def reference_price_samples(config: ExperimentConfig) -> np.ndarray:
    grid = GridSpec(config.T, config.n_ref)
    fn = partial(_reference_log_price_block, config.params, grid,
                 subseed(config.master_seed, _PRICE_REF, config.n_ref))
    return map_blocks(fn, config.ref_path_count, config.workers, block_size=512)


def price_experiment(config: ExperimentConfig, reference: np.ndarray | None = None) -> list[ResultRow]:
    """Terminal log-prices of the product scheme against exp(X_T - sigma^2/2 int X) on exact paths.

    Gate per n: |mean gap| <= n_se * SE + price_bias_constant * T / n.
    """
    config.validate()
    ref = reference_price_samples(config) if reference is None else reference
    rows = [ResultRow("price", config.n_ref, None, config.T, "reference_log_mean", float(np.mean(ref)))]
    for n in sorted(config.n_values):
        logs = price_samples(config, n)
        allowance = config.price_bias_constant * config.T / n
        mt = two_mean_test(logs, ref, config.n_se, allowance)
        rows.append(ResultRow("price", n, None, config.T, "log_mean", float(np.mean(logs))))
        rows.append(checked_row("price", n, None, config.T, "log_mean_gap", mt.statistic, mt.threshold))
        ks = ks_two_sample(logs, ref, config.confidence)
        rows.append(ResultRow("price", n, None, config.T, "ks2", ks.statistic, ks.threshold, "info"))
    return rows


def hitprob_experiment(config: ExperimentConfig) -> list[ResultRow]:
    """First-exit frequencies of the fine truncated Euler chain against the scale-function formula.

    Uses the smallest C of the config.  Gate: |freq - p| <= 3 SE.
    """
    config.validate().check_exit_interval()
    params = config.params
    C = min(config.C_values)
    probs = hitting_probability(params, C, config.alpha, config.beta)
    fn = partial(_exit_block, params, C, config.alpha, config.beta, config.max_time, config.exit_dt,
                 subseed(config.master_seed, _HITPROB))
    sides = map_blocks(fn, config.path_count, config.workers)
    freq = float(np.mean(sides == 0))
    se = frequency_se(probs.p_alpha_first, config.path_count)
    return [
        ResultRow("hitprob", None, C, None, "p_alpha_first_formula", probs.p_alpha_first),
        ResultRow("hitprob", None, C, None, "p_alpha_first_mc", freq),
        checked_row("hitprob", None, C, None, "p_alpha_first_gap", abs(freq - probs.p_alpha_first), 3.0 * se),
        ResultRow("hitprob", None, C, None, "exit_none_freq", float(np.mean(sides == -1))),
    ]


def moments_table(params: CirParams, times) -> list[ResultRow]:
    rows = []
    for t in times:
        if t < 0:
            raise ConfigInvalid(f"t={t} must be nonnegative")
        rows.append(ResultRow("moments", None, None, t, "mean", mean_at(params, t)))
        rows.append(ResultRow("moments", None, None, t, "second_moment", second_moment_at(params, t)))
        rows.append(ResultRow("moments", None, None, t, "variance", variance_at(params, t)))
    return rows


def bounds_table(params: CirParams, C: float, grid: GridSpec) -> list[ResultRow]:
    b = theoretical_bounds(params, C, grid)
    return [ResultRow("bounds", grid.n, C, grid.T, name, float(getattr(b, name)))
            for name in ("gamma", "increment_bound", "disagreement_bound", "drift_residual_bound",
                         "quad_residual_bound", "centered_quad_bound", "c2")]


def run(name: str, config: ExperimentConfig) -> list[ResultRow]:
    table = {
        "converge": convergence_experiment,
        "sandwich": truncation_sandwich,
        "price": price_experiment,
        "hitprob": hitprob_experiment,
    }
    if name not in table:
        raise ConfigInvalid(f"unknown experiment {name!r}")
    return table[name](config)


__all__ = [
    "bounds_table", "convergence_experiment", "hitprob_experiment", "moments_table",
    "price_experiment", "run", "terminal_samples", "truncation_sandwich",
]
