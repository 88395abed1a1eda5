"""Noncentral chi-square CDF and finite-sample distribution tests."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import special

from .errors import SeriesNotConverged
from .model import NoncentralChiSqSpec

POISSON_TAIL = 1e-14


@dataclass(frozen=True)
class StatReport:
    sample_size: int
    statistic: float
    threshold: float
    standard_error: float | None = None

    @property
    def decision(self) -> str:
        return "consistent" if self.statistic <= self.threshold else "rejected"


def _poisson_window(mu: float):
    """Index range [lo, hi] holding all but POISSON_TAIL of Poisson(mu) mass."""
    if mu == 0:
        return 0, 0
    spread = 12.0 * math.sqrt(mu) + 40.0
    lo = max(0, int(math.floor(mu - spread)))
    hi = int(math.ceil(mu + spread))
    for _ in range(60):
        outside = special.pdtr(lo - 1, mu) if lo > 0 else 0.0
        outside += special.pdtrc(hi, mu)
        if outside < POISSON_TAIL:
            return lo, hi
        lo = max(0, lo - int(spread))
        hi += int(spread)
    raise SeriesNotConverged(f"Poisson({mu}) tail did not fall below {POISSON_TAIL}")


def noncentral_chisq_cdf(spec: NoncentralChiSqSpec, x, chunk: int = 8192):
    """P(scale * chi2'(df, lam) <= x) as a Poisson mixture of regularised gammas.

    The series keeps the Poisson(lam/2) weights whose complement is below
    1e-14.
    """
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    mu = 0.5 * spec.noncentrality
    lo, hi = _poisson_window(mu)
    j = np.arange(lo, hi + 1, dtype=float)
    if mu == 0:
        weights = np.ones(1)
    else:
        weights = np.exp(j * math.log(mu) - mu - special.gammaln(j + 1.0))
    if not np.all(np.isfinite(weights)):
        raise SeriesNotConverged("non-finite Poisson weights")
    shapes = 0.5 * spec.df + j
    z = np.clip(x_arr / spec.scale, 0.0, None) * 0.5
    out = np.empty_like(z)
    for s in range(0, z.size, chunk):
        zz = z[s:s + chunk]
        out[s:s + chunk] = special.gammainc(shapes[:, None], zz[None, :]).T @ weights
    out = np.clip(out, 0.0, 1.0)
    out[x_arr <= 0] = 0.0
    return float(out[0]) if np.ndim(x) == 0 else out


def dkw_threshold(n: int, confidence: float = 0.999) -> float:
    """epsilon with P(sup |F_n - F| > epsilon) <= 1 - confidence."""
    delta = 1.0 - confidence
    return math.sqrt(math.log(2.0 / delta) / (2.0 * n))


def ks_statistic(sample, cdf: Callable, cdf_left: Callable | None = None) -> float:
    """Exact sup |F_n - F|.  ``cdf_left`` gives F(x-) when F has atoms."""
    x = np.sort(np.asarray(sample, dtype=float))
    n = x.size
    if n == 0:
        raise ValueError("sample is empty")
    f = np.asarray(cdf(x), dtype=float)
    f_left = f if cdf_left is None else np.asarray(cdf_left(x), dtype=float)
    # ties: the ECDF jumps to the last index of each run of equal values
    last = np.searchsorted(x, x, side="right")
    first = np.searchsorted(x, x, side="left")
    upper = np.max(last / n - f)
    lower = np.max(f_left - first / n)
    return float(max(upper, lower, 0.0))


def ks_test(sample, cdf: Callable, confidence: float = 0.999, cdf_left: Callable | None = None) -> StatReport:
    n = np.asarray(sample).size
    return StatReport(n, ks_statistic(sample, cdf, cdf_left), dkw_threshold(n, confidence))


def ks_two_sample_statistic(a, b) -> float:
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    pts = np.concatenate([a, b])
    fa = np.searchsorted(a, pts, side="right") / a.size
    fb = np.searchsorted(b, pts, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def ks_two_sample(a, b, confidence: float = 0.999) -> StatReport:
    """Two-sample KS with a DKW threshold split evenly between the samples."""
    na, nb = np.asarray(a).size, np.asarray(b).size
    if na == 0 or nb == 0:
        raise ValueError("samples must be nonempty")
    delta = 1.0 - confidence
    threshold = dkw_threshold(na, 1.0 - delta / 2) + dkw_threshold(nb, 1.0 - delta / 2)
    return StatReport(na + nb, ks_two_sample_statistic(a, b), threshold)


def mean_test(sample, expected: float, n_se: float = 4.0, allowance: float = 0.0) -> StatReport:
    """|mean - expected| against ``n_se`` standard errors plus a bias allowance."""
    x = np.asarray(sample, dtype=float)
    se = float(np.std(x, ddof=1) / math.sqrt(x.size)) if x.size > 1 else 0.0
    return StatReport(x.size, abs(float(np.mean(x)) - expected), n_se * se + allowance, se)


def two_mean_test(a, b, n_se: float = 4.0, allowance: float = 0.0) -> StatReport:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    se = math.sqrt(np.var(a, ddof=1) / a.size + np.var(b, ddof=1) / b.size)
    return StatReport(a.size + b.size, abs(float(a.mean() - b.mean())), n_se * se + allowance, se)


def frequency_se(p: float, n: int) -> float:
    return math.sqrt(max(p * (1.0 - p), 0.0) / n)
