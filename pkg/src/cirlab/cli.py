"""Command-line driver.

Exit status: 0 when every decided row is consistent, 1 when some row is
rejected, 2 for usage or configuration errors.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np
from scipy import optimize

from .config import ExperimentConfig, make_config
from .errors import CirlabError
from .experiments import bounds_table, moments_table, run
from .model import marginal_law, validate_params
from .results import ResultRow, render_csv, render_json, write_results
from .schemes import GridSpec, additive_scheme, rademacher_noise, truncated_scheme
from .stats import noncentral_chisq_cdf
from .streams import Rng
from .truncated import truncation_level


def _model_args(p):
    p.add_argument("--b", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--x0", type=float)


def _run_args(p):
    p.add_argument("--config", help="INI-style experiment file; flags override it")
    p.add_argument("--T", type=float)
    p.add_argument("--n", dest="n_values", type=int, nargs="+")
    p.add_argument("--C", dest="C_values", type=float, nargs="+")
    p.add_argument("--paths", dest="path_count", type=int)
    p.add_argument("--seed", dest="master_seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--confidence", type=float)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--eval-times", dest="eval_times", type=float, nargs="+")
    p.add_argument("--output", dest="output_path")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cirlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("moments", help="closed-form mean, second moment and variance")
    _model_args(p)
    p.add_argument("--t", type=float, nargs="+", default=[0.0, 0.5, 1.0])
    p.add_argument("--output", dest="output_path")
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("marginal", help="CDF and quantiles of the exact law of X_t")
    _model_args(p)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--x", type=float, nargs="*", default=[])
    p.add_argument("--p", type=float, nargs="*", default=[])
    p.add_argument("--output", dest="output_path")
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("scheme", help="simulate Rademacher scheme paths and dump them")
    _model_args(p)
    _run_args(p)
    p.add_argument("--truncate", type=float, help="simulate the truncated scheme with this C")
    p.add_argument("--count", type=int, default=10, help="number of paths to dump")

    p = sub.add_parser("bounds", help="a-priori bounds for one (C, n) cell")
    _model_args(p)
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--C", type=float, required=True)
    p.add_argument("--output", dest="output_path")
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    for name, help_ in (("hitprob", "exit probabilities: formula vs Monte Carlo"),
                        ("converge", "weak convergence of the additive scheme"),
                        ("sandwich", "truncated vs full scheme disagreement"),
                        ("price", "multiplicative scheme vs limit price")):
        p = sub.add_parser(name, help=help_)
        _model_args(p)
        _run_args(p)
        if name == "hitprob":
            p.add_argument("--alpha", type=float)
            p.add_argument("--beta", type=float)
            p.add_argument("--dt", dest="exit_dt", type=float)
            p.add_argument("--max-time", dest="max_time", type=float)
        if name == "price":
            p.add_argument("--n-ref", dest="n_ref", type=int)
            p.add_argument("--ref-paths", dest="ref_path_count", type=int)
    return parser


_OVERRIDES = ("b", "sigma", "x0", "T", "n_values", "C_values", "path_count", "master_seed", "workers",
              "confidence", "epsilon", "eval_times", "output_path", "alpha", "beta", "exit_dt",
              "max_time", "n_ref", "ref_path_count")


def _config(args):
    overrides = {k: getattr(args, k) for k in _OVERRIDES if hasattr(args, k)}
    return make_config(getattr(args, "config", None), **overrides)


def _params(args):
    defaults = ExperimentConfig().params
    return validate_params(
        b=defaults.b if args.b is None else args.b,
        sigma=defaults.sigma if args.sigma is None else args.sigma,
        x0=defaults.x0 if args.x0 is None else args.x0,
    )


def _rows(args) -> list[ResultRow]:
    cmd = args.command
    if cmd == "moments":
        return moments_table(_params(args), args.t)
    if cmd == "marginal":
        spec = marginal_law(_params(args), args.t)
        rows = [ResultRow("marginal", None, None, args.t, "cdf", noncentral_chisq_cdf(spec, x), x)
                for x in args.x]
        for p in args.p:
            if not 0 < p < 1:
                raise CirlabError(f"probability {p} must lie in (0, 1)")
            hi = spec.mean + 40.0 * np.sqrt(spec.variance)
            q = optimize.brentq(lambda v: noncentral_chisq_cdf(spec, v) - p, 0.0, hi, xtol=1e-14)
            rows.append(ResultRow("marginal", None, None, args.t, "quantile", q, p))
        return rows
    if cmd == "bounds":
        params = _params(args)
        truncation_level(args.C, params)
        return bounds_table(params, args.C, GridSpec(args.T, args.n))
    if cmd == "scheme":
        cfg = _config(args)
        rows = []
        for n in cfg.n_values:
            grid = GridSpec(cfg.T, n)
            times = grid.times()
            for i in range(args.count):
                noise = rademacher_noise(grid, Rng(cfg.master_seed, i))
                if args.truncate is None:
                    values = additive_scheme(cfg.params, grid, noise).values
                else:
                    values = truncated_scheme(cfg.params, args.truncate, grid, noise).values
                rows.extend(ResultRow("scheme", n, args.truncate, float(t), f"path{i}", float(v))
                            for t, v in zip(times, values))
        return rows
    return run(cmd, _config(args))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        rows = _rows(args)
        out = getattr(args, "output_path", None)
        if out:
            write_results(rows, out, args.format)
        else:
            sys.stdout.write(render_csv(rows) if args.format == "csv" else render_json(rows))
    except (CirlabError, ValueError) as exc:
        print(f"cirlab: error: {exc}", file=sys.stderr)
        return 2
    return 1 if any(r.decision == "rejected" for r in rows) else 0


if __name__ == "__main__":
    sys.exit(main())
