"""Cox-Ingersoll-Ross process, Rademacher Euler schemes and Monte Carlo checks.

Modules
-------
model       : parameters, closed-form moments, exact marginal law
truncated   : truncated coefficients, scale function, exit probabilities
paths       : exact transition sampler, Gaussian Euler, path functionals
schemes     : additive Rademacher schemes, positivity, a-priori bounds
prices      : multiplicative price processes and their limits
conditions  : per-path residuals of the convergence conditions
stats       : noncentral chi-square CDF, KS/DKW and moment tests
experiments : convergence, truncation-sandwich, price and exit experiments
results, config, cli : result tables, experiment files, command line
"""
from .errors import *  # noqa: F401,F403
from .model import (CirParams, MomentBounds, NoncentralChiSqSpec, marginal_law, mean_at,
                    second_moment_at, second_moment_sup, validate_params, variance_at)
from .truncated import (HittingProbabilities, ScaleFunctionEval, TruncationLevel, hitting_probability,
                        scale_density, scale_function, truncated_diffusion, truncated_drift,
                        truncation_level)
from .streams import Rng, subseed
from .schemes import (Agreement, GridSpec, NoiseSequence, SchemePath, StepPath, TheoreticalBounds,
                      additive_scheme, agreement_check, positivity_precondition, rademacher_noise,
                      step_eval, theoretical_bounds, truncated_scheme)
from .paths import (ContinuousPath, ExitResult, euler_first_exit, euler_truncated_path, exact_cir_path,
                    first_exit, sample_gamma, sample_marginal, time_integral)
from .prices import PricePath, corrected_product_price, exponential_price, limit_price, product_price
from .conditions import (ConditionReport, condition_i_statistic, condition_residuals,
                         conditions_ii_iii_sums)
from .stats import StatReport, ks_test, ks_two_sample, noncentral_chisq_cdf
from .config import ExperimentConfig, make_config
from .results import ResultRow, read_results, write_results
from .experiments import (convergence_experiment, hitprob_experiment, price_experiment,
                          truncation_sandwich)

__version__ = "0.1.0"
