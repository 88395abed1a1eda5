"""
The exact law of the CIR process
================================

X_t is a scaled noncentral chi-square variable.  We draw from it with the
Poisson mixture of gammas, check the draws against the series CDF, and
compare sample moments with the closed forms.
"""
# %%
import numpy as np

from cirlab import CirParams, Rng, marginal_law, mean_at, sample_marginal, second_moment_at
from cirlab.stats import dkw_threshold, ks_statistic, noncentral_chisq_cdf

params = CirParams(b=1.0, sigma=1.0, x0=0.5)
spec = marginal_law(params, 1.0)
print(f"df = {spec.df:.3f}, noncentrality = {spec.noncentrality:.4f}, scale = {spec.scale:.4f}")

# %%
# Fifty thousand draws, each from its own reproducible stream position.
x = sample_marginal(params, 1.0, Rng(7), 50_000)
print(f"sample mean   {x.mean():.4f}   exact {mean_at(params, 1.0):.4f}")
print(f"sample E X^2  {np.mean(x * x):.4f}   exact {second_moment_at(params, 1.0):.4f}")

# %%
# The KS distance should sit inside the finite-sample DKW band.
ks = ks_statistic(x, lambda v: noncentral_chisq_cdf(spec, v))
print(f"KS = {ks:.4f}, DKW band at 0.999 = {dkw_threshold(x.size):.4f}")

# %%
# A small table of the closed-form moments along time.
for t in (0.0, 0.25, 1.0, 4.0):
    print(f"t={t:<5} mean={mean_at(params, t):.4f}  E X^2={second_moment_at(params, t):.4f}")
