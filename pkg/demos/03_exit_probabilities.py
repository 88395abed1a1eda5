"""
Which side of an interval is hit first
======================================

For the truncated process the scale function is an integral we can
evaluate, so P(hit alpha before beta) has a formula.  A fine Gaussian Euler
chain gives an independent Monte Carlo estimate.
"""
# %%
import numpy as np

from cirlab import CirParams, hitting_probability, scale_function
from cirlab.paths import exit_sides

params = CirParams(b=1.0, sigma=1.0, x0=1.0)
C, alpha, beta = 5.0, 0.5, 2.0

# %%
# The scale function runs to minus infinity at zero, which is why the
# process never reaches it.
for k in range(2, 9, 2):
    print(f"V(1e-{k}) = {scale_function(10.0 ** -k, params, C).value:.3f}")

# %%
p = hitting_probability(params, C, alpha, beta).p_alpha_first
sides = exit_sides(params, C, alpha, beta, max_time=50.0, dt=1e-3, master_seed=11, start=0, stop=4000)
freq = np.mean(sides == 0)
se = np.sqrt(p * (1 - p) / sides.size)
print(f"formula {p:.4f}   Monte Carlo {freq:.4f} +- {se:.4f}")

# %%
# Step-size sensitivity of the Euler oracle, with and without the
# Brownian-bridge test for crossings between grid points.  Both barriers
# are missed at a similar rate, so this probability moves little with the
# step.
n_runs = 20_000
print(f"formula {p:.4f}, one SE at {n_runs} runs = {np.sqrt(p * (1 - p) / n_runs):.4f}")
for dt in (1e-1, 1e-2, 1e-3):
    for bridge in (False, True):
        s = exit_sides(params, C, alpha, beta, 50.0, dt, 12, 0, n_runs, bridge=bridge)
        print(f"dt={dt:<6g} bridge={bridge!s:<5}  freq={np.mean(s == 0):.4f}")
