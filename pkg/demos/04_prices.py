"""
Products of one-plus-increments
===============================

Multiplying the factors 1 + Q_k of the Rademacher scheme gives a price
path.  Its terminal log-mean is compared with exp(X_T - sigma^2/2 int X) on
exact CIR paths.
"""
# %%
from cirlab import make_config
from cirlab.experiments import price_experiment

config = make_config(n_values=(32, 128), path_count=20_000, n_ref=1024, ref_path_count=5_000, master_seed=5)
for r in price_experiment(config):
    bound = "" if r.bound is None else f"  bound {r.bound:.4f}"
    print(f"{r.metric:<20} n={r.n!s:<5} {r.value:.5f}{bound}  {r.decision}")
