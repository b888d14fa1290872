"""Growing a linear cluster chain with a probabilistic ZZ gate.

Run with ``python3 demos/03_cluster_growth.py``.
"""
# %%
import numpy as np

from freqgate.cluster import (GrowthPolicy, critical_length, expected_merged_length,
                              grow_chain_monte_carlo, make_chain, merge_chains,
                              merge_round_statistics)

# %% [markdown]
# Measuring ZZ on the boundary qubits of two chains joins them.

# %%
a, b = make_chain(3), make_chain(3)
merged = merge_chains(a, b)
print("physical qubits", merged.n_physical, "logical sites", merged.length)
for g in merged.tableau.generators():
    print(" ", g)

# %% [markdown]
# A failed attempt eats two sites per chain.  The expected merged length is
# close to 2n - n_c, so chains shorter than n_c shrink on average.

# %%
for p in (0.1, 0.3, 0.5, 0.9):
    m = expected_merged_length(50, p)
    print(f"p_s={p}: n_c={critical_length(p):6.2f}  exact {m.exact:8.3f}  2n-n_c {m.approx:8.3f}")

rng = np.random.default_rng(11)
stats = merge_round_statistics(50, 0.5, 100_000, rng)
print(f"Monte Carlo at p_s=0.5: {stats.empirical_mean:.3f} +- {stats.empirical_stderr:.3f}")

# %% [markdown]
# Cost of growing a long chain from short seeds.

# %%
for p in (0.9, 0.7, 0.5):
    policy = GrowthPolicy(p_s=p, seed_length=12)
    s = grow_chain_monte_carlo(100, policy, rng, 200)
    if s.non_growing:
        print(f"p_s={p}: non-growing")
    else:
        print(f"p_s={p}: {s.mean_attempts:.1f} gate attempts, "
              f"{s.mean_qubit_operations:.0f} qubit operations")
