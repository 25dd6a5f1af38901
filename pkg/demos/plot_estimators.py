"""
Random-path estimators and their critical ratio
===============================================

Two sequential estimators walk down the rows, pick a column uniformly from
what is still available and multiply the choice counts together.  RM targets
the permanent; AMM also lets each row stay unmatched and targets the number
of all matchings.  Both are unbiased; the interesting quantity is how spread
out they are, measured by ``E(X^2) / E(X)^2``.
"""

import numpy as np

from matchcount.estimator import (
    UndefinedRatioError, critical_ratio_exact, distribution_moments, path_distribution, run_batch,
)
from matchcount.exact import am_dp
from matchcount.matrix import ones, random_matrix

# %%
# Every path of a tiny instance
# -----------------------------
# On the 2 x 2 all-ones matrix AMM returns 9 when the first row is skipped
# and 6 otherwise.  The weighted mean is exactly the matching count, 7.

dist = path_distribution(ones(2, 2), "amm")
print(dist)
print(distribution_moments(dist), am_dp(ones(2, 2)))

# %%
# Exact spread versus simulation
# ------------------------------
# ``run_batch`` keeps exact integer sums, so the sample mean is a rational
# number.  Sample ``i`` always reads the random stream ``(seed, i)``.

rng = np.random.default_rng(3)
a = random_matrix(8, 8, rng)
stats = run_batch(a, "amm", 100_000, seed=42)
exact = am_dp(a)
print(f"exact {exact}  estimate {float(stats.mean):.1f} +- {stats.stderr:.1f}")
print(f"critical ratio: empirical {float(stats.critical_ratio):.4f}, "
      f"exact {float(critical_ratio_exact(a, 'amm')):.4f}, bound {9**8}")

# %%
# Worker count does not change the answer
# ---------------------------------------
# Samples are split into contiguous blocks, so any number of processes
# produces the same sums.

print(run_batch(a, "amm", 20_000, seed=7, workers=1) == run_batch(a, "amm", 20_000, seed=7, workers=2))

# %%
# RM on a matrix with few perfect matchings
# -----------------------------------------
# Paths that run out of columns contribute 0, which inflates the ratio.

for p in (0.9, 0.6, 0.4):
    b = random_matrix(8, 8, rng, p=p)
    try:
        print(p, "RM", f"{float(critical_ratio_exact(b, 'rm')):.3f}", "AMM", f"{float(critical_ratio_exact(b, 'amm')):.3f}")
    except UndefinedRatioError as exc:
        print(p, "RM undefined:", exc)
