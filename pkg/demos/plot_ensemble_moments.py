"""
Averages over random matrices
=============================

Averaged over every ``m x n`` 0-1 matrix, both the matching count and the
AMM second moment have exact rational closed forms.  We check them against
brute force, then look at a peak-term bracket on the mean.
"""

from fractions import Fraction

from matchcount import closed_forms as cf
from matchcount.ensembles import EnsembleSpec, empirical_expectation
from matchcount.estimator import exact_second_moment
from matchcount.exact import am_dp

# %%
# Closed forms against enumeration
# --------------------------------

print("m n  mean  closed  second  closed")
for m, n in [(1, 1), (1, 3), (2, 2), (2, 3), (3, 3)]:
    spec = EnsembleSpec.exhaustive(m, n)
    mean = empirical_expectation(spec, am_dp)
    second = empirical_expectation(spec, lambda a: exact_second_moment(a, "amm"))
    print(m, n, mean, cf.t3_mean(m, n), second, cf.t4_second_moment(m, n))

# %%
# A sampled estimate for a size too big to enumerate
# --------------------------------------------------

res = empirical_expectation(EnsembleSpec.bernoulli(8, 8), am_dp, mode="sampled", n_samples=2000, seed=1)
print(f"sampled {res.mean:.1f} +- {res.stderr:.1f}, closed form {float(cf.t3_mean(8, 8)):.1f}")

# %%
# Bracketing the mean by its largest term
# ---------------------------------------
# The mean is a sum of ``n + 1`` terms; the largest one, ``h``, bounds it
# below, and ``(n + 1) h`` bounds it above.  ``n h`` is too small at
# ``n = 1``.

print("n k* mean/h  mean<=n*h")
for n in (1, 2, 5, 10, 20, 40):
    b = cf.t5_bounds(n)
    print(n, b.k_star, f"{float(b.mean / b.h):.3f}", b.upper_paper_holds)

# %%
# Graphs with a fixed number of edges
# -----------------------------------

print(cf.lemma2_mean(2, 2), empirical_expectation(EnsembleSpec.fixed_ones(2, 2, 2), am_dp))
print([str(x) for x in cf.t8_moments(5, 3)])
print(Fraction(cf.t7_tail(3, Fraction(1, 100))))
