"""
Counting every matching exactly
===============================

A 0-1 matrix with ``m <= n`` rows is the biadjacency matrix of a bipartite
graph.  Here we count all of its matchings, the empty one included, in two
independent ways and relate the total to a permanent.
"""

import math

import numpy as np

from matchcount.exact import am_dp, am_recursive, matching_vector, permanent, verify_corollary3
from matchcount.matrix import make_matrix, ones, random_matrix, to_text

# %%
# A small example
# ---------------
# The complete bipartite graph on 2 + 2 vertices has one empty matching,
# four single edges and two perfect matchings.

k22 = ones(2, 2)
print(matching_vector(k22).counts, am_dp(k22), am_recursive(k22))

# %%
# The subset DP against first-row expansion
# -----------------------------------------
# ``am_recursive`` expands along the first row with no memoisation, so it
# slows down quickly; ``am_dp`` sweeps column subsets and stays exact for
# 24 columns or fewer.

rng = np.random.default_rng(0)
a = random_matrix(7, 9, rng)
print(to_text(a))
print("recursive", am_recursive(a), "dp", am_dp(a))

# %%
# Large counts stay exact
# -----------------------
# For the all-ones matrix the count has the form ``sum_k C(m,k) P(n,k)``.
# At 20 x 20 it no longer fits in 64 bits.

v = am_dp(ones(20, 20))
print(v, v.bit_length(), "bits")
print(v == sum(math.comb(20, k) * math.perm(20, k) for k in range(21)))

# %%
# From all matchings to one permanent
# -----------------------------------
# Append an identity block to the right and two rows of ones below.  The
# permanent of the resulting ``2n x 2n`` matrix is ``n!`` times the
# matching count of the original.

b = make_matrix([[1, 0, 1], [1, 1, 0], [0, 1, 1]])
check = verify_corollary3(b)
print(f"{check.n_factorial} * {check.am} = {check.lhs}, permanent {check.per}, holds {check.holds}")
print("perfect matchings only:", permanent(b), "=", matching_vector(b)[3])
