"""
How fast does the AMM second-moment ratio grow?
===============================================

Over uniform ``n x n`` matrices, the ratio of the averaged AMM second moment
to the squared averaged mean is an exact rational for every ``n``.  We
tabulate it next to the reference curve ``n ** (sqrt(n) / 2)``, then look at
the same ratio for graphs with a fixed edge density.
"""

import math
from fractions import Fraction

from matchcount import closed_forms as cf

# %%
# Exact ratios up to n = 40
# -------------------------
# The comparison with the curve uses an outward-rounded enclosure of the
# threshold, so rounding cannot flip a verdict.

print("  n        ratio      threshold holds")
for n in list(range(1, 11)) + [16, 25, 36, 40]:
    r = cf.t6_ratio(n)
    print(f"{n:3d} {float(r.ratio):12.6g} {r.threshold:14.6g} {r.holds}")

# %%
# Fixed edge density
# ------------------
# With ``ceil(0.52 n^2)`` edges the ratio stays close to 1, but it does not
# decrease monotonically at these sizes.

for n in range(4, 11):
    m_edges = math.ceil(Fraction(52, 100) * n * n)
    print(n, m_edges, f"{float(cf.lemma2_ratio(m_edges, n)):.6f}")
