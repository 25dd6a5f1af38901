"""Rebuild t6_ratio.json: exact second-moment ratios for uniform n x n matrices, n = 1..40.

The table recursion produces the values; for n <= 16 they are also checked
against the explicit composition-sum form before being written.
"""

import json
from pathlib import Path

from matchcount.closed_forms import t3_mean, t4_composition_form, t6_ratio

rows = []
for n in range(1, 41):
    r = t6_ratio(n)
    if n <= 16:
        assert r.numerator == t4_composition_form(n, n)
        assert r.denominator == t3_mean(n, n) ** 2
    rows.append({"n": n, "num": str(r.ratio.numerator), "den": str(r.ratio.denominator),
                 "float": float(r.ratio)})

out = Path(__file__).with_name("t6_ratio.json")
out.write_text(json.dumps(rows, indent=1) + "\n")
print(f"wrote {len(rows)} rows to {out}")
