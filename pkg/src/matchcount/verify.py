"""Cross-module invariant suite behind ``matchcount verify``.

Each check returns a :class:`CheckResult`; a failing check carries the first
witness (usually a matrix in text form) that violated it.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import closed_forms as cf
from . import exact, estimator
from .ensembles import EnsembleSpec, enumerate_matrices
from .matrix import ZeroOneMatrix, extend_transform, random_matrix, to_text
from .oracles import binomial_tail_direct, brute_fit_count

LEVELS = {
    # exhaustive size, random 5x5 extension count, random 6x6 ratio-bound count, closed-form n
    "quick": dict(max_n=3, ext_random=50, bound_random=20, cf_max_n=20, lemma1_max_n=4),
    "full": dict(max_n=4, ext_random=1000, bound_random=200, cf_max_n=40, lemma1_max_n=6),
}


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    witness: str | None = None
    seconds: float = 0.0


class _Fail(Exception):
    def __init__(self, detail: str, witness=None):
        super().__init__(detail)
        self.detail = detail
        self.witness = witness


def _require(cond: bool, detail: str, witness=None):
    if not cond:
        if isinstance(witness, ZeroOneMatrix):
            witness = to_text(witness)
        raise _Fail(detail, witness)


def all_matrices(m: int, n: int):
    return enumerate_matrices(EnsembleSpec.exhaustive(m, n))


def shapes(max_n: int, square: bool = False):
    for n in range(max_n + 1):
        for m in ([n] if square else range(n + 1)):
            yield m, n


def check_am_routes(p):
    count = 0
    for m, n in shapes(p["max_n"]):
        for a in all_matrices(m, n):
            rec, vec, dp = exact.am_recursive(a), exact.matching_vector(a), exact.am_dp(a)
            _require(rec == vec.total == dp,
                     f"AM routes disagree: recursive {rec}, vector sum {vec.total}, dp {dp}", a)
            count += 1
    return f"{count} matrices"


def check_permanent_vs_vector(p):
    count = 0
    for _, n in shapes(p["max_n"], square=True):
        for a in all_matrices(n, n):
            _require(exact.permanent(a) == exact.matching_vector(a)[n], "per != perfect matchings", a)
            count += 1
    return f"{count} matrices"


def check_extension_identity(p):
    count = 0
    for _, n in shapes(3, square=True):
        for a in all_matrices(n, n):
            _require(exact.verify_corollary3(a).holds, "n! AM(A) != per(extended)", a)
            count += 1
    rng = np.random.default_rng(20240501)
    for _ in range(p["ext_random"]):
        a = random_matrix(5, 5, rng)
        _require(exact.verify_corollary3(a).holds, "n! AM(A) != per(extended)", a)
        count += 1
    return f"{count} matrices"


def check_unbiased_and_second_moment(p):
    count = 0
    for m, n in shapes(p["max_n"]):
        for a in all_matrices(m, n):
            for alg in ("amm", "rm") if m == n else ("amm",):
                mean, second = estimator.distribution_moments(estimator.path_distribution(a, alg))
                _require(mean == estimator.exact_mean(a, alg), f"{alg} path mean {mean} != exact", a)
                _require(second == estimator.exact_second_moment(a, alg), f"{alg} second moment mismatch", a)
                count += 1
    return f"{count} (matrix, algorithm) pairs"


def check_extended_rm(p):
    count = 0
    for _, n in shapes(min(3, p["max_n"]), square=True):
        nf = math.factorial(n)
        for a in all_matrices(n, n):
            rm = estimator.path_distribution(extend_transform(a), "rm")
            scaled: dict[Fraction, Fraction] = {}
            for v, pr in rm.items():
                scaled[Fraction(v, nf)] = scaled.get(Fraction(v, nf), 0) + pr
            amm = {Fraction(v): pr for v, pr in estimator.path_distribution(a, "amm").items()}
            _require(scaled == amm, "RM(extended)/n! and AMM(A) distributions differ", a)
            count += 1
    return f"{count} matrices"


def check_ratio_bound(p):
    count = 0
    for m, n in shapes(p["max_n"]):
        for a in all_matrices(m, n):
            _require(estimator.critical_ratio_exact(a, "amm") <= (n + 1) ** m, "critical ratio above (n+1)^m", a)
            count += 1
    rng = np.random.default_rng(20240502)
    for _ in range(p["bound_random"]):
        a = random_matrix(6, 6, rng)
        _require(estimator.critical_ratio_exact(a, "amm") <= 7**6, "critical ratio above 7^6", a)
        count += 1
    return f"{count} matrices"


def check_fit_count(p):
    for n in range(7):
        for q in range(n + 1):
            _require(exact.fit_count(n, q) == brute_fit_count(n, q), f"F_{n}({q}) mismatch")
    return "n <= 6"


def check_recursion_table(p):
    N = p["lemma1_max_n"]
    for plan in (cf.MEAN_PLAN, cf.SECOND_MOMENT_PLAN):
        for m, n in shapes(N):
            _require(cf.lemma1_eval(m, n, plan) == cf.lemma1_composition_sum(m, n, plan),
                     f"recursion table != composition sum at m={m}, n={n}")
    return f"m <= n <= {N}"


def check_ensemble_moments(p):
    for m, n in shapes(3):
        mats = list(all_matrices(m, n))
        am = Fraction(sum(exact.am_dp(a) for a in mats), len(mats))
        x2 = Fraction(sum(estimator.exact_second_moment(a, "amm") for a in mats), len(mats))
        _require(am == cf.t3_mean(m, n), f"t3_mean({m},{n}) != exhaustive {am}")
        _require(x2 == cf.t4_second_moment(m, n), f"t4_second_moment({m},{n}) != exhaustive {x2}")
    return "m <= n <= 3"


def check_peak_bounds(p):
    for n in range(1, p["cf_max_n"] + 1):
        b = cf.t5_bounds(n)
        _require(b.lower_holds and b.upper_rigorous_holds, f"peak bounds fail at n={n}")
    return f"1 <= n <= {p['cf_max_n']}"


def check_ratio_growth(p):
    prev = None
    for n in range(1, p["cf_max_n"] + 1):
        r = cf.t6_ratio(n).ratio
        _require(r >= 1, f"ratio < 1 at n={n}")
        _require(prev is None or r >= prev, f"ratio decreases at n={n}")
        prev = r
    return f"1 <= n <= {p['cf_max_n']}"


def check_fixed_edge_moments(p):
    for n in range(4):
        for me in range(n * n + 1):
            vals = [exact.am_dp(a) for a in enumerate_matrices(EnsembleSpec.fixed_ones(me, n, n))]
            mean = Fraction(sum(vals), len(vals))
            second = Fraction(sum(v * v for v in vals), len(vals))
            _require((mean, second) == cf.t8_moments(me, n), f"t8_moments({me},{n}) mismatch")
            _require(cf.lemma2_mean(me, n) == mean, f"lemma2_mean({me},{n}) mismatch")
            _require(cf.lemma2_ratio(me, n) >= 1, f"lemma2_ratio({me},{n}) < 1")
    return "n <= 3, all edge counts"


def check_binomial_tail(p):
    for n in range(7):
        for eps in (Fraction(0), Fraction(1, 100), Fraction(2, 100)):
            _require(cf.t7_tail(n, eps) == binomial_tail_direct(n, eps), f"t7_tail({n}, {eps}) mismatch")
    return "n <= 6"


def check_batch_determinism(p):
    a = random_matrix(6, 6, np.random.default_rng(7))
    ref = estimator.run_batch(a, "amm", 5000, 99)
    again = estimator.run_batch(a, "amm", 5000, 99)
    _require(ref == again, "run_batch not reproducible", a)
    return "seed 99, 5000 samples"


CHECKS = [
    ("am_dp = am_recursive = sum of matching vector", check_am_routes),
    ("permanent = perfect-matching count", check_permanent_vs_vector),
    ("n! AM(A) = per([[A, I], [J, J]])", check_extension_identity),
    ("estimator unbiased; E X^2 recursion = path enumeration", check_unbiased_and_second_moment),
    ("RM on extended matrix / n! ~ AMM", check_extended_rm),
    ("AMM critical ratio <= (n+1)^m", check_ratio_bound),
    ("fit count = brute force", check_fit_count),
    ("two-index recursion = composition sum", check_recursion_table),
    ("ensemble mean / second moment closed forms", check_ensemble_moments),
    ("peak-term bounds h <= E <= (n+1) h", check_peak_bounds),
    ("second-moment ratio >= 1 and nondecreasing", check_ratio_growth),
    ("fixed-edge-count moments = exhaustive", check_fixed_edge_moments),
    ("binomial tail = direct summation", check_binomial_tail),
    ("batch sampling reproducible", check_batch_determinism),
]


def run_checks(level: str = "quick", names: list[str] | None = None) -> list[CheckResult]:
    if level not in LEVELS:
        raise ValueError(f"unknown level {level!r}; expected one of {sorted(LEVELS)}")
    params = LEVELS[level]
    results = []
    for name, fn in CHECKS:
        if names and name not in names:
            continue
        t0 = time.perf_counter()
        try:
            detail = fn(params)
            res = CheckResult(name, True, detail)
        except _Fail as exc:
            res = CheckResult(name, False, exc.detail, exc.witness)
        res.seconds = time.perf_counter() - t0
        results.append(res)
    return results
