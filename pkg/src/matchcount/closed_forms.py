"""Exact-rational ensemble moments for the all-matchings estimator.

All results are :class:`fractions.Fraction`.  The two-index recursion

    f(0, l) = 1,    f(m, n) = a_n f(m-1, n) + c_n f(m-1, n-1)

is evaluated by a table (:func:`lemma1_eval`).  Its composition-sum solution
(:func:`lemma1_composition_sum`) is kept only as a cross-check because it
enumerates ``2**m`` terms.
"""

from __future__ import annotations

import itertools
import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping

from mpmath import iv
from mpmath.libmp import to_rational

from .exact import fit_count

# Working precision (bits) of the interval evaluation of n ** (sqrt(n) / 2).
THRESHOLD_PREC = 128
_iv_lock = threading.Lock()


@dataclass(frozen=True)
class CoefficientPlan:
    """Level-indexed coefficients ``a_l`` and ``c_l`` of the recursion."""

    a: Mapping[int, Fraction] | Callable[[int], Fraction]
    c: Mapping[int, Fraction] | Callable[[int], Fraction]

    @staticmethod
    def _get(src, level: int, name: str) -> Fraction:
        if callable(src):
            v = Fraction(src(level))
        else:
            if level not in src:
                raise KeyError(f"coefficient {name}_{level} is missing from the plan")
            v = Fraction(src[level])
        if v <= 0:
            raise ValueError(f"coefficient {name}_{level} = {v} must be positive")
        return v

    def a_at(self, level: int) -> Fraction:
        return self._get(self.a, level, "a")

    def c_at(self, level: int) -> Fraction:
        return self._get(self.c, level, "c")


# E_A over A(m, n, 1/2) of AM:           a_l = 1,         c_l = l / 2
MEAN_PLAN = CoefficientPlan(lambda l: 1, lambda l: Fraction(l, 2))
# E_A over A(m, n, 1/2) of E_sigma(X^2): a_l = (l + 2)/2, c_l = (l^2 + 3l)/4
SECOND_MOMENT_PLAN = CoefficientPlan(lambda l: Fraction(l + 2, 2), lambda l: Fraction(l * l + 3 * l, 4))


def _check_mn(m: int, n: int):
    if m < 0 or n < 0 or m > n:
        raise ValueError(f"need 0 <= m <= n, got m={m}, n={n}")


def lemma1_eval(m: int, n: int, plan: CoefficientPlan) -> Fraction:
    """``f(m, n)`` by filling only the table cells the recursion reaches."""
    _check_mn(m, n)
    # f(k, l) is needed for n - (m - k) <= l <= n
    prev = {l: Fraction(1) for l in range(n - m, n + 1)}
    for k in range(1, m + 1):
        cur = {}
        for l in range(n - (m - k), n + 1):
            cur[l] = plan.a_at(l) * prev[l] + plan.c_at(l) * prev[l - 1]
        prev = cur
    return prev[n]


def _compositions(total: int, parts: int):
    """All ``(s_0, ..., s_{parts-1})`` of nonnegative integers summing to ``total``."""
    for bars in itertools.combinations(range(total + parts - 1), parts - 1):
        yield tuple(b - a - 1 for a, b in zip((-1,) + bars, bars + (total + parts - 1,)))


def lemma1_composition_sum(m: int, n: int, plan: CoefficientPlan) -> Fraction:
    """``a_n^m + sum_k c_n...c_{n-k+1} sum_{s_0+..+s_k=m-k} a_n^{s_0}...a_{n-k}^{s_k}``, term by term."""
    _check_mn(m, n)
    total = plan.a_at(n) ** m
    for k in range(1, m + 1):
        cprod = math.prod((plan.c_at(n - i) for i in range(k)), start=Fraction(1))
        a = [plan.a_at(n - i) for i in range(k + 1)]
        inner = Fraction(0)
        for s in _compositions(m - k, k + 1):
            inner += math.prod((ai ** si for ai, si in zip(a, s)), start=Fraction(1))
        total += cprod * inner
    return total


def t3_mean(m: int, n: int) -> Fraction:
    """``E AM(A)`` over uniform ``m x n`` 0-1 matrices: ``sum_k C(m,k) P(n,k) / 2^k``."""
    _check_mn(m, n)
    return sum((Fraction(math.comb(m, k) * math.perm(n, k), 2**k) for k in range(m + 1)), Fraction(0))


def t4_second_moment(m: int, n: int) -> Fraction:
    """``E_A E_sigma(X^2)`` of the AMM output over uniform ``m x n`` matrices."""
    return lemma1_eval(m, n, SECOND_MOMENT_PLAN)


def t4_composition_form(m: int, n: int) -> Fraction:
    """Same quantity in the explicit form
    ``sum_k P(n,k) P(n+3,k) / 2^(m+k) * sum_{s} (n+2)^{s_0} (n+1)^{s_1} ... (n+2-k)^{s_k}``.
    """
    _check_mn(m, n)
    total = Fraction(0)
    for k in range(m + 1):
        inner = 0
        for s in _compositions(m - k, k + 1):
            inner += math.prod((n + 2 - i) ** si for i, si in enumerate(s))
        total += Fraction(math.perm(n, k) * math.perm(n + 3, k) * inner, 2 ** (m + k))
    return total


@dataclass(frozen=True)
class T5Bounds:
    n: int
    k_star: int
    h: Fraction
    mean: Fraction
    upper_paper: Fraction
    upper_rigorous: Fraction

    @property
    def lower_holds(self) -> bool:
        return self.h <= self.mean

    @property
    def upper_rigorous_holds(self) -> bool:
        return self.mean <= self.upper_rigorous

    @property
    def upper_paper_holds(self) -> bool:
        return self.mean <= self.upper_paper


def peak_terms(n: int) -> list[Fraction]:
    """``b_k = 2^k / ((n-k)! (k!)^2)`` for ``k = 0..n``."""
    return [Fraction(2**k, math.factorial(n - k) * math.factorial(k) ** 2) for k in range(n + 1)]


def t5_bounds(n: int) -> T5Bounds:
    """Peak-term bounds on ``E AM(A)`` over uniform ``n x n`` matrices.

    ``E = (n!)^2 / 2^n * sum_k b_k``, and ``b_k`` peaks at
    ``k* = floor(sqrt(2n + 3) - 1)``.  With ``h = (n!)^2 / 2^n * b_{k*}`` we get
    ``h <= E <= (n + 1) h``; ``n h`` is also reported.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    k_star = math.isqrt(2 * n + 3) - 1
    b = peak_terms(n)
    assert b[k_star] == max(b), (n, k_star)
    h = Fraction(math.factorial(n) ** 2, 2**n) * b[k_star]
    return T5Bounds(n, k_star, h, t3_mean(n, n), n * h, (n + 1) * h)


def power_threshold(n: int, exponent_shift: int = 0) -> tuple[Fraction, Fraction]:
    """Outward-rounded rational enclosure ``[lo, hi]`` of ``n ** (sqrt(n)/2 + exponent_shift)``.

    Exact (``lo == hi``) when ``n`` is a perfect square.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    r = math.isqrt(n)
    if r * r == n:
        v = Fraction(r) ** (r + 2 * exponent_shift)
        return v, v
    with _iv_lock:
        old = iv.prec
        iv.prec = THRESHOLD_PREC
        try:
            x = iv.mpf(n) ** (iv.sqrt(iv.mpf(n)) / 2 + exponent_shift)
            lo, hi = x._mpi_
        finally:
            iv.prec = old
    return Fraction(*to_rational(lo)), Fraction(*to_rational(hi))


@dataclass(frozen=True)
class RatioReport:
    n: int
    numerator: Fraction
    denominator: Fraction
    ratio: Fraction
    threshold: float
    threshold_lo: Fraction
    threshold_hi: Fraction

    @property
    def holds(self) -> bool:
        """``ratio >= n ** (sqrt(n)/2)``, decided against the outward-rounded enclosure."""
        if self.ratio >= self.threshold_hi:
            return True
        if self.ratio < self.threshold_lo:
            return False
        raise ArithmeticError(f"threshold enclosure too wide to decide n={self.n}")


def t6_ratio(n: int) -> RatioReport:
    """``E_A E_sigma(X^2) / (E_A E_sigma X)^2`` for uniform ``n x n`` matrices."""
    if n < 1:
        raise ValueError("n must be at least 1")
    num = t4_second_moment(n, n)
    den = t3_mean(n, n) ** 2
    lo, hi = power_threshold(n)
    return RatioReport(n, num, den, num / den, float(n ** (math.sqrt(n) / 2)), lo, hi)


def _comb0(n: int, k: int) -> int:
    return math.comb(n, k) if 0 <= k <= n else 0


def edge_inclusion_probability(t: int, m_edges: int, n: int) -> Fraction:
    """Probability that ``t`` fixed cells are all ones when ``m_edges`` of ``n^2`` are: ``C(n^2-t, m-t)/C(n^2, m)``."""
    return Fraction(_comb0(n * n - t, m_edges - t), math.comb(n * n, m_edges))


def _check_edges(m_edges: int, n: int):
    if n < 0 or not 0 <= m_edges <= n * n:
        raise ValueError(f"need 0 <= m_edges <= n^2, got m_edges={m_edges}, n={n}")


def lemma2_mean(m_ones: int, n: int) -> Fraction:
    """``E AM(B)`` for ``B`` uniform among ``n x n`` matrices with ``m_ones`` ones."""
    _check_edges(m_ones, n)
    return sum((math.comb(n, k) ** 2 * math.factorial(k) * edge_inclusion_probability(k, m_ones, n)
                for k in range(n + 1)), Fraction(0))


def t7_tail(n: int, eps) -> Fraction:
    """``sum_{i >= ceil((1/2 + eps) n^2)} C(n^2, i) / 2^(n^2)``."""
    eps = Fraction(eps)
    if not 0 <= eps <= Fraction(1, 2):
        raise ValueError(f"eps must lie in [0, 1/2], got {eps}")
    cells = n * n
    start = math.ceil((Fraction(1, 2) + eps) * cells)
    return Fraction(sum(math.comb(cells, i) for i in range(start, cells + 1)), 2**cells)


def _pair_sum(k: int, i: int, n: int, ex: list[Fraction]) -> Fraction:
    """Sum over ``i``-matchings ``M'`` of ``E(X_M X_M')`` for one fixed ``k``-matching ``M``, ``i <= k``."""
    total = Fraction(0)
    for p in range(min(i, n - k) + 1):
        choose = math.comb(n - k, p) * math.comb(k, i - p) * math.perm(n - i + p, p)
        inner = Fraction(0)
        for j in range(i - p + 1):
            inner += math.comb(i - p, j) * fit_count(n - j, i - p - j) * ex[k + i - j]
        total += choose * inner
    return total


def t8_moments(m_edges: int, n: int) -> tuple[Fraction, Fraction]:
    """``(E AM(G), E AM(G)^2)`` for ``G`` uniform among bipartite graphs on ``n + n`` vertices with ``m_edges`` edges."""
    _check_edges(m_edges, n)
    ex = [edge_inclusion_probability(t, m_edges, n) for t in range(2 * n + 1)]
    count = [math.comb(n, k) ** 2 * math.factorial(k) for k in range(n + 1)]
    mean = sum((count[k] * ex[k] for k in range(n + 1)), Fraction(0))
    second = Fraction(0)
    for k in range(n + 1):
        for i in range(k + 1):
            term = count[k] * _pair_sum(k, i, n, ex)
            # pairs with |M'| < |M| appear once more with the roles swapped
            second += term if i == k else 2 * term
    return mean, second


def lemma2_ratio(m_edges: int, n: int) -> Fraction:
    mean, second = t8_moments(m_edges, n)
    return second / (mean * mean)
