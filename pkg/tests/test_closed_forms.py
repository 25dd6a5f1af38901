import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from matchcount import closed_forms as cf
from matchcount.ensembles import EnsembleSpec, enumerate_matrices
from matchcount.estimator import exact_second_moment
from matchcount.exact import am_dp
from matchcount.oracles import binomial_tail_direct


def _exhaustive_mean(f, m, n):
    mats = list(enumerate_matrices(EnsembleSpec.exhaustive(m, n)))
    return Fraction(sum(f(a) for a in mats), len(mats))


def test_recursion_table_examples():
    for n in range(5):
        assert cf.lemma1_eval(0, n, cf.MEAN_PLAN) == 1
    assert cf.lemma1_eval(1, 1, cf.MEAN_PLAN) == Fraction(3, 2)
    assert cf.lemma1_eval(1, 1, cf.SECOND_MOMENT_PLAN) == Fraction(5, 2)


def test_plan_validation():
    partial = cf.CoefficientPlan({2: 1}, {2: 1})
    with pytest.raises(KeyError):
        cf.lemma1_eval(2, 2, partial)
    with pytest.raises(ValueError):
        cf.lemma1_eval(1, 1, cf.CoefficientPlan(lambda l: 0, lambda l: 1))
    with pytest.raises(ValueError):
        cf.lemma1_eval(3, 2, cf.MEAN_PLAN)


@pytest.mark.parametrize("plan", [cf.MEAN_PLAN, cf.SECOND_MOMENT_PLAN])
def test_table_equals_composition_sum(plan):
    for n in range(7):
        for m in range(n + 1):
            assert cf.lemma1_eval(m, n, plan) == cf.lemma1_composition_sum(m, n, plan)


def test_mean_examples():
    assert cf.t3_mean(1, 1) == Fraction(3, 2)
    assert cf.t3_mean(1, 2) == 2
    assert all(cf.t3_mean(0, n) == 1 for n in range(6))
    with pytest.raises(ValueError):
        cf.t3_mean(2, 1)


@given(st.integers(0, 30), st.integers(0, 30))
def test_mean_is_binomial_sum(a, b):
    m, n = min(a, b), max(a, b)
    want = sum(Fraction(math.comb(m, k) * math.perm(n, k), 2**k) for k in range(m + 1))
    assert cf.t3_mean(m, n) == want


@pytest.mark.parametrize("m,n", [(m, n) for n in range(4) for m in range(n + 1)])
def test_mean_and_second_moment_exhaustive(m, n):
    assert cf.t3_mean(m, n) == _exhaustive_mean(am_dp, m, n)
    assert cf.t4_second_moment(m, n) == _exhaustive_mean(lambda a: exact_second_moment(a, "amm"), m, n)


def test_second_moment_examples():
    assert cf.t4_second_moment(1, 1) == Fraction(5, 2)
    assert all(cf.t4_second_moment(0, n) == 1 for n in range(6))
    for n in range(9):
        for m in range(n + 1):
            assert cf.t4_second_moment(m, n) == cf.t4_composition_form(m, n)


def test_peak_bounds_examples():
    assert cf.t5_bounds(3).k_star == 2
    b = cf.t5_bounds(1)
    assert (b.k_star, b.h, b.mean, b.upper_rigorous, b.upper_paper) == (1, 1, Fraction(3, 2), 2, 1)
    assert b.upper_rigorous_holds and not b.upper_paper_holds
    with pytest.raises(ValueError):
        cf.t5_bounds(0)


def test_peak_bounds_range():
    for n in range(1, 41):
        b = cf.t5_bounds(n)
        assert b.lower_holds and b.upper_rigorous_holds
        terms = cf.peak_terms(n)
        assert terms[b.k_star] == max(terms)


def test_power_threshold():
    assert cf.power_threshold(1) == (1, 1)
    assert cf.power_threshold(4) == (4, 4)
    assert cf.power_threshold(9) == (27, 27)
    assert cf.power_threshold(16, 1) == (16**3, 16**3)
    for n in (2, 3, 5, 17, 40):
        lo, hi = cf.power_threshold(n)
        assert lo < hi and hi - lo < Fraction(1, 10**20) * hi
        assert float(lo) == pytest.approx(n ** (math.sqrt(n) / 2), rel=1e-12)


def test_ratio_examples():
    r = cf.t6_ratio(1)
    assert r.ratio == Fraction(10, 9) == r.numerator / r.denominator
    assert r.threshold == 1 and r.holds


def test_ratio_growth():
    prev = Fraction(1)
    for n in range(1, 41):
        r = cf.t6_ratio(n).ratio
        assert r >= prev
        prev = r


def test_fixed_edge_mean_examples():
    assert cf.lemma2_mean(4, 2) == 7
    assert all(cf.lemma2_mean(0, n) == 1 for n in range(5))
    assert cf.lemma2_mean(1, 2) == 2
    with pytest.raises(ValueError):
        cf.lemma2_mean(5, 2)


def test_tail_examples():
    assert cf.t7_tail(1, 0) == Fraction(1, 2)
    for n in range(1, 6):
        assert cf.t7_tail(n, Fraction(1, 2)) == Fraction(1, 2 ** (n * n))
    assert cf.t7_tail(2, Fraction(1, 100)) == Fraction(5, 16)
    with pytest.raises(ValueError):
        cf.t7_tail(2, Fraction(3, 4))


@given(st.integers(0, 7), st.fractions(0, Fraction(1, 2), max_denominator=200))
def test_tail_matches_direct_sum(n, eps):
    assert cf.t7_tail(n, eps) == binomial_tail_direct(n, eps)


def test_fixed_edge_moment_examples():
    assert cf.t8_moments(4, 2) == (7, 49)
    assert all(cf.t8_moments(0, n) == (1, 1) for n in range(5))
    assert cf.lemma2_ratio(4, 2) == 1
    assert all(cf.lemma2_ratio(0, n) == 1 for n in range(5))


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_fixed_edge_moments_exhaustive(n):
    for m_edges in range(n * n + 1):
        vals = [am_dp(a) for a in enumerate_matrices(EnsembleSpec.fixed_ones(m_edges, n, n))]
        mean = Fraction(sum(vals), len(vals))
        second = Fraction(sum(v * v for v in vals), len(vals))
        assert cf.t8_moments(m_edges, n) == (mean, second)
        assert cf.lemma2_mean(m_edges, n) == mean


@pytest.mark.slow
@pytest.mark.parametrize("m_edges", [0, 1, 5, 8, 9, 16])
def test_fixed_edge_moments_exhaustive_n4(m_edges):
    vals = [am_dp(a) for a in enumerate_matrices(EnsembleSpec.fixed_ones(m_edges, 4, 4))]
    assert cf.t8_moments(m_edges, 4) == (Fraction(sum(vals), len(vals)),
                                         Fraction(sum(v * v for v in vals), len(vals)))


def test_fixed_edge_ratio_at_least_one():
    for n in range(1, 8):
        for m_edges in range(n * n + 1):
            assert cf.lemma2_ratio(m_edges, n) >= 1
