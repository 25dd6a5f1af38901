"""Sequential first-row estimators and their exact moments.

``RM`` estimates the permanent of a square 0-1 matrix: pick a column of
the first row's support uniformly, multiply by the support size, recurse on
the minor.  ``AMM`` estimates the number of all matchings: the choice set
additionally holds a "skip this row" option, so it is never empty.

For a draw ``r`` in ``[0, |W|)`` the choice is: for AMM, ``r == 0`` skips
the row and ``r >= 1`` takes the ``r``-th smallest support column; for RM,
``r`` indexes the support columns in increasing order.

Samples are exact Python integers (products of choice-set sizes).
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exact import AM_DP_MAX_COLS, CapabilityError, am_dp, permanent
from .matrix import MatrixError, ZeroOneMatrix
from .rng import below_array, stream_keys

# Batch samples are processed in blocks of this many to bound memory.
BLOCK = 8192
# Column masks are held in uint64 by the vectorized sampler.
SAMPLER_MAX_COLS = 64
PATH_ENUM_MAX_ROWS = 6


class Algorithm(str, enum.Enum):
    RM = "rm"
    AMM = "amm"


class UndefinedRatioError(ArithmeticError):
    """The estimator's mean is zero, so the critical ratio is undefined."""


def _check(a: ZeroOneMatrix, alg: Algorithm):
    alg = Algorithm(alg)
    if alg is Algorithm.RM and not a.is_square:
        raise MatrixError(f"RM needs a square matrix, got {a.rows}x{a.cols}")
    if alg is Algorithm.AMM and a.rows > a.cols:
        raise MatrixError(f"AMM needs m <= n, got {a.rows}x{a.cols}")
    return alg


def _nth_bit(mask: int, r: int) -> int:
    for _ in range(r):
        mask &= mask - 1
    return mask & -mask


def rm_sample(a: ZeroOneMatrix, rng) -> int:
    """One unbiased sample of ``per(A)``.  ``rng`` needs an ``integers(q)`` method."""
    _check(a, Algorithm.RM)
    alive = (1 << a.cols) - 1
    value = 1
    for row in a.bits:
        cand = row & alive
        q = cand.bit_count()
        if q == 0:
            return 0
        alive ^= _nth_bit(cand, int(rng.integers(q)))
        value *= q
    return value


def amm_sample(a: ZeroOneMatrix, rng) -> int:
    """One unbiased sample of ``AM(A)``; always at least 1."""
    _check(a, Algorithm.AMM)
    alive = (1 << a.cols) - 1
    value = 1
    for row in a.bits:
        cand = row & alive
        q = cand.bit_count() + 1
        r = int(rng.integers(q))
        if r:
            alive ^= _nth_bit(cand, r - 1)
        value *= q
    return value


def sample(a: ZeroOneMatrix, alg: Algorithm, rng) -> int:
    return rm_sample(a, rng) if Algorithm(alg) is Algorithm.RM else amm_sample(a, rng)


@dataclass(frozen=True)
class SampleStats:
    n_samples: int
    sum: int
    sum_sq: int
    seed: int
    algorithm: Algorithm

    def __post_init__(self):
        assert self.sum * self.sum <= self.n_samples * self.sum_sq

    @property
    def mean(self) -> Fraction:
        return Fraction(self.sum, self.n_samples)

    @property
    def variance(self) -> Fraction:
        """Unbiased sample variance (zero for a single sample)."""
        n = self.n_samples
        if n < 2:
            return Fraction(0)
        return Fraction(n * self.sum_sq - self.sum * self.sum, n * (n - 1))

    @property
    def stderr(self) -> float:
        return math.sqrt(self.variance / self.n_samples)

    @property
    def critical_ratio(self) -> Fraction:
        """Empirical ``E(Y^2) / E(Y)^2 = N * sum_sq / sum^2``."""
        if self.sum == 0:
            raise UndefinedRatioError("all samples are zero")
        return Fraction(self.n_samples * self.sum_sq, self.sum * self.sum)

    def merge(self, other: "SampleStats") -> "SampleStats":
        return SampleStats(self.n_samples + other.n_samples, self.sum + other.sum,
                           self.sum_sq + other.sum_sq, self.seed, self.algorithm)


def _nth_bit_array(cand: np.ndarray, r: np.ndarray, n: int) -> np.ndarray:
    """Lowest bit ``b`` of ``cand`` with exactly ``r`` set bits of ``cand`` below it."""
    out = np.zeros_like(cand)
    seen = np.zeros(cand.shape, dtype=np.int64)
    one = np.uint64(1)
    for j in range(n):
        bit = one << np.uint64(j)
        has = (cand & bit) != 0
        hit = has & (seen == r)
        out[hit] = bit
        seen += has
    return out


def _block_values(a: ZeroOneMatrix, alg: Algorithm, seed: int, start: int, stop: int) -> list[int]:
    keys = stream_keys(seed, start, stop)
    counters = np.zeros(keys.shape, dtype=np.uint64)
    size = stop - start
    alive = np.full(size, (1 << a.cols) - 1, dtype=np.uint64)
    live = np.ones(size, dtype=bool)
    factors = np.ones((size, max(a.rows, 1)), dtype=np.int64)
    amm = alg is Algorithm.AMM
    for i, row in enumerate(a.bits):
        cand = alive & np.uint64(row)
        q = np.bitwise_count(cand).astype(np.int64)
        if amm:
            q += 1
            r = below_array(keys, counters, q).astype(np.int64)
            take = r > 0
            pick = _nth_bit_array(cand[take], r[take] - 1, a.cols)
            alive[take] ^= pick
        else:
            live &= q > 0
            idx = np.flatnonzero(live)
            sub = counters[idx]
            r = below_array(keys[idx], sub, q[idx]).astype(np.int64)
            counters[idx] = sub
            alive[idx] ^= _nth_bit_array(cand[idx], r, a.cols)
        factors[:, i] = q
    values = [math.prod(f) for f in factors.tolist()]
    if not amm:
        values = [v if ok else 0 for v, ok in zip(values, live.tolist())]
    return values


def _range_sums(args) -> tuple[int, int]:
    a, alg, seed, start, stop = args
    s = ss = 0
    for lo in range(start, stop, BLOCK):
        for v in _block_values(a, alg, seed, lo, min(lo + BLOCK, stop)):
            s += v
            ss += v * v
    return s, ss


def batch_values(a: ZeroOneMatrix, alg: Algorithm, seed: int, start: int, stop: int) -> list[int]:
    """Samples ``start..stop-1`` of the batch seeded ``seed``, as exact integers."""
    alg = _check(a, alg)
    out = []
    for lo in range(start, stop, BLOCK):
        out.extend(_block_values(a, alg, seed, lo, min(lo + BLOCK, stop)))
    return out


def run_batch(a: ZeroOneMatrix, alg: Algorithm, n_samples: int, seed: int,
              workers: int = 1) -> SampleStats:
    """Exact sums over ``n_samples`` independent samples.

    Sample ``i`` draws from :class:`~matchcount.rng.CounterStream(seed, i)`,
    so the sums do not depend on ``workers``.
    """
    alg = _check(a, alg)
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    if a.cols > SAMPLER_MAX_COLS:
        raise CapabilityError(f"sampler supports at most {SAMPLER_MAX_COLS} columns")
    seed &= (1 << 64) - 1
    if workers <= 1 or n_samples < 2 * BLOCK:
        s, ss = _range_sums((a, alg, seed, 0, n_samples))
    else:
        bounds = np.linspace(0, n_samples, workers + 1).astype(int)
        jobs = [(a, alg, seed, int(lo), int(hi)) for lo, hi in zip(bounds, bounds[1:]) if hi > lo]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_range_sums, jobs))
        s = sum(p[0] for p in parts)
        ss = sum(p[1] for p in parts)
    return SampleStats(n_samples, s, ss, seed, alg)


# -- exact moments over the coin-toss space ----------------------------------

def exact_second_moment(a: ZeroOneMatrix, alg: Algorithm) -> int:
    """``E_sigma(X^2)`` by ``E(X_A^2) = |W| * sum_{j in W} E(X_{A_1j}^2)``, memoized."""
    alg = _check(a, alg)
    if a.cols > AM_DP_MAX_COLS:
        raise CapabilityError(f"moment recursion supports at most {AM_DP_MAX_COLS} columns")
    rows, m = a.bits, a.rows
    skip = alg is Algorithm.AMM
    memo: dict[tuple[int, int], int] = {}

    def rec(i: int, alive: int) -> int:
        if i == m:
            return 1
        key = (i, alive)
        if key in memo:
            return memo[key]
        cand = rows[i] & alive
        q = cand.bit_count() + skip
        acc = rec(i + 1, alive) if skip else 0
        while cand:
            low = cand & -cand
            acc += rec(i + 1, alive ^ low)
            cand ^= low
        memo[key] = q * acc
        return q * acc

    return rec(0, (1 << a.cols) - 1)


def exact_mean(a: ZeroOneMatrix, alg: Algorithm) -> int:
    """``E_sigma(X)``: ``AM(A)`` for AMM, ``per(A)`` for RM (unbiasedness)."""
    alg = _check(a, alg)
    return am_dp(a) if alg is Algorithm.AMM else permanent(a)


def critical_ratio_exact(a: ZeroOneMatrix, alg: Algorithm) -> Fraction:
    alg = _check(a, alg)
    mean = exact_mean(a, alg)
    if mean == 0:
        raise UndefinedRatioError("estimator mean is zero (permanent is 0)")
    return Fraction(exact_second_moment(a, alg), mean * mean)


def path_distribution(a: ZeroOneMatrix, alg: Algorithm) -> dict[int, Fraction]:
    """Exact value -> probability map of one sample, by walking every coin-toss path.

    Independent of the moment recursion: each leaf carries its own branch
    probability ``prod 1/|W|``.  Limited to ``PATH_ENUM_MAX_ROWS`` rows.
    """
    alg = _check(a, alg)
    if a.rows > PATH_ENUM_MAX_ROWS:
        raise CapabilityError(f"path enumeration supports at most {PATH_ENUM_MAX_ROWS} rows")
    rows, m = a.bits, a.rows
    skip = alg is Algorithm.AMM
    # (value, 1/probability) -> number of paths
    leaves: dict[tuple[int, int], int] = {}

    def walk(i: int, alive: int, denom: int):
        if i == m:
            key = (denom, denom)
            leaves[key] = leaves.get(key, 0) + 1
            return
        cand = rows[i] & alive
        q = cand.bit_count() + skip
        if q == 0:
            key = (0, denom)
            leaves[key] = leaves.get(key, 0) + 1
            return
        if skip:
            walk(i + 1, alive, denom * q)
        while cand:
            low = cand & -cand
            walk(i + 1, alive ^ low, denom * q)
            cand ^= low

    walk(0, (1 << a.cols) - 1, 1)
    dist: dict[int, Fraction] = {}
    for (value, denom), count in leaves.items():
        dist[value] = dist.get(value, Fraction(0)) + Fraction(count, denom)
    return dist


def distribution_moments(dist: dict[int, Fraction]) -> tuple[Fraction, Fraction]:
    """``(E X, E X^2)`` of a value -> probability map."""
    assert sum(dist.values()) == 1
    return (sum(v * p for v, p in dist.items()),
            sum(v * v * p for v, p in dist.items()))
