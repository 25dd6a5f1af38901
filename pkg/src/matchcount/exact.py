"""Exact matching counts, permanents and the 0-fit placement count.

Everything here is exact integer arithmetic.  There are two independent
routes to ``AM(A)``, the number of all matchings (empty matching included):

* :func:`am_recursive` -- the first-row expansion
  ``AM(A) = AM(A_10) + sum_j a_1j AM(A_1j)`` applied literally, no memo;
* :func:`am_dp` -- a subset DP over used-column sets, vectorized with numpy
  and carried out modulo several 56-bit primes, recombined by CRT.

The slow one is the test oracle for the fast one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .matrix import MatrixError, ZeroOneMatrix, extend_transform

# Largest column count accepted by the subset DP (two uint64 arrays of 2**n).
AM_DP_MAX_COLS = 24
# Ryser's formula is a pure-Python loop over 2**n subsets; 28 takes hours.
PERMANENT_MAX_N = 28

# Primes just below 2**56: a row update adds at most 64 residues to one
# cell, and 65 * 2**56 < 2**64, so one reduction per row is enough.
_PRIMES = (
    72057594037927931, 72057594037927909, 72057594037927889, 72057594037927879,
    72057594037927847, 72057594037927843, 72057594037927789, 72057594037927759,
    72057594037927747, 72057594037927741,
)


class CapabilityError(RuntimeError):
    """The input is valid but exceeds what the chosen algorithm supports."""


@dataclass(frozen=True)
class MatchingVector:
    """``counts[k]`` is the number of k-matchings; ``counts[0] == 1``."""

    counts: tuple[int, ...]

    def __getitem__(self, k: int) -> int:
        return self.counts[k]

    def __len__(self) -> int:
        return len(self.counts)

    def __iter__(self):
        return iter(self.counts)

    @property
    def total(self) -> int:
        return sum(self.counts)

    @property
    def max_matching(self) -> int:
        return max(k for k, c in enumerate(self.counts) if c)


def _require_m_le_n(a: ZeroOneMatrix, what: str):
    if a.rows > a.cols:
        raise MatrixError(
            f"{what} is defined for m <= n, got {a.rows}x{a.cols} (transpose the input)"
        )


def am_recursive(a: ZeroOneMatrix) -> int:
    """Count all matchings by the literal first-row expansion.

    Exponential time; meant as a reference for ``m <= 12`` or so.
    """
    _require_m_le_n(a, "am_recursive")
    rows = a.bits

    def rec(i: int, alive: int) -> int:
        if i == len(rows):
            return 1
        total = rec(i + 1, alive)  # A_10: row i unmatched
        cand = rows[i] & alive
        while cand:
            low = cand & -cand
            total += rec(i + 1, alive ^ low)
            cand ^= low
        return total

    return rec(0, (1 << a.cols) - 1)


def _check_dp_size(a: ZeroOneMatrix):
    if a.cols > AM_DP_MAX_COLS:
        raise CapabilityError(
            f"subset DP supports at most {AM_DP_MAX_COLS} columns, got {a.cols}; "
            "use am_recursive for small m or estimate by sampling"
        )


def _dp_residues(a: ZeroOneMatrix, p: int) -> list[int]:
    """Per-size matching counts modulo ``p``.

    ``f[S]`` counts matchings of the rows seen so far whose matched columns
    are exactly ``S``; adding row ``i`` gives
    ``f'[S] = f[S] + sum_{j in S, a_ij = 1} f[S - {j}]``.
    """
    n = a.cols
    size = 1 << n
    f = np.zeros(size, dtype=np.uint64)
    f[0] = 1
    pu = np.uint64(p)
    for row in a.bits:
        if not row:
            continue
        g = f.copy()
        for j in range(n):
            if row >> j & 1:
                half = 1 << j
                gv = g.reshape(-1, 2, half)
                gv[:, 1, :] += f.reshape(-1, 2, half)[:, 0, :]
        np.remainder(g, pu, out=g)
        f = g
    sizes = np.bitwise_count(np.arange(size, dtype=np.uint64))
    out = []
    for k in range(min(a.rows, n) + 1):
        vals = f[sizes == k]
        # 128 residues < 2**56 sum to < 2**63
        while vals.size > 1:
            pad = (-vals.size) % 128
            if pad:
                vals = np.concatenate([vals, np.zeros(pad, dtype=np.uint64)])
            vals = vals.reshape(-1, 128).sum(axis=1) % pu
        out.append(int(vals[0]) % p if vals.size else 0)
    return out


def _crt(residues: list[int], moduli: list[int]) -> int:
    x, mod = 0, 1
    for r, p in zip(residues, moduli):
        t = (r - x) * pow(mod, -1, p) % p
        x += mod * t
        mod *= p
    return x


def _all_ones_bound(m: int, n: int) -> int:
    # AM is monotone in the entries, so AM(J_{m,n}) bounds every count.
    return sum(math.comb(m, k) * math.perm(n, k) for k in range(min(m, n) + 1))


def matching_vector(a: ZeroOneMatrix) -> MatchingVector:
    """Number of k-matchings for ``k = 0..min(m, n)`` via the subset DP."""
    _require_m_le_n(a, "matching_vector")
    _check_dp_size(a)
    bound = _all_ones_bound(a.rows, a.cols)
    moduli, prod = [], 1
    for p in _PRIMES:
        if prod > bound:
            break
        moduli.append(p)
        prod *= p
    per_prime = [_dp_residues(a, p) for p in moduli]
    counts = tuple(
        _crt([res[k] for res in per_prime], moduli) for k in range(min(a.rows, a.cols) + 1)
    )
    return MatchingVector(counts)


def am_dp(a: ZeroOneMatrix) -> int:
    """Number of all matchings, ``O(m * n * 2**n)`` numpy work."""
    return matching_vector(a).total


def permanent(a: ZeroOneMatrix) -> int:
    """Permanent by Ryser's inclusion-exclusion with Gray-code column order.

    ``per(A) = (-1)^n sum_S (-1)^|S| prod_i sum_{j in S} a_ij``.
    """
    if not a.is_square:
        raise MatrixError(f"permanent needs a square matrix, got {a.rows}x{a.cols}")
    n = a.rows
    if n > PERMANENT_MAX_N:
        raise CapabilityError(f"permanent supports n <= {PERMANENT_MAX_N}, got {n}")
    if n == 0:
        return 1
    cols = [[i for i in range(n) if a.bits[i] >> j & 1] for j in range(n)]
    sums = [0] * n
    zero_rows = n
    in_set = [False] * n
    total = 0
    sign = -1  # (-1)^|S| for |S| = 1 after the first flip
    for k in range(1, 1 << n):
        j = (k & -k).bit_length() - 1
        if in_set[j]:
            in_set[j] = False
            for i in cols[j]:
                sums[i] -= 1
                if sums[i] == 0:
                    zero_rows += 1
        else:
            in_set[j] = True
            for i in cols[j]:
                if sums[i] == 0:
                    zero_rows -= 1
                sums[i] += 1
        if zero_rows == 0:
            total += sign * math.prod(sums)
        sign = -sign
    return total if n % 2 == 0 else -total


@dataclass(frozen=True)
class Corollary3Check:
    holds: bool
    am: int
    per: int
    n_factorial: int

    @property
    def lhs(self) -> int:
        return self.n_factorial * self.am


def verify_corollary3(a: ZeroOneMatrix) -> Corollary3Check:
    """Check ``n! * AM(A) == per([[A, I], [J, J]])``."""
    if not a.is_square:
        raise MatrixError(f"corollary check needs a square matrix, got {a.rows}x{a.cols}")
    am = am_dp(a)
    per = permanent(extend_transform(a))
    nf = math.factorial(a.rows)
    return Corollary3Check(nf * am == per, am, per, nf)


def fit_count(n: int, p: int) -> int:
    """Injective placements of ``p`` labeled letters into ``n`` envelopes, none in its own.

    Each letter's "mother" envelope is among the ``n``; inclusion-exclusion
    gives ``sum_r (-1)^r C(p, r) P(n - r, p - r)``.
    """
    if p < 0 or n < 0 or p > n:
        raise ValueError(f"fit_count needs 0 <= p <= n, got n={n}, p={p}")
    return sum((-1) ** r * math.comb(p, r) * math.perm(n - r, p - r) for r in range(p + 1))
