"""Brute-force reference computations, deliberately naive.

None of these share code with the fast paths they are used to check.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .matrix import ZeroOneMatrix


def edges(a: ZeroOneMatrix) -> list[tuple[int, int]]:
    return [(i, j) for i in range(a.rows) for j in range(a.cols) if a[i, j]]


def brute_matching_vector(a: ZeroOneMatrix) -> list[int]:
    """k-matching counts by testing every edge subset."""
    es = edges(a)
    counts = [0] * (min(a.rows, a.cols) + 1)
    for r in range(len(counts)):
        for subset in itertools.combinations(es, r):
            if len({i for i, _ in subset}) == r and len({j for _, j in subset}) == r:
                counts[r] += 1
    return counts


def brute_permanent(a: ZeroOneMatrix) -> int:
    n = a.rows
    assert a.cols == n
    return sum(all(a[i, s[i]] for i in range(n)) for s in itertools.permutations(range(n)))


def brute_fit_count(n: int, p: int) -> int:
    """Injections of letters ``0..p-1`` into envelopes ``0..n-1`` with letter ``t`` never in envelope ``t``."""
    return sum(all(e != t for t, e in enumerate(placement))
               for placement in itertools.permutations(range(n), p))


def pascal_row(n: int) -> list[int]:
    row = [1]
    for _ in range(n):
        row = [x + y for x, y in zip([0] + row, row + [0])]
    return row


def binomial_tail_direct(n: int, eps: Fraction) -> Fraction:
    """``P(Bin(n^2, 1/2) >= (1/2 + eps) n^2)`` from Pascal's triangle."""
    cells = n * n
    row = pascal_row(cells)
    cut = (Fraction(1, 2) + Fraction(eps)) * cells
    return Fraction(sum(c for i, c in enumerate(row) if i >= cut), 2**cells)
