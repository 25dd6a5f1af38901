"""Random 0-1 matrix ensembles and exhaustive enumeration.

Three spaces are covered:

* ``bernoulli`` -- i.i.d. entries equal to 1 with probability ``p``;
* ``fixed_ones`` -- uniform over matrices with exactly ``m_ones`` ones (the
  adjacency matrices of bipartite graphs with that many edges);
* ``exhaustive`` -- every matrix once, uniformly weighted.

Enumeration order is ascending in the flattened bit string read row-major
with cell (1,1) as the most significant bit (see :func:`matrix.from_int`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator

import numpy as np

from .exact import CapabilityError
from .matrix import ZeroOneMatrix, from_int, make_matrix

DEFAULT_CAP = 10**7

KINDS = ("bernoulli", "fixed_ones", "exhaustive")


@dataclass(frozen=True)
class EnsembleSpec:
    kind: str
    rows: int
    cols: int
    p: Fraction | None = None
    m_ones: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown ensemble kind {self.kind!r}")
        if self.rows < 0 or self.cols < 0:
            raise ValueError("dimensions must be nonnegative")
        if self.kind == "bernoulli":
            p = Fraction(self.p) if self.p is not None else None
            if p is None or not 0 <= p <= 1:
                raise ValueError(f"bernoulli needs 0 <= p <= 1, got {self.p}")
            object.__setattr__(self, "p", p)
        if self.kind == "fixed_ones":
            if self.m_ones is None or not 0 <= self.m_ones <= self.rows * self.cols:
                raise ValueError(
                    f"fixed_ones needs 0 <= m_ones <= {self.rows * self.cols}, got {self.m_ones}")

    @classmethod
    def bernoulli(cls, m: int, n: int, p=Fraction(1, 2)) -> "EnsembleSpec":
        return cls("bernoulli", m, n, p=Fraction(p))

    @classmethod
    def fixed_ones(cls, m_ones: int, m: int, n: int) -> "EnsembleSpec":
        return cls("fixed_ones", m, n, m_ones=m_ones)

    @classmethod
    def exhaustive(cls, m: int, n: int) -> "EnsembleSpec":
        return cls("exhaustive", m, n)

    @property
    def cells(self) -> int:
        return self.rows * self.cols

    def count(self) -> int:
        """Number of matrices :func:`enumerate_matrices` yields."""
        if self.kind == "fixed_ones":
            return math.comb(self.cells, self.m_ones)
        return 1 << self.cells

    def to_json_obj(self) -> dict:
        obj = {"kind": self.kind, "rows": self.rows, "cols": self.cols}
        if self.kind == "bernoulli":
            obj["p"] = f"{self.p.numerator}/{self.p.denominator}"
        if self.kind == "fixed_ones":
            obj["m_ones"] = self.m_ones
        return obj

    @classmethod
    def from_json_obj(cls, obj: dict) -> "EnsembleSpec":
        kind = obj.get("kind")
        try:
            m, n = int(obj["rows"]), int(obj["cols"])
        except (KeyError, TypeError, ValueError):
            raise ValueError("ensemble JSON needs integer rows and cols") from None
        if kind == "bernoulli":
            return cls.bernoulli(m, n, Fraction(str(obj.get("p", "1/2"))))
        if kind == "fixed_ones":
            if "m_ones" not in obj:
                raise ValueError("fixed_ones ensemble needs m_ones")
            return cls.fixed_ones(int(obj["m_ones"]), m, n)
        if kind == "exhaustive":
            return cls.exhaustive(m, n)
        raise ValueError(f"unknown ensemble kind {kind!r}")


def sample(spec: EnsembleSpec, rng: np.random.Generator) -> ZeroOneMatrix:
    m, n = spec.rows, spec.cols
    if spec.kind == "exhaustive":
        raise ValueError("the exhaustive ensemble is enumerated, not sampled; use enumerate_matrices")
    if spec.kind == "bernoulli":
        p = spec.p
        # exact Bernoulli(num/den): uniform integer below den compared to num
        cells = rng.integers(0, p.denominator, size=(m, n)) < p.numerator
        return make_matrix(cells.astype(int).tolist(), cols=n)
    # partial Fisher-Yates over cell indices
    idx = np.arange(spec.cells)
    k = spec.m_ones
    for t in range(k):
        u = int(rng.integers(t, spec.cells))
        idx[t], idx[u] = idx[u], idx[t]
    flat = np.zeros(spec.cells, dtype=int)
    flat[idx[:k]] = 1
    return make_matrix(flat.reshape(m, n).tolist(), cols=n)


def _same_popcount_ascending(total: int, k: int) -> Iterator[int]:
    """Integers below ``2**total`` with ``k`` bits set, ascending (Gosper's hack)."""
    if k == 0:
        yield 0
        return
    x = (1 << k) - 1
    limit = 1 << total
    while x < limit:
        yield x
        c = x & -x
        r = x + c
        x = (((r ^ x) >> 2) // c) | r


def enumerate_matrices(spec: EnsembleSpec, cap: int = DEFAULT_CAP) -> Iterator[ZeroOneMatrix]:
    """Every matrix of the ensemble's support exactly once, in ascending bit-string order.

    ``bernoulli`` and ``exhaustive`` both enumerate all ``2**(m n)`` matrices.
    """
    total = spec.count()
    if total > cap:
        raise CapabilityError(f"ensemble has {total} matrices, above the enumeration cap {cap}")
    m, n = spec.rows, spec.cols
    if spec.kind == "fixed_ones":
        values = _same_popcount_ascending(spec.cells, spec.m_ones)
    else:
        values = iter(range(1 << spec.cells))
    for v in values:
        yield from_int(v, m, n)


def matrix_probability(spec: EnsembleSpec, a: ZeroOneMatrix) -> Fraction:
    """Probability of ``a`` under the ensemble."""
    if spec.kind == "exhaustive":
        return Fraction(1, 1 << spec.cells)
    if spec.kind == "fixed_ones":
        return Fraction(int(a.ones() == spec.m_ones), math.comb(spec.cells, spec.m_ones))
    k = a.ones()
    return spec.p ** k * (1 - spec.p) ** (spec.cells - k)


@dataclass(frozen=True)
class SampledMean:
    mean: float
    stderr: float
    n: int


def empirical_expectation(spec: EnsembleSpec, f: Callable[[ZeroOneMatrix], object],
                          mode: str = "exhaustive", n_samples: int = 1000, seed: int = 0,
                          cap: int = DEFAULT_CAP):
    """Ensemble mean of ``f``.

    ``mode="exhaustive"`` returns the exact mean as a :class:`Fraction`
    (probability-weighted for ``bernoulli``); ``mode="sampled"`` returns a
    :class:`SampledMean` from ``n_samples`` draws of ``numpy`` PCG64(``seed``).
    """
    if mode == "exhaustive":
        if spec.kind == "bernoulli" and spec.p != Fraction(1, 2):
            acc = Fraction(0)
            for a in enumerate_matrices(spec, cap):
                w = matrix_probability(spec, a)
                if w:
                    acc += w * Fraction(f(a))
            return acc
        acc = Fraction(0)
        count = 0
        for a in enumerate_matrices(spec, cap):
            acc += Fraction(f(a))
            count += 1
        return acc / count
    if mode == "sampled":
        if n_samples < 2:
            raise ValueError("sampled mode needs at least 2 samples")
        rng = np.random.default_rng(seed)
        vals = [Fraction(f(sample(spec, rng))) for _ in range(n_samples)]
        mean = sum(vals) / n_samples
        var = sum((v - mean) ** 2 for v in vals) / (n_samples - 1)
        return SampledMean(float(mean), math.sqrt(var / n_samples), n_samples)
    raise ValueError(f"unknown mode {mode!r}")
