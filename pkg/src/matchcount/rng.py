"""Counter-based random streams for reproducible parallel sampling.

Every sample ``i`` of a batch seeded with ``seed`` gets its own stream whose
``t``-th 64-bit word is a pure function of ``(seed, i, t)``::

    key(seed, i) = mix64(mix64(seed) + (i + 1) * GOLDEN)
    word(key, t) = mix64(key + (t + 1) * STEP)

``mix64`` is the SplitMix64 finalizer (Steele, Lea & Flood 2014) and all
arithmetic is modulo 2**64.  Because no state is shared between samples, a
batch gives bit-identical results however it is split across workers.

Bounded integers use Lemire's multiply-shift with rejection, so
``below(q)`` is exactly uniform on ``[0, q)`` given uniform words.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
STEP = 0xD1B54A32D192ED03
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


def stream_key(seed: int, index: int) -> int:
    return mix64(mix64(seed) + (index + 1) * GOLDEN)


def _bounded(word: int, q: int) -> tuple[int, bool]:
    """Lemire reduction of one word to ``[0, q)``; second item is False on rejection."""
    prod = word * q
    low = prod & MASK64
    if low < q and low < (1 << 64) % q:
        return 0, False
    return prod >> 64, True


class CounterStream:
    """Stream of one sample.  ``integers(q)`` mirrors ``numpy.random.Generator.integers``."""

    __slots__ = ("key", "counter")

    def __init__(self, seed: int, index: int = 0):
        self.key = stream_key(seed, index)
        self.counter = 0

    def next_word(self) -> int:
        w = mix64(self.key + (self.counter + 1) * STEP)
        self.counter += 1
        return w

    def integers(self, q: int) -> int:
        if q < 1:
            raise ValueError("q must be positive")
        while True:
            r, ok = _bounded(self.next_word(), q)
            if ok:
                return r


# -- vectorized versions (numpy uint64 wraps modulo 2**64) -------------------

_U = np.uint64


def mix64_array(z: np.ndarray) -> np.ndarray:
    z = z.astype(np.uint64, copy=True)
    z ^= z >> _U(30)
    z *= _U(MIX1)
    z ^= z >> _U(27)
    z *= _U(MIX2)
    z ^= z >> _U(31)
    return z


def stream_keys(seed: int, start: int, stop: int) -> np.ndarray:
    idx = np.arange(start + 1, stop + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return mix64_array(_U(mix64(seed)) + idx * _U(GOLDEN))


def _mulhi_lo(x: np.ndarray, q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """High and low 64-bit halves of ``x * q`` for ``q < 2**32``."""
    lo32 = x & _U(0xFFFFFFFF)
    hi32 = x >> _U(32)
    a = lo32 * q
    b = hi32 * q
    mid = b + (a >> _U(32))
    high = mid >> _U(32)
    low = (mid << _U(32)) | (a & _U(0xFFFFFFFF))
    return high, low


def below_array(keys: np.ndarray, counters: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Draw ``integers(q[s])`` from each stream ``s``; advances ``counters`` in place."""
    q = q.astype(np.uint64)
    out = np.empty(keys.shape, dtype=np.uint64)
    todo = np.arange(keys.size)
    with np.errstate(over="ignore"):
        while todo.size:
            c = counters[todo] + _U(1)
            counters[todo] = c
            words = mix64_array(keys[todo] + c * _U(STEP))
            qq = q[todo]
            high, low = _mulhi_lo(words, qq)
            thresh = (_U(0) - qq) % qq  # 2**64 mod q
            bad = (low < qq) & (low < thresh)
            out[todo[~bad]] = high[~bad]
            todo = todo[bad]
    return out
