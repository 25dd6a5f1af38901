"""Dense 0-1 matrices stored as one integer bitset per row.

Entry ``a[i, j]`` is bit ``j`` of ``bits[i]`` (0-based internally).  Public
helpers that take a column index use the 1-based convention, so column ``j``
of the first row is ``a_{1j}``.

The same type is used for bipartite adjacency matrices: rows are the left
vertices, columns the right vertices.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np


class MatrixError(ValueError):
    """Raised for malformed matrix input or an invalid matrix operation."""


@dataclass(frozen=True)
class ColumnSet:
    """A subset of the real columns ``{1..n}`` of some matrix, as a bitmask."""

    mask: int
    n: int

    def __post_init__(self):
        if self.mask < 0 or self.mask >> self.n:
            raise MatrixError(f"mask {self.mask:#x} is not a subset of {self.n} columns")

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __contains__(self, j: int) -> bool:
        return 1 <= j <= self.n and bool(self.mask >> (j - 1) & 1)

    def __iter__(self):
        mask = self.mask
        while mask:
            low = mask & -mask
            yield low.bit_length()
            mask ^= low

    def as_set(self) -> set[int]:
        return set(self)


@dataclass(frozen=True)
class ZeroOneMatrix:
    """Immutable ``rows x cols`` 0-1 matrix."""

    rows: int
    cols: int
    bits: tuple[int, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise MatrixError("dimensions must be nonnegative")
        if len(self.bits) != self.rows:
            raise MatrixError(f"expected {self.rows} row bitsets, got {len(self.bits)}")
        for i, b in enumerate(self.bits):
            if b < 0 or b >> self.cols:
                raise MatrixError(f"row {i + 1} has bits outside {self.cols} columns")

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"entry ({i}, {j}) outside {self.rows}x{self.cols}")
        return self.bits[i] >> j & 1

    def ones(self) -> int:
        return sum(b.bit_count() for b in self.bits)

    def to_lists(self) -> list[list[int]]:
        return [[b >> j & 1 for j in range(self.cols)] for b in self.bits]

    def to_numpy(self) -> np.ndarray:
        return np.array(self.to_lists(), dtype=np.int64).reshape(self.rows, self.cols)

    def transpose(self) -> "ZeroOneMatrix":
        cols = tuple(
            sum((self.bits[i] >> j & 1) << i for i in range(self.rows))
            for j in range(self.cols)
        )
        return ZeroOneMatrix(self.cols, self.rows, cols)

    def with_entry(self, i: int, j: int, value: int) -> "ZeroOneMatrix":
        """Copy with 0-based entry ``(i, j)`` set to ``value``."""
        self[i, j]
        bits = list(self.bits)
        bits[i] = bits[i] | (1 << j) if value else bits[i] & ~(1 << j)
        return ZeroOneMatrix(self.rows, self.cols, tuple(bits))

    def __str__(self) -> str:
        return to_text(self).rstrip("\n") or "<empty>"


def _check_binary(value, i: int, j: int) -> int:
    if isinstance(value, (bool, np.bool_)):
        return int(value)
    if isinstance(value, (int, np.integer)) and value in (0, 1):
        return int(value)
    raise MatrixError(f"non-binary entry {value!r} at row {i + 1}, column {j + 1}")


def make_matrix(rows: Sequence[Sequence[int]] | np.ndarray, cols: int | None = None) -> ZeroOneMatrix:
    """Build a matrix from 0/1 row vectors.

    ``cols`` is only needed to give an empty-row matrix a width, e.g.
    ``make_matrix([], cols=3)`` is the 0x3 matrix.
    """
    rows = [list(r) for r in rows]
    if not rows:
        return ZeroOneMatrix(0, cols or 0, ())
    width = len(rows[0])
    if cols is not None and cols != width:
        raise MatrixError(f"row 1 has length {width}, expected {cols}")
    bits = []
    for i, row in enumerate(rows):
        if len(row) != width:
            raise MatrixError(f"ragged row {i + 1}: length {len(row)}, expected {width}")
        b = 0
        for j, v in enumerate(row):
            b |= _check_binary(v, i, j) << j
        bits.append(b)
    return ZeroOneMatrix(len(rows), width, tuple(bits))


def zeros(m: int, n: int) -> ZeroOneMatrix:
    return ZeroOneMatrix(m, n, (0,) * m)


def ones(m: int, n: int) -> ZeroOneMatrix:
    return ZeroOneMatrix(m, n, ((1 << n) - 1,) * m)


def identity(n: int) -> ZeroOneMatrix:
    return ZeroOneMatrix(n, n, tuple(1 << i for i in range(n)))


def from_int(value: int, m: int, n: int) -> ZeroOneMatrix:
    """Decode the flattened bit string ``value`` (cell (0,0) is the most significant bit)."""
    total = m * n
    if value < 0 or value >> total:
        raise MatrixError(f"{value} does not fit in {total} cells")
    bits = []
    for i in range(m):
        b = 0
        for j in range(n):
            if value >> (total - 1 - (i * n + j)) & 1:
                b |= 1 << j
        bits.append(b)
    return ZeroOneMatrix(m, n, tuple(bits))


def to_int(a: ZeroOneMatrix) -> int:
    """Inverse of :func:`from_int`."""
    total = a.rows * a.cols
    value = 0
    for i, b in enumerate(a.bits):
        for j in range(a.cols):
            if b >> j & 1:
                value |= 1 << (total - 1 - (i * a.cols + j))
    return value


def _require_rows(a: ZeroOneMatrix, what: str):
    if a.rows == 0:
        raise MatrixError(f"{what} needs a matrix with at least one row")


def _delete_bit(b: int, j0: int) -> int:
    low = b & ((1 << j0) - 1)
    return low | (b >> (j0 + 1)) << j0


def remove_first_row(a: ZeroOneMatrix) -> ZeroOneMatrix:
    _require_rows(a, "remove_first_row")
    return ZeroOneMatrix(a.rows - 1, a.cols, a.bits[1:])


def remove_column(a: ZeroOneMatrix, j: int) -> ZeroOneMatrix:
    """Delete 1-based column ``j``."""
    if not 1 <= j <= a.cols:
        raise MatrixError(f"column {j} out of range 1..{a.cols}")
    return ZeroOneMatrix(a.rows, a.cols - 1, tuple(_delete_bit(b, j - 1) for b in a.bits))


def remove_first_row_and_column(a: ZeroOneMatrix, j: int) -> ZeroOneMatrix:
    """The minor ``A_{1j}``: drop row 1 and 1-based column ``j``."""
    _require_rows(a, "remove_first_row_and_column")
    if not 1 <= j <= a.cols:
        raise MatrixError(f"column {j} out of range 1..{a.cols}")
    return ZeroOneMatrix(a.rows - 1, a.cols - 1, tuple(_delete_bit(b, j - 1) for b in a.bits[1:]))


def first_row_support(a: ZeroOneMatrix) -> ColumnSet:
    _require_rows(a, "first_row_support")
    return ColumnSet(a.bits[0], a.cols)


def extend_transform(a: ZeroOneMatrix) -> ZeroOneMatrix:
    """The ``2n x 2n`` block matrix ``[[A, I], [J, J]]`` whose permanent is ``n! * AM(A)``."""
    if not a.is_square:
        raise MatrixError(f"extend_transform needs a square matrix, got {a.rows}x{a.cols}")
    n = a.rows
    full = (1 << (2 * n)) - 1
    top = tuple(b | 1 << (n + i) for i, b in enumerate(a.bits))
    return ZeroOneMatrix(2 * n, 2 * n, top + (full,) * n)


# -- text / JSON formats -----------------------------------------------------

def to_text(a: ZeroOneMatrix) -> str:
    return "".join("".join(str(b >> j & 1) for j in range(a.cols)) + "\n" for b in a.bits)


def _parse_row_string(line: str, i: int) -> list[int]:
    row = []
    for j, ch in enumerate(line):
        if ch not in "01":
            raise MatrixError(f"invalid character {ch!r} at row {i + 1}, column {j + 1}")
        row.append(int(ch))
    return row


def from_text(text: str) -> ZeroOneMatrix:
    """Parse one-row-per-line ``0``/``1`` text; a blank file is the 0x0 matrix."""
    if text.strip() == "":
        return zeros(0, 0)
    lines = text.split("\n")
    if lines[-1] == "":
        lines.pop()
    rows = []
    for i, line in enumerate(lines):
        if line.endswith("\r"):
            line = line[:-1]
        rows.append(_parse_row_string(line, i))
    return make_matrix(rows)


def to_json_obj(a: ZeroOneMatrix) -> dict:
    return {"rows": a.rows, "cols": a.cols,
            "data": ["".join(str(b >> j & 1) for j in range(a.cols)) for b in a.bits]}


def from_json_obj(obj: dict) -> ZeroOneMatrix:
    try:
        m, n, data = obj["rows"], obj["cols"], obj["data"]
    except (KeyError, TypeError) as exc:
        raise MatrixError(f"matrix JSON needs rows, cols and data: {exc}") from None
    if not (isinstance(m, int) and isinstance(n, int)) or m < 0 or n < 0:
        raise MatrixError("rows and cols must be nonnegative integers")
    if not isinstance(data, list) or len(data) != m:
        raise MatrixError(f"data must be a list of {m} row strings")
    rows = []
    for i, line in enumerate(data):
        if not isinstance(line, str):
            raise MatrixError(f"row {i + 1} is not a string")
        if len(line) != n:
            raise MatrixError(f"ragged row {i + 1}: length {len(line)}, expected {n}")
        rows.append(_parse_row_string(line, i))
    return make_matrix(rows, cols=n) if m else zeros(0, n)


def to_json(a: ZeroOneMatrix) -> str:
    return json.dumps(to_json_obj(a))


def from_json(text: str) -> ZeroOneMatrix:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MatrixError(f"invalid JSON: {exc}") from None
    return from_json_obj(obj)


def read_matrix(path) -> ZeroOneMatrix:
    """Read either format; JSON is detected by a leading ``{``."""
    with open(path) as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        return from_json(text)
    return from_text(text)


def write_matrix(a: ZeroOneMatrix, path, fmt: str = "text"):
    with open(path, "w") as fh:
        fh.write(to_json(a) + "\n" if fmt == "json" else to_text(a))


def random_matrix(m: int, n: int, rng: np.random.Generator, p: float = 0.5) -> ZeroOneMatrix:
    """Convenience i.i.d. Bernoulli(p) matrix (see :mod:`matchcount.ensembles` for exact p)."""
    return make_matrix((rng.random((m, n)) < p).astype(int).tolist(), cols=n)
