import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from matchcount.matrix import (
    ColumnSet, MatrixError, extend_transform, first_row_support, from_int, from_json,
    from_text, identity, make_matrix, ones, read_matrix, remove_column, remove_first_row,
    remove_first_row_and_column, to_int, to_json, to_text, write_matrix, zeros,
)


@st.composite
def matrices(draw, max_m=5, max_n=5):
    m = draw(st.integers(0, max_m))
    n = draw(st.integers(0, max_n))
    rows = draw(st.lists(st.lists(st.integers(0, 1), min_size=n, max_size=n), min_size=m, max_size=m))
    return make_matrix(rows, cols=n)


def test_make_identity():
    a = make_matrix([[1, 0], [0, 1]])
    assert a == identity(2)
    assert a.shape == (2, 2)
    assert a.to_lists() == [[1, 0], [0, 1]]


def test_make_empty():
    a = make_matrix([])
    assert a.shape == (0, 0)
    assert make_matrix([], cols=3).shape == (0, 3)


def test_make_ragged():
    with pytest.raises(MatrixError, match="ragged row 2"):
        make_matrix([[1, 0], [0, 1, 1]])


@pytest.mark.parametrize("bad", [2, -1, 0.5, "1"])
def test_make_non_binary(bad):
    with pytest.raises(MatrixError, match="row 2, column 1"):
        make_matrix([[1, 0], [bad, 1]])


def test_accepts_numpy_and_bools():
    a = make_matrix(np.array([[True, False], [False, True]]))
    assert a == identity(2)


def test_remove_first_row():
    assert remove_first_row(make_matrix([[1, 1], [0, 1]])) == make_matrix([[0, 1]])
    assert remove_first_row(make_matrix([[1]])).shape == (0, 1)
    with pytest.raises(MatrixError):
        remove_first_row(zeros(0, 0))


def test_remove_first_row_and_column():
    assert remove_first_row_and_column(identity(2), 1) == make_matrix([[1]])
    assert remove_first_row_and_column(ones(2, 2), 2) == make_matrix([[1]])
    assert remove_first_row_and_column(make_matrix([[1]]), 1).shape == (0, 0)
    a = make_matrix([[1, 0, 1], [0, 1, 1], [1, 1, 0]])
    assert remove_first_row_and_column(a, 2) == make_matrix([[0, 1], [1, 0]])
    for j in (0, 4):
        with pytest.raises(MatrixError):
            remove_first_row_and_column(a, j)


def test_first_row_support():
    assert first_row_support(make_matrix([[1, 0, 1]])).as_set() == {1, 3}
    assert len(first_row_support(make_matrix([[0, 0]]))) == 0
    assert list(first_row_support(make_matrix([[1, 1]]))) == [1, 2]
    with pytest.raises(MatrixError):
        first_row_support(zeros(0, 2))


def test_column_set():
    s = ColumnSet(0b101, 3)
    assert 1 in s and 3 in s and 2 not in s and 4 not in s
    with pytest.raises(MatrixError):
        ColumnSet(0b1000, 3)


def test_extend_transform_blocks():
    assert extend_transform(make_matrix([[1]])) == ones(2, 2)
    b = extend_transform(identity(2))
    assert b.to_lists() == [[1, 0, 1, 0], [0, 1, 0, 1], [1, 1, 1, 1], [1, 1, 1, 1]]
    b = extend_transform(make_matrix([[1, 1], [0, 1]]))
    assert [row[:2] for row in b.to_lists()[:2]] == [[1, 1], [0, 1]]
    with pytest.raises(MatrixError):
        extend_transform(ones(2, 3))


@given(matrices())
def test_minor_is_row_then_column_deletion(a):
    for j in range(1, a.cols + 1):
        if a.rows:
            assert remove_first_row_and_column(a, j) == remove_column(remove_first_row(a), j)


@given(matrices(max_m=6, max_n=6).filter(lambda a: a.is_square))
def test_extend_transform_ones_count(a):
    n = a.rows
    assert extend_transform(a).ones() == a.ones() + n + 2 * n * n


@given(matrices())
def test_text_round_trip(a):
    if a.rows == 0 or a.cols == 0:
        # a file of empty lines is blank, and a blank file is the 0x0 matrix
        assert from_text(to_text(a)) == zeros(0, 0)
    else:
        assert from_text(to_text(a)) == a


@given(matrices())
def test_json_round_trip(a):
    assert from_json(to_json(a)) == a


@given(matrices())
def test_int_round_trip(a):
    assert from_int(to_int(a), a.rows, a.cols) == a


def test_text_format_details():
    assert from_text("") == zeros(0, 0)
    assert from_text("\n") == zeros(0, 0)
    assert from_text("0101\n1100\n").to_lists() == [[0, 1, 0, 1], [1, 1, 0, 0]]
    assert from_text("01\n10") == make_matrix([[0, 1], [1, 0]])
    with pytest.raises(MatrixError, match="invalid character"):
        from_text("0 1\n")
    with pytest.raises(MatrixError, match="ragged"):
        from_text("01\n1\n")


def test_json_format_details():
    assert json.loads(to_json(identity(2))) == {"rows": 2, "cols": 2, "data": ["10", "01"]}
    with pytest.raises(MatrixError, match="invalid character"):
        from_json('{"rows": 1, "cols": 2, "data": ["1x"]}')
    with pytest.raises(MatrixError, match="ragged"):
        from_json('{"rows": 1, "cols": 3, "data": ["10"]}')
    with pytest.raises(MatrixError):
        from_json('{"rows": 2, "cols": 2, "data": ["10"]}')


def test_file_io(tmp_path):
    a = make_matrix([[1, 0, 1], [0, 1, 1]])
    for fmt in ("text", "json"):
        path = tmp_path / f"a.{fmt}"
        write_matrix(a, path, fmt)
        assert read_matrix(path) == a


def test_from_int_order():
    # cell (1,1) is the most significant bit
    assert from_int(0b1000, 2, 2).to_lists() == [[1, 0], [0, 0]]
    assert from_int(0b0001, 2, 2).to_lists() == [[0, 0], [0, 1]]
