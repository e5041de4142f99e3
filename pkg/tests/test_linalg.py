import itertools
import random
from fractions import Fraction

import pytest

from crtorsion.field import number_field, rationals
from crtorsion.linalg import (
    ExactMatrix,
    LinAlgError,
    StaircaseElimination,
    det_exact,
    null_space,
    rank_and_pivots,
)

Q = rationals()
COS7 = number_field([-1, -2, 1, 1])


def _rand_scalar(field, rng, span=9):
    return field.from_coeffs(
        [Fraction(rng.randint(-span, span), rng.randint(1, 5))
         for _ in range(field.degree)])


def _rand_matrix(field, rng, n, m=None):
    m = m or n
    return ExactMatrix.from_rows(
        field, [[_rand_scalar(field, rng) for _ in range(m)] for _ in range(n)])


def _cofactor_det(rows, field):
    """Independent oracle: recursive cofactor expansion."""
    n = len(rows)
    if n == 0:
        return field.one()
    if n == 1:
        return rows[0][0]
    total = field.zero()
    for j in range(n):
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = rows[0][j] * _cofactor_det(minor, field)
        total = total + term if j % 2 == 0 else total - term
    return total


def test_det_identity_and_repeated_row():
    m = ExactMatrix.identity(Q, 4)
    assert det_exact(m) == Q.one()
    rows = [[Q.scalar(1), Q.scalar(2)], [Q.scalar(1), Q.scalar(2)]]
    assert det_exact(ExactMatrix.from_rows(Q, rows)).is_zero


def test_det_non_square_raises():
    m = ExactMatrix.from_rows(Q, [[Q.one(), Q.zero()]])
    with pytest.raises(LinAlgError):
        det_exact(m)


@pytest.mark.parametrize("field", [Q, COS7])
def test_det_matches_cofactor_oracle(field):
    rng = random.Random(13)
    for n in (2, 3, 5):
        m = _rand_matrix(field, rng, n)
        assert det_exact(m) == _cofactor_det(m.to_rows(), field)


@pytest.mark.parametrize("field", [Q, COS7])
def test_det_multiplicative(field):
    rng = random.Random(17)
    for n in (2, 4, 6):
        a = _rand_matrix(field, rng, n)
        b = _rand_matrix(field, rng, n)
        assert det_exact(a * b) == det_exact(a) * det_exact(b)


def _row_reduce_rank(rows):
    """Independent oracle: plain Gaussian elimination over Fractions."""
    grid = [[Fraction(x.coeffs[0]) for x in row] for row in rows]
    rank = 0
    cols = len(grid[0]) if grid else 0
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, len(grid)) if grid[i][c] != 0), None)
        if piv is None:
            continue
        grid[r], grid[piv] = grid[piv], grid[r]
        grid[r] = [x / grid[r][c] for x in grid[r]]
        for i in range(len(grid)):
            if i != r and grid[i][c] != 0:
                f = grid[i][c]
                grid[i] = [x - f * y for x, y in zip(grid[i], grid[r])]
        r += 1
        rank += 1
    return rank


def test_rank_trivial_cases():
    zero = ExactMatrix.from_rows(Q, [[Q.zero()] * 3 for _ in range(2)])
    assert rank_and_pivots(zero) == (0, (), ())
    ident = ExactMatrix.identity(Q, 3)
    r, rows, cols = rank_and_pivots(ident)
    assert r == 3 and set(rows) == {0, 1, 2} and set(cols) == {0, 1, 2}


def test_rank_matches_row_reduction_oracle():
    rng = random.Random(23)
    for _ in range(10):
        n, m = rng.randint(2, 5), rng.randint(2, 6)
        mat = _rand_matrix(Q, rng, n, m)
        # sprinkle zeros and dependencies
        rows = mat.to_rows()
        if n >= 3:
            rows[-1] = [a + b for a, b in zip(rows[0], rows[1])]
        mat = ExactMatrix.from_rows(Q, rows)
        r, prows, pcols = rank_and_pivots(mat)
        assert r == _row_reduce_rank(mat.to_rows())
        sub = mat.submatrix(prows, pcols)
        assert not det_exact(sub).is_zero
        # appending any excluded column keeps the rank
        for extra in set(mat.col_labels) - set(pcols):
            wider = mat.submatrix(col_labels=list(pcols) + [extra])
            assert rank_and_pivots(wider)[0] == r


def test_rank_preference_orders_change_pivots_not_rank():
    rng = random.Random(29)
    m = _rand_matrix(Q, rng, 4, 5)
    r0, rows0, _ = rank_and_pivots(m)
    r1, rows1, _ = rank_and_pivots(m, row_pref=tuple(reversed(m.row_labels)))
    assert r0 == r1
    assert rows0 != rows1  # generic matrices give different pivot rows


def test_null_space():
    rows = [[Q.scalar(1), Q.scalar(2), Q.scalar(3)],
            [Q.scalar(2), Q.scalar(4), Q.scalar(6)]]
    m = ExactMatrix.from_rows(Q, rows)
    basis = null_space(m)
    assert len(basis) == 2
    for vec in basis:
        for row in rows:
            acc = Q.zero()
            for a, x in zip(row, vec):
                acc = acc + a * x
            assert acc.is_zero


@pytest.mark.parametrize("field", [Q, COS7])
def test_staircase_matches_direct_determinant(field):
    rng = random.Random(31)
    n, k = 7, 4
    for _ in range(3):
        rows = [[_rand_scalar(field, rng) for _ in range(n)] for _ in range(n)]
        direct = det_exact(ExactMatrix.from_rows(field, rows))
        stair = StaircaseElimination(field, rows[:k], n)
        assert stair.determinant_with(rows[k:]) == direct
        handles = [stair.reduce_row(r) for r in rows[k:]]
        assert stair.determinant_of(handles) == direct


def test_staircase_zero_when_dependent():
    rng = random.Random(37)
    rows = [[_rand_scalar(Q, rng) for _ in range(4)] for _ in range(3)]
    rows.append(rows[0])  # dependent completion
    stair = StaircaseElimination(Q, rows[:3], 4)
    assert stair.determinant_with([rows[0]]).is_zero


def test_scaled_row_and_col():
    rng = random.Random(41)
    m = _rand_matrix(Q, rng, 3)
    t = Q.scalar(5)
    assert det_exact(m.scaled_row(1, t)) == t * det_exact(m)
    assert det_exact(m.scaled_col(2, t)) == t * det_exact(m)
