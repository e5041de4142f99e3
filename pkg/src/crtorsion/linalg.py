"""Dense exact linear algebra: determinants, ranks, pivots, kernels.

Matrices hold ``Scalar`` entries with labelled rows and columns.
Determinants use fraction-free (Bareiss) elimination; when the field
modulus has integer coefficients the elimination runs on cleared integer
polynomials, which keeps the inner loop free of rational gcd work.  A
``StaircaseElimination`` factors out a fixed block of rows shared by many
determinants.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .field import Field, FieldError, Scalar, _poly_divmod, _poly_mul, _poly_sub, _poly_trim

Label = object  # any hashable, comparable-within-axis label


class LinAlgError(ArithmeticError):
    pass


@dataclass(frozen=True)
class ExactMatrix:
    field: Field
    rows: int
    cols: int
    entries: tuple[Scalar, ...]  # row-major
    row_labels: tuple
    col_labels: tuple

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise LinAlgError("entry count does not match shape")
        if len(set(self.row_labels)) != self.rows or len(set(self.col_labels)) != self.cols:
            raise LinAlgError("labels must be unique within their axis")

    @staticmethod
    def from_rows(field: Field, rows: Sequence[Sequence[Scalar]],
                  row_labels: Sequence = None, col_labels: Sequence = None) -> "ExactMatrix":
        r = len(rows)
        c = len(rows[0]) if r else 0
        if any(len(row) != c for row in rows):
            raise LinAlgError("ragged rows")
        if row_labels is None:
            row_labels = tuple(range(r))
        if col_labels is None:
            col_labels = tuple(range(c))
        flat = tuple(x for row in rows for x in row)
        return ExactMatrix(field, r, c, flat, tuple(row_labels), tuple(col_labels))

    @staticmethod
    def identity(field: Field, n: int, labels: Sequence = None) -> "ExactMatrix":
        one, zero = field.one(), field.zero()
        rows = [[one if i == j else zero for j in range(n)] for i in range(n)]
        labels = tuple(labels) if labels is not None else tuple(range(n))
        return ExactMatrix.from_rows(field, rows, labels, labels)

    def entry(self, i: int, j: int) -> Scalar:
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[Scalar, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def to_rows(self) -> list[list[Scalar]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self) -> "ExactMatrix":
        rows = [[self.entry(i, j) for i in range(self.rows)] for j in range(self.cols)]
        return ExactMatrix.from_rows(self.field, rows, self.col_labels, self.row_labels)

    def __mul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.rows:
            raise LinAlgError("shape mismatch in matrix product")
        if self.col_labels != other.row_labels:
            raise LinAlgError("label mismatch in matrix product")
        zero = self.field.zero()
        out = []
        for i in range(self.rows):
            ri = self.row(i)
            out_row = []
            for j in range(other.cols):
                acc = zero
                for k in range(self.cols):
                    a = ri[k]
                    if not a.is_zero:
                        b = other.entry(k, j)
                        if not b.is_zero:
                            acc = acc + a * b
                out_row.append(acc)
            out.append(out_row)
        return ExactMatrix.from_rows(self.field, out, self.row_labels, other.col_labels)

    @property
    def is_zero(self) -> bool:
        return all(e.is_zero for e in self.entries)

    def submatrix(self, row_labels: Iterable = None, col_labels: Iterable = None) -> "ExactMatrix":
        ri = {l: i for i, l in enumerate(self.row_labels)}
        ci = {l: i for i, l in enumerate(self.col_labels)}
        rsel = list(self.row_labels) if row_labels is None else list(row_labels)
        csel = list(self.col_labels) if col_labels is None else list(col_labels)
        try:
            ridx = [ri[l] for l in rsel]
            cidx = [ci[l] for l in csel]
        except KeyError as exc:
            raise LinAlgError(f"unknown label {exc.args[0]!r}") from exc
        rows = [[self.entry(i, j) for j in cidx] for i in ridx]
        return ExactMatrix.from_rows(self.field, rows, tuple(rsel), tuple(csel))

    def scaled_row(self, label, factor: Scalar) -> "ExactMatrix":
        i = list(self.row_labels).index(label)
        rows = self.to_rows()
        rows[i] = [factor * x for x in rows[i]]
        return ExactMatrix.from_rows(self.field, rows, self.row_labels, self.col_labels)

    def scaled_col(self, label, factor: Scalar) -> "ExactMatrix":
        j = list(self.col_labels).index(label)
        rows = self.to_rows()
        for row in rows:
            row[j] = factor * row[j]
        return ExactMatrix.from_rows(self.field, rows, self.row_labels, self.col_labels)


# ---------------------------------------------------------------------------
# Integer-polynomial layer.  Elements are int tuples of length d (the field
# degree); the modulus is a monic int tuple of length d + 1, or None for Q.

def _int_modulus(field: Field):
    """Integer modulus tuple if the fast path applies, else None for Q, raises otherwise."""
    if field.is_rationals:
        return None
    if all(c.denominator == 1 for c in field.modulus):
        return tuple(int(c) for c in field.modulus)
    raise LinAlgError("modulus has non-integer coefficients")


def _field_supports_int_path(field: Field) -> bool:
    try:
        _int_modulus(field)
        return True
    except LinAlgError:
        return False


def _clear_rows(field: Field, rows: Sequence[Sequence[Scalar]]):
    """Scale each row to integer coefficient tuples; return (grid, scales)."""
    d = field.degree
    grid = []
    scales = []
    for row in rows:
        lcm = 1
        for s in row:
            for c in s.coeffs:
                g = _igcd(lcm, c.denominator)
                lcm = lcm // g * c.denominator
        grid.append([tuple(int(c * lcm) for c in s.coeffs) for s in row])
        scales.append(Fraction(lcm))
    assert all(len(e) == d for row in grid for e in row)
    return grid, scales


def _igcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def _ip_zero(d: int):
    return (0,) * d


def _ip_is_zero(a) -> bool:
    return all(c == 0 for c in a)


def _ip_add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _ip_sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _ip_mul(a, b, mod):
    d = len(a)
    if d == 1:
        return (a[0] * b[0],)
    prod = [0] * (2 * d - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    prod[i + j] += x * y
    # reduce modulo the monic integer modulus
    for k in range(2 * d - 2, d - 1, -1):
        c = prod[k]
        if c:
            prod[k] = 0
            base = k - d
            for j in range(d):
                prod[base + j] -= c * mod[j]
    return tuple(prod[:d])


def _ip_divexact_prepare(v, mod, field: Field):
    """Return (w, N) with v*w == N (mod modulus), N a positive integer."""
    inv = Scalar(field, tuple(Fraction(c) for c in v)).inverse()
    lcm = 1
    for c in inv.coeffs:
        g = _igcd(lcm, c.denominator)
        lcm = lcm // g * c.denominator
    w = tuple(int(c * lcm) for c in inv.coeffs)
    return w, lcm


class _ExactDivider:
    """Division by a fixed element of Z[x]/(mod); the inverse is prepared once."""

    def __init__(self, divisor, mod, field: Field):
        self.mod = mod
        self.field = field
        self.divisor = divisor
        if len(divisor) > 1:
            self.w, self.n = _ip_divexact_prepare(divisor, mod, field)

    def __call__(self, u):
        if len(u) == 1:
            q, r = divmod(u[0], self.divisor[0])
            if r:
                raise LinAlgError("inexact integer division in fraction-free elimination")
            return (q,)
        num = _ip_mul(u, self.w, self.mod)
        n = self.n
        out = []
        for c in num:
            q, r = divmod(c, n)
            if r:
                raise LinAlgError("inexact polynomial division in fraction-free elimination")
            out.append(q)
        return tuple(out)


class _IntEliminator:
    """Fraction-free row echelon over Z[x]/(mod) with recorded steps."""

    def __init__(self, field: Field, grid):
        self.field = field
        self.mod = _int_modulus(field)
        if self.mod is None:
            self.mod = ()  # degree-1 path never consults it
        self.grid = [list(row) for row in grid]
        self.d = field.degree
        self.sign = 1
        self.pivot_rows: list[int] = []
        self.pivot_cols: list[int] = []
        self.pivots = []  # pivot value after each step
        self.steps = []   # (col, pivot_row_vector, pivot_value, prev_pivot)

    def run(self, max_pivots=None):
        rows = len(self.grid)
        cols = len(self.grid[0]) if rows else 0
        used = [False] * rows
        one = (1,) + (0,) * (self.d - 1)
        divide = _ExactDivider(one, self.mod, self.field)
        prev = one
        for col in range(cols):
            if max_pivots is not None and len(self.pivot_cols) >= max_pivots:
                break
            pr = None
            for i in range(rows):
                if not used[i] and not _ip_is_zero(self.grid[i][col]):
                    pr = i
                    break
            if pr is None:
                continue
            piv = self.grid[pr][col]
            used[pr] = True
            mod = self.mod
            for i in range(rows):
                if used[i] or i == pr:
                    continue
                factor = self.grid[i][col]
                row = self.grid[i]
                prow = self.grid[pr]
                for j in range(cols):
                    num = _ip_sub(_ip_mul(piv, row[j], mod),
                                  _ip_mul(factor, prow[j], mod))
                    row[j] = divide(num)
            self.steps.append((col, tuple(self.grid[pr]), piv, divide))
            self.pivot_rows.append(pr)
            self.pivot_cols.append(col)
            self.pivots.append(piv)
            prev = piv
            divide = _ExactDivider(prev, self.mod, self.field)

    def reduce_external(self, row):
        """Apply the recorded elimination steps to one extra row."""
        row = list(row)
        mod = self.mod
        for col, prow, piv, divide in self.steps:
            factor = row[col]
            for j in range(len(row)):
                num = _ip_sub(_ip_mul(piv, row[j], mod),
                              _ip_mul(factor, prow[j], mod))
                row[j] = divide(num)
        return row


def _perm_sign(perm: Sequence[int]) -> int:
    seen = [False] * len(perm)
    sign = 1
    for i in range(len(perm)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _int_to_scalar(field: Field, ip) -> Scalar:
    return Scalar(field, tuple(Fraction(c) for c in ip))


def _det_int_path(m: ExactMatrix) -> Scalar:
    grid, scales = _clear_rows(m.field, m.to_rows())
    elim = _IntEliminator(m.field, grid)
    elim.run()
    n = m.rows
    if len(elim.pivots) < n:
        return m.field.zero()
    # det of the cleared matrix = sign(row perm) * sign(col perm) * last pivot
    rsign = _perm_sign(elim.pivot_rows)
    csign = _perm_sign(elim.pivot_cols)
    det = _int_to_scalar(m.field, elim.pivots[-1])
    scale = Fraction(1)
    for s in scales:
        scale *= s
    return det * m.field.scalar(Fraction(rsign * csign) / scale)


def _det_generic(m: ExactMatrix) -> Scalar:
    """Fraction-free elimination directly on Scalars (any exact field)."""
    n = m.rows
    grid = m.to_rows()
    sign = 1
    prev = m.field.one()
    for k in range(n):
        pr = None
        for i in range(k, n):
            if not grid[i][k].is_zero:
                pr = i
                break
        if pr is None:
            return m.field.zero()
        if pr != k:
            grid[k], grid[pr] = grid[pr], grid[k]
            sign = -sign
        piv = grid[k][k]
        prev_inv = prev.inverse()
        for i in range(k + 1, n):
            fi = grid[i][k]
            for j in range(k, n):
                grid[i][j] = (piv * grid[i][j] - fi * grid[k][j]) * prev_inv
        prev = piv
    det = grid[n - 1][n - 1]
    return det if sign == 1 else -det


def det_exact(m: ExactMatrix) -> Scalar:
    """Exact determinant; zero for singular input; raises on non-square."""
    if m.rows != m.cols:
        raise LinAlgError(f"determinant of non-square {m.rows}x{m.cols} matrix")
    if m.rows == 0:
        return m.field.one()
    if _field_supports_int_path(m.field):
        return _det_int_path(m)
    return _det_generic(m)


def rank_and_pivots(m: ExactMatrix, row_pref: Sequence = None, col_pref: Sequence = None):
    """Exact rank plus row/column labels of a nonsingular rank x rank minor.

    Preference sequences reorder the pivot search; they change which minor
    is reported, never the rank.
    """
    ri = {l: i for i, l in enumerate(m.row_labels)}
    ci = {l: i for i, l in enumerate(m.col_labels)}
    rorder = [ri[l] for l in (row_pref if row_pref is not None else m.row_labels)]
    corder = [ci[l] for l in (col_pref if col_pref is not None else m.col_labels)]
    grid = m.to_rows()
    used = set()
    pivot_rows = []
    pivot_cols = []
    for cj in corder:
        pr = None
        for i in rorder:
            if i not in used and not grid[i][cj].is_zero:
                pr = i
                break
        if pr is None:
            continue
        used.add(pr)
        pivot_rows.append(pr)
        pivot_cols.append(cj)
        inv = grid[pr][cj].inverse()
        for i in rorder:
            if i in used or grid[i][cj].is_zero:
                continue
            f = grid[i][cj] * inv
            grid[i] = [a - f * b for a, b in zip(grid[i], grid[pr])]
    return (
        len(pivot_rows),
        tuple(m.row_labels[i] for i in pivot_rows),
        tuple(m.col_labels[j] for j in pivot_cols),
    )


def null_space(m: ExactMatrix) -> tuple[tuple[Scalar, ...], ...]:
    """Kernel basis vectors (indexed by column labels), reduced echelon form."""
    grid = m.to_rows()
    nr, nc = m.rows, m.cols
    pivots = []  # (row, col)
    r = 0
    for c in range(nc):
        pr = None
        for i in range(r, nr):
            if not grid[i][c].is_zero:
                pr = i
                break
        if pr is None:
            continue
        grid[r], grid[pr] = grid[pr], grid[r]
        inv = grid[r][c].inverse()
        grid[r] = [x * inv for x in grid[r]]
        for i in range(nr):
            if i != r and not grid[i][c].is_zero:
                f = grid[i][c]
                grid[i] = [a - f * b for a, b in zip(grid[i], grid[r])]
        pivots.append((r, c))
        r += 1
        if r == nr:
            break
    pivot_cols = {c for _, c in pivots}
    basis = []
    zero, one = m.field.zero(), m.field.one()
    for free in range(nc):
        if free in pivot_cols:
            continue
        vec = [zero] * nc
        vec[free] = one
        for pr, pc in pivots:
            vec[pc] = -grid[pr][free]
        basis.append(tuple(vec))
    return tuple(basis)


class StaircaseElimination:
    """Shared partial elimination of a fixed row block.

    Many square matrices that differ only in their trailing rows share the
    elimination work of the leading block; ``determinant_with`` completes
    each one from the recorded steps.
    """

    def __init__(self, field: Field, fixed_rows: Sequence[Sequence[Scalar]], n_cols: int):
        self.field = field
        self.n_cols = n_cols
        self.k = len(fixed_rows)
        if not _field_supports_int_path(field):
            raise LinAlgError("staircase elimination requires an integer-compatible modulus")
        grid, scales = _clear_rows(field, fixed_rows)
        self.scale = Fraction(1)
        for s in scales:
            self.scale *= s
        self.elim = _IntEliminator(field, grid)
        self.elim.run()
        self.full_rank = len(self.elim.pivots) == self.k

    def reduce_row(self, row: Sequence[Scalar]):
        """Eliminate one extra row against the fixed block; reusable handle."""
        egrid, escales = _clear_rows(self.field, [row])
        reduced = self.elim.reduce_external(egrid[0])
        rest_cols = [c for c in range(self.n_cols) if c not in set(self.elim.pivot_cols)]
        return (tuple(reduced[c] for c in rest_cols), escales[0])

    def determinant_with(self, extra_rows: Sequence[Sequence[Scalar]]) -> Scalar:
        return self.determinant_of([self.reduce_row(r) for r in extra_rows])

    def determinant_of(self, handles) -> Scalar:
        """Determinant of the square matrix completed by pre-reduced rows."""
        e = len(handles)
        if self.k + e != self.n_cols:
            raise LinAlgError("completed matrix is not square")
        if not self.full_rank:
            return self.field.zero()
        mod = self.elim.mod
        sub = [list(h[0]) for h in handles]
        # det of the e x e minor matrix, then Sylvester rescaling
        sub_elim = _IntEliminator(self.field, sub)
        sub_elim.run()
        if len(sub_elim.pivots) < e:
            return self.field.zero()
        det_m = sub_elim.pivots[-1]
        det_m_sign = _perm_sign(sub_elim.pivot_rows) * _perm_sign(sub_elim.pivot_cols)
        pk = self.elim.pivots[-1] if self.k else (1,) + (0,) * (self.field.degree - 1)
        divide_pk = _ExactDivider(pk, mod, self.field)
        for _ in range(e - 1):
            det_m = divide_pk(det_m)
        rest_cols = [c for c in range(self.n_cols) if c not in set(self.elim.pivot_cols)]
        col_perm = list(self.elim.pivot_cols) + rest_cols
        row_perm = list(self.elim.pivot_rows) + list(range(self.k, self.k + e))
        sign = _perm_sign(col_perm) * _perm_sign(row_perm) * det_m_sign
        scale = self.scale
        for h in handles:
            scale *= h[1]
        return _int_to_scalar(self.field, det_m) * self.field.scalar(Fraction(sign) / scale)
