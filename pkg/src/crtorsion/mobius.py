"""Moebius geometry: fractional-linear action, cross-ratios, lengths.

Points carry a projective coordinate z and a scale coordinate h; the pair
corresponds to the isotropic vector (h z^2, h z, h) for the bilinear form
Q = [[0,0,-1],[0,2,0],[-1,0,0]].  A 2x2 element acts by z -> (az+b)/(cz+d),
h -> h (cz+d)^2, which is the symmetric-square action on that vector.
Entries may be ``Scalar`` or ``Jet`` valued; all formulas are rational, so
jets propagate exact first derivatives.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

from .field import Field, FieldError, Scalar
from .jets import Jet
from .linalg import ExactMatrix, det_exact

Ring = Union[Scalar, Jet]


class NonGenericError(ArithmeticError):
    """A coordinate configuration violated general position."""


def _value(x: Ring) -> Scalar:
    return x.value if isinstance(x, Jet) else x


def _value_is_zero(x: Ring) -> bool:
    return _value(x).is_zero


@dataclass(frozen=True)
class MobiusElement:
    """2x2 matrix acting projectively; +/- representatives are identified.

    The value part of the determinant must be 1 (jet-valued entries may
    deform it at first order, which encodes non-unimodular deformation
    directions).
    """

    a: Ring
    b: Ring
    c: Ring
    d: Ring

    def __post_init__(self):
        det = _value(self.a) * _value(self.d) - _value(self.b) * _value(self.c)
        if det != _value(self.a).field.one():
            raise FieldError("matrix representative must have unit determinant value")

    @staticmethod
    def identity(field: Field) -> "MobiusElement":
        one, zero = field.one(), field.zero()
        return MobiusElement(one, zero, zero, one)

    @staticmethod
    def from_entries(entries: Iterable[Ring]) -> "MobiusElement":
        a, b, c, d = entries
        return MobiusElement(a, b, c, d)

    @property
    def field(self) -> Field:
        return _value(self.a).field

    @property
    def is_jet(self) -> bool:
        return any(isinstance(x, Jet) for x in (self.a, self.b, self.c, self.d))

    def det(self) -> Ring:
        return self.a * self.d - self.b * self.c

    def __mul__(self, other: "MobiusElement") -> "MobiusElement":
        return MobiusElement(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "MobiusElement":
        det = self.det()
        if isinstance(det, Jet) or det != self.field.one():
            return MobiusElement(self.d / det, -self.b / det, -self.c / det, self.a / det)
        return MobiusElement(self.d, -self.b, -self.c, self.a)

    def __pow__(self, n: int) -> "MobiusElement":
        if n < 0:
            return self.inverse() ** (-n)
        result = MobiusElement.identity(self.field)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def eq_up_to_sign(self, other: "MobiusElement") -> bool:
        mine = (self.a, self.b, self.c, self.d)
        theirs = (other.a, other.b, other.c, other.d)
        if any(isinstance(x, Jet) for x in mine + theirs):
            raise TypeError("sign-insensitive equality is defined for scalar entries only")
        return all(x == y for x, y in zip(mine, theirs)) or all(
            x == -y for x, y in zip(mine, theirs)
        )

    def apply_z(self, z: Ring) -> Ring:
        """The fractional-linear image of z; independent of the +/- representative."""
        den = self.c * z + self.d
        if _value_is_zero(den):
            raise NonGenericError("point maps to infinity under Moebius action")
        return (self.a * z + self.b) / den

    def apply(self, v: "VertexCoords") -> "VertexCoords":
        """The action induced on (z, h) by the form-preserving 3x3 image.

        The scale coordinate transforms by (cz + d)^2 / det, so jet-valued
        representatives with non-unimodular first-order parts still act
        through their projective class.
        """
        den = self.c * v.z + self.d
        if _value_is_zero(den):
            raise NonGenericError("point maps to infinity under Moebius action")
        h = v.h * den * den
        det = self.det()
        if isinstance(det, Jet):
            h = h / det
        return VertexCoords((self.a * v.z + self.b) / den, h)

    def sym_square(self) -> ExactMatrix:
        """The induced 3x3 action on isotropic vectors (h z^2, h z, h)."""
        a, b, c, d = self.a, self.b, self.c, self.d
        if self.is_jet:
            raise TypeError("symmetric square is defined for scalar entries")
        two = self.field.scalar(2)
        rows = [
            [a * a, two * a * b, b * b],
            [a * c, a * d + b * c, b * d],
            [c * c, two * c * d, d * d],
        ]
        return ExactMatrix.from_rows(self.field, rows)


def form_matrix(field: Field) -> ExactMatrix:
    """The bilinear form whose isotropic cone holds the vectors (h z^2, h z, h)."""
    z, two = field.zero(), field.scalar(2)
    m1 = -field.one()
    return ExactMatrix.from_rows(field, [[z, z, m1], [z, two, z], [m1, z, z]])


@dataclass(frozen=True)
class VertexCoords:
    """Projective coordinate z and scale coordinate h of one vertex."""

    z: Ring
    h: Ring

    def isotropic_vector(self) -> tuple[Ring, Ring, Ring]:
        return (self.h * self.z * self.z, self.h * self.z, self.h)


def cross_ratio(z0: Ring, z1: Ring, z2: Ring, z3: Ring):
    """The cross-ratio x and its two partner values.

    Returns (x, 1 - 1/x, 1/(1 - x)), the values attached to the opposite
    edge pairs {02,13}, {03,12} and {01,23} of a tetrahedron with vertices
    in this order.
    """
    diffs = {
        (0, 1): z0 - z1, (0, 2): z0 - z2, (0, 3): z0 - z3,
        (1, 2): z1 - z2, (1, 3): z1 - z3, (2, 3): z2 - z3,
    }
    for pair, dz in diffs.items():
        if _value_is_zero(dz):
            raise NonGenericError(f"degenerate tetrahedron: coincident points {pair}")
    x = (diffs[(0, 1)] * diffs[(2, 3)]) / (diffs[(0, 3)] * (-diffs[(1, 2)]))
    one = _value(z0).field.one()
    return x, one - one / x, one / (one - x)


def squared_length(u: VertexCoords, v: VertexCoords) -> Ring:
    """Squared distance between isotropic vector tips: 2 h_u h_v (z_u - z_v)^2."""
    dz = u.z - v.z
    two = _value(u.z).field.scalar(2)
    return two * u.h * v.h * dz * dz


def normalized_length(u: VertexCoords, v: VertexCoords,
                      zeta_u: Scalar, zeta_v: Scalar,
                      kappa_u: Scalar, kappa_v: Scalar) -> Ring:
    """Squared edge length normalized by its unperturbed value; 1/2 at base point."""
    dz = zeta_u - zeta_v
    if dz.is_zero or kappa_u.is_zero or kappa_v.is_zero:
        raise NonGenericError("normalized length requires distinct base points, nonzero scales")
    denom = (kappa_u * kappa_v * dz * dz) * zeta_u.field.scalar(4)
    return squared_length(u, v) / denom


def discrepancy(lengths) -> Ring:
    """Zero-diagonal symmetric 4x4 determinant of squared edge lengths.

    ``lengths`` maps unordered index pairs (i, j), 0 <= i < j <= 3, to the
    squared length of that edge; vanishes identically when the lengths come
    from isotropic vector tips.
    """
    some = next(iter(lengths.values()))
    field = _value(some).field
    zero = field.zero()
    grid = [[zero] * 4 for _ in range(4)]
    for (i, j), val in lengths.items():
        if not (0 <= i < j <= 3):
            raise ValueError("length keys must be ordered pairs within 0..3")
        grid[i][j] = val
        grid[j][i] = val
    if any(isinstance(val, Jet) for val in lengths.values()):
        return _det4_jet(grid)
    return det_exact(ExactMatrix.from_rows(field, grid))


def _det4_jet(grid):
    """Cofactor expansion so that jet entries are supported."""

    def det3(r, cs):
        (i, j, k) = r
        (a, b, c) = cs
        return (grid[i][a] * (grid[j][b] * grid[k][c] - grid[j][c] * grid[k][b])
                - grid[i][b] * (grid[j][a] * grid[k][c] - grid[j][c] * grid[k][a])
                + grid[i][c] * (grid[j][a] * grid[k][b] - grid[j][b] * grid[k][a]))

    total = None
    rows = (1, 2, 3)
    for col, sign in ((0, 1), (1, -1), (2, 1), (3, -1)):
        rest = tuple(c for c in range(4) if c != col)
        term = grid[0][col] * det3(rows, rest)
        if sign < 0:
            term = -term
        total = term if total is None else total + term
    return total


def deficit_angle(xs: Iterable[Ring], field: Field = None) -> Ring:
    """Product of the cross-ratio values around one edge; empty product is 1."""
    total = None
    for x in xs:
        total = x if total is None else total * x
    if total is None:
        if field is None:
            raise ValueError("empty star: pass the field to get the empty product")
        return field.one()
    return total
