"""Exact arithmetic over Q and over number fields Q[x]/(m(x)).

A ``Field`` is either the rationals or a quotient Q[x]/(m(x)) with m monic.
Elements are ``Scalar`` values holding a coefficient tuple (low degree
first) of length equal to the field degree.  All operations are exact and
total except division by zero, which raises ``FieldError``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

RationalLike = Union[int, str, Fraction]


class FieldError(ArithmeticError):
    """Invalid field construction, mixed-field operation, or division by zero."""


def _fraction(v: RationalLike) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, str)):
        return Fraction(v)
    raise TypeError(f"cannot interpret {v!r} as a rational number")


def _poly_trim(coeffs: Sequence[Fraction]) -> tuple[Fraction, ...]:
    n = len(coeffs)
    while n > 0 and coeffs[n - 1] == 0:
        n -= 1
    return tuple(coeffs[:n])


def _poly_divmod(num: Sequence[Fraction], den: Sequence[Fraction]):
    """Quotient and remainder of polynomial division (dense, low first)."""
    num = list(num)
    dden = len(den) - 1
    if dden < 0:
        raise FieldError("polynomial division by zero")
    inv_lead = 1 / den[-1]
    quot = [Fraction(0)] * max(len(num) - dden, 0)
    for i in range(len(num) - dden - 1, -1, -1):
        c = num[i + dden] * inv_lead
        if c != 0:
            quot[i] = c
            for j, d in enumerate(den):
                num[i + j] -= c * d
    return _poly_trim(quot), _poly_trim(num[:dden])


def _has_rational_root(coeffs: Sequence[Fraction]) -> bool:
    """Rational-root test for a polynomial with rational coefficients."""
    den_lcm = 1
    for c in coeffs:
        den_lcm = den_lcm * c.denominator // _gcd(den_lcm, c.denominator)
    ints = [int(c * den_lcm) for c in coeffs]
    while ints and ints[0] == 0:
        return True  # root at 0
    lead, const = ints[-1], ints[0]
    for p in _divisors(abs(const)):
        for q in _divisors(abs(lead)):
            for sign in (1, -1):
                r = Fraction(sign * p, q)
                acc = Fraction(0)
                for c in reversed(ints):
                    acc = acc * r + c
                if acc == 0:
                    return True
    return False


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def _divisors(n: int) -> list[int]:
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    return sorted(out)


@dataclass(frozen=True)
class Field:
    """Q when ``modulus`` is None, else Q[x]/(m(x)) with m monic, degree >= 1.

    ``trusted_modulus`` records that irreducibility was asserted by the
    caller rather than verified here (only low-degree moduli are checked by
    the rational-root test).
    """

    modulus: tuple[Fraction, ...] | None = None
    trusted_modulus: bool = False

    def __post_init__(self):
        if self.modulus is None:
            return
        mod = tuple(_fraction(c) for c in self.modulus)
        object.__setattr__(self, "modulus", mod)
        deg = len(mod) - 1
        if deg < 1:
            raise FieldError("modulus must have degree >= 1")
        if mod[-1] != 1:
            raise FieldError("modulus must be monic")
        if deg >= 2 and _has_rational_root(mod):
            raise FieldError("modulus is reducible: it has a rational root")
        if deg >= 4 and not self.trusted_modulus:
            raise FieldError(
                "cannot verify irreducibility for degree >= 4; "
                "pass trusted_modulus=True to assert it"
            )

    @property
    def degree(self) -> int:
        return 1 if self.modulus is None else len(self.modulus) - 1

    @property
    def is_rationals(self) -> bool:
        return self.modulus is None

    def zero(self) -> "Scalar":
        return Scalar(self, (Fraction(0),) * self.degree)

    def one(self) -> "Scalar":
        return self.scalar(1)

    def scalar(self, v: RationalLike) -> "Scalar":
        coeffs = [Fraction(0)] * self.degree
        coeffs[0] = _fraction(v)
        return Scalar(self, tuple(coeffs))

    def generator(self) -> "Scalar":
        """The residue class of x (raises over Q, which has no generator)."""
        if self.is_rationals:
            raise FieldError("Q has no field generator")
        coeffs = [Fraction(0)] * self.degree
        coeffs[1] = Fraction(1)
        return Scalar(self, tuple(coeffs))

    def from_coeffs(self, coeffs: Iterable[RationalLike]) -> "Scalar":
        cs = [_fraction(c) for c in coeffs]
        if len(cs) > self.degree:
            cs = list(self._reduce(tuple(cs)))
        cs += [Fraction(0)] * (self.degree - len(cs))
        return Scalar(self, tuple(cs[: self.degree]))

    def _reduce(self, coeffs: tuple[Fraction, ...]) -> tuple[Fraction, ...]:
        if self.modulus is None:
            return coeffs
        _, rem = _poly_divmod(coeffs, self.modulus)
        out = list(rem) + [Fraction(0)] * (self.degree - len(rem))
        return tuple(out)

    def parse(self, text: str) -> "Scalar":
        """Parse "p/q" over Q or "[c0,c1,...]" over a number field."""
        text = text.strip()
        if text.startswith("["):
            if not text.endswith("]"):
                raise FieldError(f"unterminated coefficient list: {text!r}")
            parts = [p for p in text[1:-1].split(",") if p.strip()]
            return self.from_coeffs(Fraction(p.strip()) for p in parts)
        return self.scalar(Fraction(text))

    def random_rational(self, rng: random.Random, bound: int = 97) -> "Scalar":
        """A random small-height rational embedded in this field."""
        num = rng.randint(-bound, bound)
        den = rng.randint(1, bound)
        return self.scalar(Fraction(num, den))


def rationals() -> Field:
    return Field()


def number_field(modulus: Iterable[RationalLike], trusted: bool = False) -> Field:
    return Field(tuple(_fraction(c) for c in modulus), trusted_modulus=trusted)


@dataclass(frozen=True)
class Scalar:
    """An element of a ``Field``: a reduced coefficient tuple, low degree first."""

    field: Field
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.field.degree:
            raise FieldError("coefficient length does not match field degree")

    def _check(self, other: "Scalar") -> "Scalar":
        if isinstance(other, int):
            return self.field.scalar(other)
        if not isinstance(other, Scalar):
            return None  # defer to the other operand's reflected operator
        if other.field != self.field:
            raise FieldError("mixed-field arithmetic")
        return other

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise FieldError(f"{self} is not rational")
        return self.coeffs[0]

    def __bool__(self) -> bool:
        return not self.is_zero

    def __add__(self, other):
        other = self._check(other)
        if other is None:
            return NotImplemented
        return Scalar(self.field, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._check(other)
        if other is None:
            return NotImplemented
        return Scalar(self.field, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __rsub__(self, other):
        other = self._check(other)
        if other is None:
            return NotImplemented
        return other - self

    def __neg__(self):
        return Scalar(self.field, tuple(-a for a in self.coeffs))

    def __mul__(self, other):
        other = self._check(other)
        if other is None:
            return NotImplemented
        d = self.field.degree
        if d == 1:
            return Scalar(self.field, (self.coeffs[0] * other.coeffs[0],))
        prod = [Fraction(0)] * (2 * d - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                if b != 0:
                    prod[i + j] += a * b
        return Scalar(self.field, self.field._reduce(tuple(prod)))

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if self.is_zero:
            raise FieldError("division by zero")
        if self.field.degree == 1:
            return Scalar(self.field, (1 / self.coeffs[0],))
        # Extended Euclid in Q[x]: s*self + t*modulus = 1.
        r0, r1 = self.field.modulus, _poly_trim(self.coeffs)
        s0, s1 = (), (Fraction(1),)
        while r1:
            quot, rem = _poly_divmod(r0, r1)
            r0, r1 = r1, rem
            s_next = _poly_sub(s0, _poly_mul(quot, s1))
            s0, s1 = s1, s_next
        if len(r0) != 1:
            raise FieldError("element is a zero divisor: modulus is reducible")
        inv_of_gcd = 1 / r0[0]
        return self.field.from_coeffs(tuple(c * inv_of_gcd for c in s0))

    def __truediv__(self, other):
        other = self._check(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._check(other)
        if other is None:
            return NotImplemented
        return other / self

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __str__(self) -> str:
        if self.field.is_rationals:
            return str(self.coeffs[0])
        return "[" + ",".join(str(c) for c in self.coeffs) + "]"

    def __repr__(self) -> str:
        return f"Scalar({self})"


def _poly_mul(a: Sequence[Fraction], b: Sequence[Fraction]) -> tuple[Fraction, ...]:
    if not a or not b:
        return ()
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _poly_trim(out)


def _poly_sub(a: Sequence[Fraction], b: Sequence[Fraction]) -> tuple[Fraction, ...]:
    n = max(len(a), len(b))
    out = [Fraction(0)] * n
    for i, x in enumerate(a):
        out[i] += x
    for i, y in enumerate(b):
        out[i] -= y
    return _poly_trim(out)
