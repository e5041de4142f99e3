"""First-order jets: scalars extended by nilpotent infinitesimals.

A jet carries an exact value and a sparse map of first partial derivatives
keyed by string tags.  Second-order terms are always discarded, so the
product and quotient rules hold exactly and no transcendental function is
ever evaluated: logarithmic derivatives are extracted with ``dlog``.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Mapping, Union

from .field import Field, FieldError, Scalar

JetLike = Union["Jet", Scalar, int]


@dataclass(frozen=True)
class Jet:
    value: Scalar
    partials: Mapping[str, Scalar] = dc_field(default_factory=dict)

    @staticmethod
    def lift(v: Scalar) -> "Jet":
        return Jet(v, {})

    @staticmethod
    def seed(v: Scalar, tag: str) -> "Jet":
        """v + epsilon_tag."""
        return Jet(v, {tag: v.field.one()})

    @property
    def field(self) -> Field:
        return self.value.field

    @property
    def is_zero(self) -> bool:
        return self.value.is_zero and not self.partials

    def _coerce(self, other: JetLike) -> "Jet":
        if isinstance(other, Jet):
            return other
        if isinstance(other, Scalar):
            return Jet.lift(other)
        if isinstance(other, int):
            return Jet.lift(self.field.scalar(other))
        raise TypeError(f"cannot mix Jet with {type(other).__name__}")

    def partial(self, tag: str) -> Scalar:
        return self.partials.get(tag, self.field.zero())

    def __add__(self, other: JetLike) -> "Jet":
        other = self._coerce(other)
        parts = dict(self.partials)
        for t, p in other.partials.items():
            parts[t] = parts[t] + p if t in parts else p
        return Jet(self.value + other.value, _drop_zeros(parts))

    __radd__ = __add__

    def __neg__(self) -> "Jet":
        return Jet(-self.value, {t: -p for t, p in self.partials.items()})

    def __sub__(self, other: JetLike) -> "Jet":
        return self + (-self._coerce(other))

    def __rsub__(self, other: JetLike) -> "Jet":
        return self._coerce(other) - self

    def __mul__(self, other: JetLike) -> "Jet":
        other = self._coerce(other)
        parts: dict[str, Scalar] = {}
        for t, p in self.partials.items():
            parts[t] = p * other.value
        for t, p in other.partials.items():
            q = p * self.value
            parts[t] = parts[t] + q if t in parts else q
        return Jet(self.value * other.value, _drop_zeros(parts))

    __rmul__ = __mul__

    def __truediv__(self, other: JetLike) -> "Jet":
        other = self._coerce(other)
        if other.value.is_zero:
            raise FieldError("jet division by a jet with zero value part")
        inv = other.value.inverse()
        val = self.value * inv
        parts: dict[str, Scalar] = {}
        tags = set(self.partials) | set(other.partials)
        for t in tags:
            num = self.partial(t) - val * other.partial(t)
            parts[t] = num * inv
        return Jet(val, _drop_zeros(parts))

    def __rtruediv__(self, other: JetLike) -> "Jet":
        return self._coerce(other) / self

    def dlog(self) -> dict[str, Scalar]:
        """Partials of log(self): partial/value, without evaluating any log."""
        if self.value.is_zero:
            raise FieldError("logarithmic derivative at zero")
        inv = self.value.inverse()
        return {t: p * inv for t, p in self.partials.items()}

    def __repr__(self) -> str:
        terms = " + ".join(f"({p})d{t}" for t, p in sorted(self.partials.items()))
        return f"Jet({self.value}{' + ' + terms if terms else ''})"


def _drop_zeros(parts: dict[str, Scalar]) -> dict[str, Scalar]:
    return {t: p for t, p in parts.items() if not p.is_zero}
