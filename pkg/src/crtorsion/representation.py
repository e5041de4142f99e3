"""Representations of deck groups into PSL(2) and their deformations.

A ``Representation`` stores generator images as scalar Moebius elements and
extends homomorphically.  A ``DeformationFamily`` stores jet-valued images
whose value parts agree with the representation; its partial tags are the
deformation coordinates.  ``stabilizer_basis`` solves the exact linear
system for the subalgebra commuting with the whole representation.
"""

from __future__ import annotations

from dataclasses import dataclass

from .field import Field, Scalar
from .groups import DeckGroup, GroupElement, GroupError
from .jets import Jet
from .linalg import ExactMatrix, null_space
from .mobius import MobiusElement


class RepresentationError(ValueError):
    pass


@dataclass(frozen=True)
class Representation:
    group: DeckGroup
    images: dict  # generator name -> MobiusElement

    def __post_init__(self):
        names = self.group.generator_names
        if set(self.images) != set(names):
            raise RepresentationError(f"images must cover generators {names}")
        for name, g in self.images.items():
            if g.is_jet:
                raise RepresentationError("representation images must be scalar valued")
        if self.group.kind == "cyclic_mod_p":
            g = self.images["t"] ** self.group.p
            ident = MobiusElement.identity(self.field)
            if not g.eq_up_to_sign(ident):
                raise RepresentationError(
                    f"generator image does not have order dividing {self.group.p} in PSL(2)")

    @property
    def field(self) -> Field:
        if self.images:
            return next(iter(self.images.values())).field
        raise RepresentationError("trivial group representation needs an explicit field")

    def apply(self, elem: GroupElement) -> MobiusElement:
        out = None
        kind = self.group.kind
        if kind == "trivial":
            raise RepresentationError("use trivial_representation(field) for the trivial group")
        if kind in ("infinite_cyclic", "cyclic_mod_p"):
            return self.images["t"] ** elem.data
        for gi, e in elem.data:
            name = self.group.generator_names[gi]
            factor = self.images[name] ** e
            out = factor if out is None else out * factor
        return out if out is not None else MobiusElement.identity(self.field)


@dataclass(frozen=True)
class TrivialRepresentation:
    """Representation of the trivial deck group; everything maps to 1."""

    group: DeckGroup
    _field: Field

    @property
    def field(self) -> Field:
        return self._field

    @property
    def images(self) -> dict:
        return {}

    def apply(self, elem: GroupElement) -> MobiusElement:
        if not elem.is_identity:
            raise GroupError("trivial group has one element")
        return MobiusElement.identity(self._field)


def trivial_representation(field: Field) -> TrivialRepresentation:
    return TrivialRepresentation(DeckGroup("trivial"), field)


@dataclass(frozen=True)
class DeformationFamily:
    """Jet-valued extension of a representation; k = len(tags) parameters."""

    rep: Representation
    tags: tuple[str, ...]
    jet_images: dict  # generator name -> MobiusElement with Jet entries

    def __post_init__(self):
        for name, jg in self.jet_images.items():
            base = self.rep.images[name]
            for jx, sx in ((jg.a, base.a), (jg.b, base.b), (jg.c, base.c), (jg.d, base.d)):
                val = jx.value if isinstance(jx, Jet) else jx
                if val != sx:
                    raise RepresentationError(
                        f"deformation value part of rho({name}) differs from representation")
        if self.rep.group.kind == "cyclic_mod_p" and self.tags:
            # rho_eps(t)^p must stay projectively constant to first order
            power = self.apply(self.rep.group.generator() ** self.rep.group.p)
            for tag in self.tags:
                da = power.a.partial(tag) if isinstance(power.a, Jet) else None
                dd = power.d.partial(tag) if isinstance(power.d, Jet) else None
                db = power.b.partial(tag) if isinstance(power.b, Jet) else self.field.zero()
                dc = power.c.partial(tag) if isinstance(power.c, Jet) else self.field.zero()
                diag_ok = (da is None and dd is None) or (
                    da is not None and dd is not None and da == dd)
                if not (diag_ok and db.is_zero and dc.is_zero):
                    raise RepresentationError(
                        "deformation violates the group relation at first order")

    @property
    def field(self) -> Field:
        return self.rep.field

    @property
    def k(self) -> int:
        return len(self.tags)

    def apply(self, elem: GroupElement) -> MobiusElement:
        kind = self.rep.group.kind
        if kind == "trivial" or (not self.jet_images):
            base = self.rep.apply(elem)
            return MobiusElement(Jet.lift(base.a), Jet.lift(base.b),
                                 Jet.lift(base.c), Jet.lift(base.d))
        if kind in ("infinite_cyclic", "cyclic_mod_p"):
            return self._jet_image("t") ** elem.data
        out = None
        for gi, e in elem.data:
            name = self.rep.group.generator_names[gi]
            factor = self._jet_image(name) ** e
            out = factor if out is None else out * factor
        if out is None:
            ident = MobiusElement.identity(self.field)
            return MobiusElement(Jet.lift(ident.a), Jet.lift(ident.b),
                                 Jet.lift(ident.c), Jet.lift(ident.d))
        return out

    def _jet_image(self, name: str) -> MobiusElement:
        jg = self.jet_images[name]
        entries = []
        for x in (jg.a, jg.b, jg.c, jg.d):
            entries.append(x if isinstance(x, Jet) else Jet.lift(x))
        return MobiusElement.from_entries(entries)


def undeformed_family(rep) -> DeformationFamily:
    """The k = 0 family: just the representation, jet-lifted."""
    return DeformationFamily(rep, (), {})


@dataclass(frozen=True)
class StabilizerBasis:
    """Basis of the Lie subalgebra commuting with a representation.

    Vectors are in the coordinates (da, db, dc), i.e. the traceless matrix
    [[da, db], [dc, -da]]; the basis is in reduced echelon form.
    """

    field: Field
    vectors: tuple[tuple[Scalar, Scalar, Scalar], ...]

    @property
    def dimension(self) -> int:
        return len(self.vectors)


def stabilizer_basis(rep) -> StabilizerBasis:
    """Solve g X = X g for all generator images g, X = [[da, db], [dc, -da]]."""
    field = rep.field
    rows = []
    for g in rep.images.values():
        a, b, c, d = g.a, g.b, g.c, g.d
        two = field.scalar(2)
        # entries of g X - X g as linear forms in (da, db, dc):
        # (1,1): b dc - c db
        rows.append([field.zero(), -c, b])
        # (1,2): -2 b da + (a - d) db
        rows.append([-two * b, a - d, field.zero()])
        # (2,1): 2 c da - (a - d) dc
        rows.append([two * c, field.zero(), -(a - d)])
        # (2,2): c db - b dc
        rows.append([field.zero(), c, -b])
    if not rows:
        one, zero = field.one(), field.zero()
        return StabilizerBasis(field, (
            (one, zero, zero), (zero, one, zero), (zero, zero, one)))
    m = ExactMatrix.from_rows(field, rows, col_labels=("da", "db", "dc"))
    basis = null_space(m)
    return StabilizerBasis(field, tuple(basis))
