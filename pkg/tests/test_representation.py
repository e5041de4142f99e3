import random
from fractions import Fraction

import pytest

from crtorsion.catalog import lens_representation
from crtorsion.field import rationals
from crtorsion.groups import DeckGroup
from crtorsion.jets import Jet
from crtorsion.mobius import MobiusElement
from crtorsion.representation import (
    DeformationFamily,
    Representation,
    RepresentationError,
    stabilizer_basis,
    trivial_representation,
    undeformed_family,
)

Q = rationals()


def _diag_rep(lam):
    group = DeckGroup("infinite_cyclic")
    zero = Q.zero()
    return Representation(group, {"t": MobiusElement(lam, zero, zero, lam.inverse())})


def test_stabilizer_of_diagonal_is_da():
    rep = _diag_rep(Q.scalar(Fraction(3, 2)))
    stab = stabilizer_basis(rep)
    assert stab.dimension == 1
    assert stab.vectors[0] == (Q.one(), Q.zero(), Q.zero())


def test_stabilizer_of_parabolic_is_db():
    group = DeckGroup("infinite_cyclic")
    one, zero = Q.one(), Q.zero()
    rep = Representation(group, {"t": MobiusElement(one, one, zero, one)})
    stab = stabilizer_basis(rep)
    assert stab.dimension == 1
    assert stab.vectors[0] == (Q.zero(), Q.one(), Q.zero())


def test_stabilizer_of_trivial_is_full():
    rep = trivial_representation(Q)
    assert stabilizer_basis(rep).dimension == 3


def test_cyclic_order_validation():
    rep = lens_representation(7)
    power = rep.apply(rep.group.generator() ** 7)
    assert power.eq_up_to_sign(MobiusElement.identity(rep.field))
    bad_group = DeckGroup("cyclic_mod_p", p=3)
    lam = Q.scalar(2)
    with pytest.raises(RepresentationError):
        Representation(bad_group, {"t": MobiusElement(lam, Q.zero(), Q.zero(), lam.inverse())})


def test_homomorphic_extension():
    rep = _diag_rep(Q.scalar(2))
    t = rep.group.generator()
    g = rep.apply(t ** 3)
    assert g.a == Q.scalar(8)
    assert rep.apply(t ** -2).a == Q.scalar(Fraction(1, 4))


def test_deformation_value_parts_must_match():
    rep = _diag_rep(Q.scalar(2))
    zero = Q.zero()
    bad = MobiusElement(Jet(Q.scalar(3), {"s": Q.one()}), Jet.lift(zero),
                        Jet.lift(zero), Jet(Q.scalar(Fraction(1, 3)), {}))
    with pytest.raises(RepresentationError):
        DeformationFamily(rep, ("s",), {"t": bad})


def test_undeformed_family_applies_like_rep():
    rep = _diag_rep(Q.scalar(2))
    fam = undeformed_family(rep)
    t = rep.group.generator()
    g = fam.apply(t ** 2)
    assert g.a.value == Q.scalar(4)
    assert not g.a.partials
