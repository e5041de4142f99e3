import random

import pytest

from crtorsion.groups import DeckGroup, GroupError


GROUPS = [
    DeckGroup("trivial"),
    DeckGroup("infinite_cyclic"),
    DeckGroup("cyclic_mod_p", p=7),
    DeckGroup("free_on_k", k=2),
]


def _rand_element(group, rng):
    e = group.identity()
    for _ in range(rng.randint(0, 4)):
        for name in group.generator_names:
            if rng.random() < 0.5:
                e = e * group.generator(name) ** rng.randint(-2, 2)
    return e


@pytest.mark.parametrize("group", GROUPS)
def test_group_axioms(group):
    rng = random.Random(3)
    for _ in range(20):
        a, b, c = (_rand_element(group, rng) for _ in range(3))
        assert (a * b) * c == a * (b * c)
        assert a * a.inverse() == group.identity()
        assert a.inverse() * a == group.identity()


def test_cyclic_mod_p_reduction():
    g = DeckGroup("cyclic_mod_p", p=5)
    t = g.generator()
    assert t ** 5 == g.identity()
    assert t ** -1 == t ** 4


def test_free_reduction():
    g = DeckGroup("free_on_k", k=2)
    a, b = g.generator("a"), g.generator("b")
    w = a * b * b.inverse() * a.inverse()
    assert w.is_identity
    assert (a * b).word() == "a*b"


@pytest.mark.parametrize("group", GROUPS)
def test_word_round_trip(group):
    rng = random.Random(11)
    for _ in range(10):
        e = _rand_element(group, rng)
        assert group.element_from_word(e.word()) == e


def test_bad_words():
    g = DeckGroup("infinite_cyclic")
    with pytest.raises(GroupError):
        g.element_from_word("x^2")
    with pytest.raises(GroupError):
        g.element_from_word("t^")
