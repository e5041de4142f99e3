"""Ready-made inputs: S^2 x S^1, a two-tetrahedron 3-sphere, lens spaces.

The S^2 x S^1 triangulation is two triangular prisms over a common pair of
triangle levels, each cut into three tetrahedra; the deck group is Z and
primed vertices are the gauge-t lifts.  The lens space L(p, q) is a
bipyramid over a 2p-gon equator (vertex classes 2 and 3 alternating) with
both apexes in class 4, an axis center in class 1, and the upper surface
glued to the lower one with a 2 pi q / p turn; the deck group is Z/p.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .field import Field, Scalar, number_field, rationals
from .groups import DeckGroup
from .jets import Jet
from .mobius import MobiusElement, NonGenericError
from .representation import (
    DeformationFamily,
    Representation,
    trivial_representation,
)
from .complexes import (
    boundary_edge_slots,
    boundary_slot_pairs,
    interior_edges,
    relative_f3_rows,
)
from .linalg import StaircaseElimination
from .torsion import edge_weight_product, lifted_zeta
from .triangulation import GaugedTriangulation, build_quotient


class CatalogError(ValueError):
    pass


def draw_distinct_rationals(field: Field, rng: random.Random, n: int, bound: int = 97):
    """n pairwise distinct small-height rationals in the field."""
    out = []
    seen = set()
    while len(out) < n:
        s = field.random_rational(rng, bound)
        if s.coeffs not in seen:
            seen.add(s.coeffs)
            out.append(s)
    return out


# ---------------------------------------------------------------------------
# S^2 x S^1

def make_s2xs1(kind: str, lam: Scalar = None, zeta: Sequence[Scalar] = None,
               rng: random.Random = None, field: Field = None):
    """Triangulation, representation and one-parameter deformation family.

    ``kind`` is "nonparabolic" (needs lam outside {0, 1, -1}) or "parabolic".
    Returns (triangulation, representation, deformation_family).
    """
    if field is None:
        field = lam.field if lam is not None else rationals()
    if zeta is None:
        if rng is None:
            raise CatalogError("pass explicit zeta values or an rng to draw them")
        zeta = draw_distinct_rationals(field, rng, 3)
    z = {"1": zeta[0], "2": zeta[1], "3": zeta[2]}
    group = DeckGroup("infinite_cyclic")
    e = group.identity()
    t = group.generator()
    lift = lambda v, g: (v, g)
    tets = [
        # first prism: 1 1'2 3, 2 1'2'3', 1'2 3 3'
        (lift("1", e), lift("1", t), lift("2", e), lift("3", e)),
        (lift("2", e), lift("1", t), lift("2", t), lift("3", t)),
        (lift("1", t), lift("2", e), lift("3", e), lift("3", t)),
        # second prism, mirror orientation
        (lift("1", t), lift("1", e), lift("2", e), lift("3", e)),
        (lift("1", t), lift("2", e), lift("2", t), lift("3", t)),
        (lift("1", t), lift("2", e), lift("3", t), lift("3", e)),
    ]
    tri = build_quotient(field, group, z, tets)

    one, zero = field.one(), field.zero()
    if kind == "nonparabolic":
        if lam is None or lam.is_zero or lam == one or lam == -one:
            raise CatalogError("nonparabolic case needs lambda outside {0, 1, -1}")
        inv = lam.inverse()
        rep = Representation(group, {"t": MobiusElement(lam, zero, zero, inv)})
        tag = "dlambda_over_lambda"
        jet = MobiusElement(
            Jet(lam, {tag: lam}), Jet.lift(zero), Jet.lift(zero), Jet(inv, {tag: -inv}))
        defo = DeformationFamily(rep, (tag,), {"t": jet})
    elif kind == "parabolic":
        rep = Representation(group, {"t": MobiusElement(one, one, zero, one)})
        tag = "ddelta"
        jet = MobiusElement(
            Jet.lift(one), Jet.lift(one), Jet(zero, {tag: one}), Jet.lift(one))
        defo = DeformationFamily(rep, (tag,), {"t": jet})
    else:
        raise CatalogError(f"unknown S^2 x S^1 representation kind {kind!r}")
    return tri, rep, defo


# ---------------------------------------------------------------------------
# Doubled tetrahedron (a 3-sphere on two tetrahedra)

def make_doubled_tetrahedron(zeta: Sequence[Scalar] = None, rng: random.Random = None,
                             field: Field = None):
    """Two tetrahedra glued along all four faces; trivial deck group.

    Returns (triangulation, representation) with the trivial representation.
    """
    if field is None:
        field = zeta[0].field if zeta else rationals()
    if zeta is None:
        if rng is None:
            raise CatalogError("pass explicit zeta values or an rng to draw them")
        zeta = draw_distinct_rationals(field, rng, 4)
    z = {str(i + 1): zeta[i] for i in range(4)}
    group = DeckGroup("trivial")
    e = group.identity()
    tets = [
        (("1", e), ("2", e), ("3", e), ("4", e)),
        (("2", e), ("1", e), ("3", e), ("4", e)),
    ]
    tri = build_quotient(field, group, z, tets)
    return tri, trivial_representation(field)


# ---------------------------------------------------------------------------
# Lens spaces

def minimal_polynomial_2cos(p: int):
    """Monic minimal polynomial of 2 cos(2 pi / p) for an odd prime p,
    coefficients low degree first."""
    if p < 3 or p % 2 == 0:
        raise CatalogError("closed form implemented for odd primes only")
    k = (p - 1) // 2
    # V_j(x) = 2 cos(j theta) as a polynomial in x = 2 cos(theta)
    v_prev = [Fraction(2)]
    v_cur = [Fraction(0), Fraction(1)]
    total = [Fraction(1)]  # the constant 1
    for _ in range(k):
        total = _padd(total, v_cur)
        v_prev, v_cur = v_cur, _psub(_pshift(v_cur), v_prev)
    return tuple(total)


def _pshift(a):
    return [Fraction(0)] + list(a)


def _padd(a, b):
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]


def _psub(a, b):
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)]


def lens_field(p: int) -> Field:
    if p == 2:
        return rationals()
    return number_field(minimal_polynomial_2cos(p))


def lens_trace(field: Field, p: int, rep_root: int = 1) -> Scalar:
    """2 cos(2 pi rep_root / p) inside the lens field."""
    if p == 2:
        return field.zero()
    if not (1 <= rep_root <= (p - 1) // 2):
        raise CatalogError(f"rep_root must lie in 1..{(p - 1) // 2}")
    if field.degree > 1:
        x = field.generator()
    else:
        x = field.scalar(-minimal_polynomial_2cos(p)[0])  # monic degree-1 modulus
    v_prev, v_cur = field.scalar(2), x
    for _ in range(rep_root - 1):
        v_prev, v_cur = v_cur, x * v_cur - v_prev
    return v_cur


def lens_representation(p: int, rep_root: int = 1, field: Field = None) -> Representation:
    """An order-p elliptic image of the Z/p generator: [[c, -1], [1, 0]]."""
    if field is None:
        field = lens_field(p)
    c = lens_trace(field, p, rep_root)
    one, zero = field.one(), field.zero()
    group = DeckGroup("cyclic_mod_p", p=p)
    return Representation(group, {"t": MobiusElement(c, -one, one, zero)})


@dataclass(frozen=True)
class LensData:
    tri: GaugedTriangulation
    rep: Representation
    distinguished: tuple[int, int]
    boundary_slots: tuple  # 12 QuotientEdge slots; doubled edges repeat


def make_lens(p: int, q: int, n: int, zeta: Sequence[Scalar] = None,
              rep_root: int = 1, rng: random.Random = None,
              field: Field = None) -> LensData:
    """L(p, q) with the distinguished unknot chain of class n.

    The chain is the pair of identically oriented upper tetrahedra whose
    equator edges differ by a turn of n-th order; the 12 boundary slots
    are the edges of those two tetrahedra (two of them, the axis edge and
    the equator class, are doubled).
    """
    if p < 2 or q % p == 0 or _igcd(p, q) != 1:
        raise CatalogError("p, q must be coprime with p >= 2 and q nonzero mod p")
    if not (1 <= n <= p - 1):
        raise CatalogError(f"unknot class n must lie in 1..{p - 1}")
    rep = lens_representation(p, rep_root, field)
    field = rep.field
    if zeta is None:
        if rng is None:
            raise CatalogError("pass explicit zeta values or an rng to draw them")
        zeta = draw_distinct_rationals(field, rng, 4)
    z = {str(i + 1): zeta[i] for i in range(4)}
    group = rep.group
    t = group.generator()
    u = pow(q, -1, p)
    e = group.identity()

    def equator(k: int):
        """Lift of the k-th equator vertex: class 2 for even k, 3 for odd."""
        m, parity = divmod(k % (2 * p), 2)
        return (("2", "3")[parity], t ** ((u * m) % p))

    uppers = []
    lowers = []
    for k in range(2 * p):
        ek, ek1 = equator(k), equator(k + 1)
        uppers.append((("1", e), ("4", e), ek, ek1))
        lowers.append((("4", t ** (p - 1)), ("1", e), ek, ek1))
    tri = build_quotient(field, group, z, uppers + lowers)
    if tri.n0 != 4 or tri.n3 != 4 * p or tri.n1 != 4 * p + 4:
        raise CatalogError(
            f"lens reconstruction count audit failed: N0={tri.n0} N1={tri.n1} N3={tri.n3}")
    distinguished = (0, 2 * n)
    n_interior = len(interior_edges(tri, distinguished))
    if n_interior + 4 != 4 * p - 2:
        raise CatalogError(
            f"relative dimension audit failed: {n_interior} interior edges for p={p}")
    slots = boundary_edge_slots(tri, distinguished)
    return LensData(tri, rep, distinguished, slots)


def _igcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


# ---------------------------------------------------------------------------
# Table search over all boundary-edge selections

# Monomials attached to the published invariant rows: exponents of
# (zeta_i - zeta_j) in the coordinates of the distinguished tetrahedron.
MONOMIALS = (
    {},
    {(1, 2): 2, (3, 4): -2},
    {(2, 4): 2, (1, 3): -2},
    {(1, 3): 1, (1, 4): 1, (2, 3): -1, (2, 4): -1},
    {(2, 3): 1, (3, 4): 1, (2, 4): 2, (1, 4): -1, (1, 2): -1, (1, 3): -2},
)

KNOWN_TABLE = {
    (7, 1): (((6, 90, 300), 0), ((49, 147, 245), 1), ((294, 490, 588), 2),
             ((1, 27, 125), 3), ((42, 210, 420), 4)),
    (7, 2): (((48, 20, 6), 0), ((196, 98, 49), 1), ((147, 245, 294), 2),
             ((64, 8, 1), 3), ((84, 70, 42), 4)),
}


def monomial_value(zeta: dict, exponents: dict) -> Scalar:
    field = next(iter(zeta.values())).field
    out = field.one()
    for (i, j), e in exponents.items():
        out = out * (zeta[str(i)] - zeta[str(j)]) ** e
    return out


@dataclass
class TableSearchResult:
    p: int
    q: int
    rep_root: int
    zeta: dict
    vectors: dict          # D slot-index tuple -> tuple of Scalars over n values
    normalized: dict       # D -> (monomial index, tuple of Fractions) when rational
    row_matches: dict      # row index -> list of D slot-index tuples
    square_dimension: int


def table1_search(p: int, q: int, rep_root: int = 1, seed: int = 0,
                  n_values: Sequence[int] = (1, 2, 3), zeta=None,
                  parallelism: int = 1) -> TableSearchResult:
    """Evaluate the relative invariant for every 4-subset of boundary slots.

    For each subset the invariant vector over ``n_values`` is divided by
    each candidate monomial; subsets whose normalized vector is a rational
    constant vector are matched against the published rows (up to one
    global sign).
    """
    n_values = tuple(n for n in n_values if 1 <= n <= p - 1)
    if not n_values:
        raise CatalogError(f"no valid unknot classes for p={p}")
    rng = random.Random(seed)
    for attempt in range(24):
        try:
            return _table1_search_once(p, q, rep_root, rng, n_values, zeta, parallelism)
        except NonGenericError:
            if zeta is not None:
                raise
            continue
    raise CatalogError("could not find generic coordinates for the table search")


def _table1_search_once(p, q, rep_root, rng, n_values, zeta, parallelism):
    if zeta is None:
        field = lens_field(p)
        zeta = draw_distinct_rationals(field, rng, 4)
    per_n = {}
    base_zeta = None
    for n in n_values:
        lens = make_lens(p, q, n, zeta=zeta, rep_root=rep_root)
        cols, interior_rows, slots, slot_rows = relative_f3_rows(
            lens.tri, lens.rep, lens.distinguished)
        stair = StaircaseElimination(
            lens.tri.field, [r for _, r in interior_rows], len(cols))
        reduced = [stair.reduce_row(r) for r in slot_rows]
        # weight of every exterior cell: interior edges at family lifts,
        # boundary slots at their own lifted pairs
        all_weight = lens.tri.field.one()
        for e in interior_edges(lens.tri, lens.distinguished):
            u, v = lens.tri.edge_lifts[e.key]
            d = lifted_zeta(lens.tri, lens.rep, u) - lifted_zeta(lens.tri, lens.rep, v)
            all_weight = all_weight * d * d
        slot_w2 = []
        for u, v in boundary_slot_pairs(lens.tri, lens.distinguished):
            d = lifted_zeta(lens.tri, lens.rep, u) - lifted_zeta(lens.tri, lens.rep, v)
            slot_w2.append(d * d)
            all_weight = all_weight * d * d
        per_n[n] = (lens, stair, reduced, all_weight, slot_w2)
        base_zeta = lens.tri.zeta
    square_dim = 4 * p - 2

    # D-subsets are positions on the abstract boundary torus; each class n
    # realizes position i as its own arc row.
    vectors = {}
    for combo in itertools.combinations(range(12), 4):
        vec = []
        for n in n_values:
            lens, stair, reduced, all_weight, slot_w2 = per_n[n]
            det = stair.determinant_of([reduced[i] for i in combo])
            if det.is_zero:
                vec.append(lens.tri.field.zero())
                continue
            weight = all_weight
            for i in combo:
                weight = weight / slot_w2[i]
            vec.append(det / weight)
        vectors[combo] = tuple(vec)

    normalized = {}
    for combo, vec in vectors.items():
        for mi, mono in enumerate(MONOMIALS):
            mval = monomial_value(base_zeta, mono)
            quots = [v / mval for v in vec]
            if all(s.is_rational() for s in quots):
                normalized[combo] = (mi, tuple(s.rational_value() for s in quots))
                break

    row_matches = {}
    for (tp, tq), rows in KNOWN_TABLE.items():
        if (tp, tq) != (p, q):
            continue
        for ri, (target, mi) in enumerate(rows):
            hits = []
            for combo, (cmi, quots) in normalized.items():
                if cmi != mi:
                    continue
                tgt = tuple(Fraction(x) for x in target)
                neg = tuple(-x for x in tgt)
                if quots == tgt or quots == neg:
                    hits.append(combo)
            row_matches[ri] = hits
    return TableSearchResult(p, q, rep_root, base_zeta, vectors, normalized,
                             row_matches, square_dim)
