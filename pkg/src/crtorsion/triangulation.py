"""Quotient triangulations of closed oriented 3-manifolds with deck gauges.

Each tetrahedron stores four lifted vertices (vertex id plus deck-group
gauge); the listed order is the positive orientation.  Validation checks
that lifted faces pair up with opposite induced orientations, derives the
quotient edges with their stars, and audits the Euler characteristic.
Pachner moves operate on one lifted representative and re-derive the
quotient.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .field import Field, Scalar
from .groups import DeckGroup, GroupElement


class TriangulationError(ValueError):
    pass


@dataclass(frozen=True)
class LiftedVertex:
    vertex: str
    gauge: GroupElement

    def translated(self, g: GroupElement) -> "LiftedVertex":
        return LiftedVertex(self.vertex, g * self.gauge)

    def sort_key(self):
        return (self.vertex, _gauge_key(self.gauge))

    def __str__(self) -> str:
        return f"{self.vertex}@{self.gauge.word()}"


def _gauge_key(g: GroupElement):
    if isinstance(g.data, int):
        return (abs(g.data), 0 if g.data >= 0 else 1)
    return (len(g.data), g.data)


@dataclass(frozen=True)
class QuotientEdge:
    """Canonical lifted endpoint pair: first gauge is the identity."""

    a: LiftedVertex
    b: LiftedVertex

    @property
    def key(self) -> str:
        return f"{self.a}:{self.b}"

    def sort_key(self):
        return (self.a.sort_key(), self.b.sort_key())

    def __str__(self) -> str:
        return self.key


@dataclass(frozen=True)
class EdgeIncidence:
    tet: int
    gamma: GroupElement  # gamma * (stored lift of tet) contains the canonical edge lift
    slots: tuple[int, int, int, int]  # even arrangement; first two span the edge


def canonical_edge(u: LiftedVertex, v: LiftedVertex):
    """Canonical form of the quotient edge through u, v and the translation
    gamma with gamma * {u, v} = {canonical.a, canonical.b}."""
    if u == v:
        raise TriangulationError(f"degenerate edge at {u}")
    cands = []
    for first, second in ((u, v), (v, u)):
        delta = first.gauge.inverse()
        pair = (first.translated(delta), second.translated(delta))
        cands.append(((pair[0].sort_key(), pair[1].sort_key()), pair, delta))
    cands.sort(key=lambda c: c[0])
    _, pair, delta = cands[0]
    return QuotientEdge(pair[0], pair[1]), delta


def _canonical_face(points: Sequence[LiftedVertex]):
    """Canonical key of an unordered lifted triangle up to left translation,
    and the translation used."""
    best = None
    for p in points:
        delta = p.gauge.inverse()
        moved = tuple(sorted((q.translated(delta) for q in points), key=LiftedVertex.sort_key))
        key = tuple(m.sort_key() for m in moved)
        if best is None or key < best[0]:
            best = (key, delta)
    return best


def _perm_parity(seq, target) -> int:
    """Parity (0/1) of the permutation mapping ``seq`` onto ``target``."""
    idx = [target.index(x) for x in seq]
    parity = 0
    for i in range(len(idx)):
        for j in range(i + 1, len(idx)):
            if idx[i] > idx[j]:
                parity ^= 1
    return parity


@dataclass(frozen=True)
class MoveRecord:
    kind: str  # "23" or "14"
    points: tuple[LiftedVertex, ...]  # roles 1,2,3,4,5


class GaugedTriangulation:
    """Validated quotient triangulation; treat instances as immutable.

    Besides the canonical quotient edges, the triangulation carries one
    *family lift* per edge: the lifted endpoint pair the edge-weight
    normalization is evaluated at.  On a fresh build it is the edge's first
    incidence; Pachner moves keep the lifts of surviving edges and give new
    edges the lift of the move configuration.
    """

    def __init__(self, field: Field, group: DeckGroup, zeta: dict,
                 tets: Sequence[Sequence[LiftedVertex]],
                 edge_lifts: dict = None):
        self.field = field
        self.group = group
        self.zeta = dict(zeta)
        self.tets = tuple(tuple(t) for t in tets)
        self.vertex_ids = tuple(sorted(self.zeta))
        self._validate_slots()
        self._pair_faces()
        self._derive_edges()
        self._assign_edge_lifts(edge_lifts or {})
        self._audit_counts()

    # -- derived counts ----------------------------------------------------
    @property
    def n0(self) -> int:
        return len(self.vertex_ids)

    @property
    def n1(self) -> int:
        return len(self.edges)

    @property
    def n2(self) -> int:
        return len(self.face_pairs)

    @property
    def n3(self) -> int:
        return len(self.tets)

    # -- validation --------------------------------------------------------
    def _validate_slots(self):
        for ti, tet in enumerate(self.tets):
            if len(tet) != 4:
                raise TriangulationError(f"tetrahedron {ti} does not have 4 slots")
            for lv in tet:
                if lv.vertex not in self.zeta:
                    raise TriangulationError(
                        f"tetrahedron {ti} references undeclared vertex {lv.vertex!r}")
                if lv.gauge.group != self.group:
                    raise TriangulationError(f"tetrahedron {ti} gauge from wrong group")
            if len(set(tet)) != 4:
                raise TriangulationError(
                    f"tetrahedron {ti} has two slots at the same cover point")

    def _pair_faces(self):
        slots_by_key: dict = {}
        for ti, tet in enumerate(self.tets):
            for m in range(4):
                pts = tuple(tet[i] for i in range(4) if i != m)
                key, delta = _canonical_face(pts)
                moved = tuple(p.translated(delta) for p in pts)
                canon_sorted = tuple(sorted(moved, key=LiftedVertex.sort_key))
                parity = _perm_parity(moved, canon_sorted) ^ (m & 1)
                slots_by_key.setdefault(key, []).append((ti, m, delta, parity))
        # Vertex-identical triangles may occur several times (the quotient is
        # not a simplicial complex), so a face class can hold 2k slots; it
        # must split into k gluable pairs of opposite induced orientation.
        pairs = []
        self._face_slot_partner = {}
        for key, slots in slots_by_key.items():
            pos = [s for s in slots if s[3] == 0]
            neg = [s for s in slots if s[3] == 1]
            if len(pos) != len(neg):
                where = ", ".join(f"tet {t} face {m}" for t, m, _, _ in slots)
                raise TriangulationError(
                    f"unmatched face orientations ({len(pos)} vs {len(neg)}) at: {where}")
            for (t1, m1, d1, _), (t2, m2, d2, _) in zip(pos, neg):
                pairs.append((key, (t1, m1, d1), (t2, m2, d2)))
                self._face_slot_partner[(t1, m1)] = ((t2, m2, d2), d1)
                self._face_slot_partner[(t2, m2)] = ((t1, m1, d1), d2)
        self.face_pairs = tuple(pairs)

    def _derive_edges(self):
        stars: dict[QuotientEdge, list[EdgeIncidence]] = {}
        for ti, tet in enumerate(self.tets):
            for p in range(4):
                for q in range(p + 1, 4):
                    edge, delta = canonical_edge(tet[p], tet[q])
                    if tet[p].translated(delta) == edge.a:
                        i, j = p, q
                    else:
                        i, j = q, p
                    rest = [r for r in range(4) if r not in (p, q)]
                    arrangement = (i, j, rest[0], rest[1])
                    if _perm_parity(arrangement, (0, 1, 2, 3)) != 0:
                        arrangement = (i, j, rest[1], rest[0])
                    stars.setdefault(edge, []).append(EdgeIncidence(ti, delta, arrangement))
        self.edges = tuple(sorted(stars, key=QuotientEdge.sort_key))
        self.edge_stars = {e: tuple(stars[e]) for e in self.edges}
        self._edge_by_key = {e.key: e for e in self.edges}

    def _assign_edge_lifts(self, given: dict):
        """Family lift per edge: the given one if any, else first incidence."""
        lifts = {}
        for ti, tet in enumerate(self.tets):
            for p in range(4):
                for q in range(p + 1, 4):
                    edge, _ = canonical_edge(tet[p], tet[q])
                    if edge.key not in lifts:
                        lifts[edge.key] = (tet[p], tet[q])
        for key, pair in given.items():
            if key not in lifts:
                raise TriangulationError(f"family lift given for unknown edge {key!r}")
            got, _ = canonical_edge(*pair)
            if got.key != key:
                raise TriangulationError(f"family lift {pair} does not cover edge {key!r}")
            lifts[key] = tuple(pair)
        self.edge_lifts = lifts

    def _audit_counts(self):
        used = {lv.vertex for tet in self.tets for lv in tet}
        unused = set(self.vertex_ids) - used
        if unused:
            raise TriangulationError(f"vertices declared but unused: {sorted(unused)}")
        chi = self.n0 - self.n1 + self.n2 - self.n3
        if chi != 0:
            raise TriangulationError(f"Euler characteristic {chi}, expected 0")

    # -- queries -----------------------------------------------------------
    def edge_for(self, u: LiftedVertex, v: LiftedVertex) -> QuotientEdge:
        edge, _ = canonical_edge(u, v)
        if edge not in self.edge_stars:
            raise TriangulationError(f"edge {edge} not in triangulation")
        return edge

    def edge_by_key(self, key: str) -> QuotientEdge:
        try:
            return self._edge_by_key[key]
        except KeyError:
            raise TriangulationError(f"edge {key!r} not in triangulation") from None

    def edge_star(self, edge: QuotientEdge) -> tuple[EdgeIncidence, ...]:
        try:
            return self.edge_stars[edge]
        except KeyError:
            raise TriangulationError(f"edge {edge} not in triangulation") from None

    # -- rebuilding helpers --------------------------------------------------
    def with_zeta(self, zeta: dict) -> "GaugedTriangulation":
        return GaugedTriangulation(self.field, self.group, zeta, self.tets,
                                   edge_lifts=self.edge_lifts)

    def regauged(self, tet_index: int, g: GroupElement) -> "GaugedTriangulation":
        tets = [list(t) for t in self.tets]
        tets[tet_index] = [lv.translated(g) for lv in tets[tet_index]]
        return GaugedTriangulation(self.field, self.group, self.zeta, tets)

    def replaced_tets(self, remove: Iterable[int], add: Sequence[Sequence[LiftedVertex]],
                      zeta: dict = None) -> "GaugedTriangulation":
        """New triangulation with tetrahedra swapped; surviving edges keep
        their family lifts, new edges pick theirs up from the new tetrahedra."""
        removed = set(remove)
        tets = [t for i, t in enumerate(self.tets) if i not in removed]
        tets.extend(tuple(t) for t in add)
        out = GaugedTriangulation(self.field, self.group, zeta or self.zeta, tets)
        for key, pair in self.edge_lifts.items():
            if key in out.edge_lifts:
                out.edge_lifts[key] = pair
        return out


def build_quotient(field: Field, group: DeckGroup, zeta: dict,
                   tets: Sequence[Sequence], ) -> GaugedTriangulation:
    """Validate raw tetrahedron data into a GaugedTriangulation.

    Tetrahedron slots may be LiftedVertex values or (vertex_id, gauge)
    pairs; zeta maps vertex ids to base coordinates.
    """
    norm = []
    for tet in tets:
        slots = []
        for s in tet:
            if isinstance(s, LiftedVertex):
                slots.append(s)
            else:
                vid, gauge = s
                slots.append(LiftedVertex(str(vid), gauge))
        norm.append(slots)
    return GaugedTriangulation(field, group, zeta, norm)


# ---------------------------------------------------------------------------
# Pachner moves

def _face_first_arrangement(tet: Sequence[LiftedVertex], m: int) -> tuple[LiftedVertex, ...]:
    """Even rearrangement of the stored order with the face (omit m) first."""
    rest = [tet[i] for i in range(4) if i != m]
    arr = rest + [tet[m]]
    if (3 - m) % 2 == 1:
        arr[0], arr[1] = arr[1], arr[0]
    return tuple(arr)


def pachner_23(tri: GaugedTriangulation, tet_index: int, face_slot: int):
    """Replace two tetrahedra sharing the given face by three around a new edge.

    Returns (new_triangulation, MoveRecord); record points are the five
    lifted vertices in the roles (1, 2, 3, 4, 5)."""
    (partner, delta) = tri._face_slot_partner[(tet_index, face_slot)]
    (t2, m2, delta2) = partner
    if t2 == tet_index:
        raise TriangulationError("face is self-glued: the two incidences are one tetrahedron")
    gamma = delta.inverse() * delta2
    arr1 = _face_first_arrangement(tri.tets[tet_index], face_slot)
    p1, p2, p3, p4 = arr1
    p5 = tri.tets[t2][m2].translated(gamma)
    points = (p1, p2, p3, p4, p5)
    if len(set(points)) != 5:
        raise TriangulationError("2-3 move needs five distinct cover points")
    arr2 = tuple(x.translated(gamma) for x in _face_first_arrangement(tri.tets[t2], m2))
    assert set(arr2[:3]) == {p1, p2, p3} and arr2[3] == p5
    new_tets = [(p1, p2, p5, p4), (p2, p3, p5, p4), (p3, p1, p5, p4)]
    out = tri.replaced_tets([tet_index, t2], new_tets)
    return out, MoveRecord("23", points)


def pachner_14(tri: GaugedTriangulation, tet_index: int, zeta_new: Scalar,
               name: str = None):
    """Star the given tetrahedron at a new interior vertex with coordinate zeta_new."""
    if name is None:
        k = 0
        while f"w{k}" in tri.zeta:
            k += 1
        name = f"w{k}"
    elif name in tri.zeta:
        raise TriangulationError(f"vertex {name!r} already exists")
    p1, p2, p3, p4 = tri.tets[tet_index]
    p5 = LiftedVertex(name, tri.group.identity())
    zeta = dict(tri.zeta)
    zeta[name] = zeta_new
    new_tets = [(p1, p2, p3, p5), (p1, p2, p5, p4), (p2, p3, p5, p4), (p3, p1, p5, p4)]
    out = tri.replaced_tets([tet_index], new_tets, zeta=zeta)
    return out, MoveRecord("14", (p1, p2, p3, p4, p5))


def edge_link_cycle(tri: GaugedTriangulation, edge: QuotientEdge):
    """Star incidences of an edge in cyclic link order.

    The lift of incidence c reads (A, B, K_c, L_c) in the frame of the
    canonical edge (A, B); the walk leaves each cover tetrahedron through
    its (A, B, L) face, crossing to the glued partner.  Following the
    stored face pairing keeps the walk well defined even when distinct
    cover triangles share all three vertices.
    """
    star = tri.edge_star(edge)
    index = {(inc.tet, inc.gamma): inc for inc in star}
    if len(index) != len(star):
        raise TriangulationError(f"edge {edge} has a non-manifold star")

    def successor(inc):
        m = inc.slots[2]  # omitting K leaves the exit face (A, B, L)
        (t2, _, d2), d1 = tri._face_slot_partner[(inc.tet, m)]
        eta = inc.gamma * d1.inverse() * d2
        try:
            return index[(t2, eta)]
        except KeyError:
            raise TriangulationError(
                f"edge {edge} link walk left the star at tet {inc.tet}") from None

    start = star[0]
    cycle = [start]
    seen = {(start.tet, start.gamma)}
    cur = start
    for _ in range(len(star) - 1):
        cur = successor(cur)
        if (cur.tet, cur.gamma) in seen:
            raise TriangulationError(f"edge {edge} link does not close into one cycle")
        seen.add((cur.tet, cur.gamma))
        cycle.append(cur)
    if successor(cur) != start:
        raise TriangulationError(f"edge {edge} link does not close into one cycle")
    return cycle


def pachner_32(tri: GaugedTriangulation, edge: QuotientEdge):
    """Inverse of the 2-3 move: collapse the star of a 3-valent edge."""
    star = tri.edge_star(edge)
    if len(star) != 3:
        raise TriangulationError(f"edge {edge} has star size {len(star)}, need 3")
    if len({inc.tet for inc in star}) != 3:
        raise TriangulationError("3-2 move needs three distinct tetrahedra")
    cycle = edge_link_cycle(tri, edge)
    a, b = edge.a, edge.b
    xs = []
    for inc in cycle:
        lifted = [tri.tets[inc.tet][s].translated(inc.gamma) for s in inc.slots]
        xs.append(lifted[2])
    x1, x2, x3 = xs
    if len({x1, x2, x3}) != 3:
        raise TriangulationError("edge link vertices are not distinct")
    new_tets = [(x1, x2, x3, b), (a, x1, x2, x3)]
    out = tri.replaced_tets([inc.tet for inc in star], new_tets)
    return out, MoveRecord("32", (x1, x2, x3, b, a))


def random_pachner_move(tri: GaugedTriangulation, rng: random.Random,
                        zeta_sampler: Callable[[random.Random], Scalar]):
    """Apply one random 2-3 or 1-4 move; returns (new_tri, MoveRecord).

    2-3 moves are only attempted on cover-adjacent face pairs (the partner
    lift already shares the face), the configuration the torsion-ratio
    formula speaks about."""
    for _ in range(60):
        kind = rng.choice(("23", "14"))
        ti = rng.randrange(tri.n3)
        try:
            if kind == "23":
                m = rng.randrange(4)
                (_, _, delta2), delta = tri._face_slot_partner[(ti, m)]
                if not (delta.inverse() * delta2).is_identity:
                    continue
                return pachner_23(tri, ti, m)
            return pachner_14(tri, ti, zeta_sampler(rng))
        except TriangulationError:
            continue
    raise TriangulationError("no applicable random move found")
