"""Assembly of the chain complex from a triangulation and a representation.

The complex has six based spaces

    D0 = stabilizer algebra        D3 = (dphi), one per edge
    D1 = (dz) + (dg)               D4 = (dalpha) + (dbeta) + (dg)*
    D2 = (dy), one per tetrahedron D5 = dual stabilizer algebra

and five matrices; ``maps[i]`` sends D_i to D_{i+1} (rows are target
labels).  Rows of the middle maps come from jet evaluation: main-vertex
coordinates are seeded with independent infinitesimals, transported to
every lifted slot through the (deformed) representation, and the exact
partials are read off.  The edge/tetrahedron pairing map only needs the
unperturbed transported coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .field import Field, Scalar
from .groups import GroupElement
from .jets import Jet
from .linalg import ExactMatrix
from .mobius import NonGenericError, VertexCoords, cross_ratio, normalized_length
from .representation import DeformationFamily, StabilizerBasis, stabilizer_basis, undeformed_family
from .triangulation import GaugedTriangulation, LiftedVertex, QuotientEdge


@dataclass(frozen=True)
class TwistedComplex:
    field: Field
    spaces: tuple[tuple, ...]      # label tuples for D0..D5
    maps: tuple[ExactMatrix, ...]  # f1..f5

    def f(self, i: int) -> ExactMatrix:
        return self.maps[i - 1]

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.spaces)

    def chain_defects(self) -> list[bool]:
        """Whether each consecutive product f_{i+1} f_i vanishes."""
        return [(self.maps[i + 1] * self.maps[i]).is_zero for i in range(4)]


class _CoordCache:
    """Transported coordinates, jet-valued and value-level, per lifted vertex."""

    def __init__(self, tri: GaugedTriangulation, defo: DeformationFamily):
        self.tri = tri
        self.defo = defo
        self.field = tri.field
        one = self.field.one()
        self.z_seed = {}
        self.h_seed = {}
        for v in tri.vertex_ids:
            self.z_seed[v] = Jet.seed(tri.zeta[v], f"z:{v}")
            # h = kappa (1 + 2 eps): the alpha coordinate is dh / (2 kappa)
            self.h_seed[v] = Jet(one, {f"a:{v}": self.field.scalar(2)})
        self._mob: dict[GroupElement, object] = {}
        self._coords: dict[LiftedVertex, VertexCoords] = {}

    def mobius(self, gauge: GroupElement):
        if gauge not in self._mob:
            self._mob[gauge] = self.defo.apply(gauge)
        return self._mob[gauge]

    def coords(self, lv: LiftedVertex) -> VertexCoords:
        if lv not in self._coords:
            base = VertexCoords(self.z_seed[lv.vertex], self.h_seed[lv.vertex])
            try:
                self._coords[lv] = self.mobius(lv.gauge).apply(base)
            except NonGenericError as exc:
                raise NonGenericError(f"lift {lv}: {exc}") from exc
        return self._coords[lv]

    def zeta(self, lv: LiftedVertex) -> Scalar:
        return self.coords(lv).z.value


def build_twisted_complex(tri: GaugedTriangulation, rep, defo: DeformationFamily = None,
                          stab: StabilizerBasis = None) -> TwistedComplex:
    field = tri.field
    if defo is None:
        defo = undeformed_family(rep)
    if stab is None:
        stab = stabilizer_basis(rep)
    cache = _CoordCache(tri, defo)

    d0 = tuple(("stab", i) for i in range(stab.dimension))
    d1 = tuple(("dz", v) for v in tri.vertex_ids) + tuple(("dg", t) for t in defo.tags)
    d2 = tuple(("dy", ti) for ti in range(tri.n3))
    d3 = tuple(("dphi", e.key) for e in tri.edges)
    d4 = (tuple(("dalpha", v) for v in tri.vertex_ids)
          + tuple(("dbeta", v) for v in tri.vertex_ids)
          + tuple(("dgstar", t) for t in defo.tags))
    d5 = tuple(("stabdual", i) for i in range(stab.dimension))

    f1 = _build_f1(tri, defo, stab, d0, d1)
    f2 = _build_f2(tri, defo, cache, d1, d2)
    f3 = _build_f3(tri, cache, d2, d3)
    f4 = _build_f4(tri, defo, cache, d3, d4)
    f5 = _build_f5(tri, stab, d4, d5)
    return TwistedComplex(field, (d0, d1, d2, d3, d4, d5), (f1, f2, f3, f4, f5))


def _build_f1(tri, defo, stab, d0, d1) -> ExactMatrix:
    field = tri.field
    zero = field.zero()
    rows = []
    for label in d1:
        kind, name = label
        row = []
        for (xa, xb, xc) in stab.vectors:
            if kind == "dz":
                z = tri.zeta[name]
                row.append(field.scalar(2) * z * xa + xb - z * z * xc)
            else:
                # stabilizer conjugation fixes the representation class
                row.append(zero)
        rows.append(row)
    return ExactMatrix.from_rows(field, rows, d1, d0)


def _build_f2(tri, defo, cache, d1, d2) -> ExactMatrix:
    field = tri.field
    zero = field.zero()
    rows = []
    for ti, tet in enumerate(tri.tets):
        try:
            jz = [cache.coords(lv).z for lv in tet]
            x, _, _ = cross_ratio(*jz)
            dlog = x.dlog()
        except NonGenericError as exc:
            raise NonGenericError(f"tetrahedron {ti}: {exc}") from exc
        zv = [j.value for j in jz]
        norm = ((zv[0] - zv[2]) * (zv[3] - zv[1])).inverse()
        row = []
        for label in d1:
            kind, name = label
            tag = f"z:{name}" if kind == "dz" else name
            part = dlog.get(tag)
            row.append(zero if part is None else part * norm)
        rows.append(row)
    return ExactMatrix.from_rows(field, rows, d2, d1)


def _build_f3(tri, cache, d2, d3) -> ExactMatrix:
    field = tri.field
    zero = field.zero()
    rows = []
    for edge in tri.edges:
        row = [zero] * tri.n3
        for inc in tri.edge_stars[edge]:
            zv = [cache.zeta(lv) for lv in tri.tets[inc.tet]]
            i, j, k, l = inc.slots
            row[inc.tet] = row[inc.tet] + (zv[i] - zv[j]) * (zv[k] - zv[l])
        rows.append(row)
    return ExactMatrix.from_rows(field, rows, d3, d2)


def _edge_phi(cache, edge: QuotientEdge):
    """Normalized squared length of the canonical edge lift, jet-valued."""
    ca = cache.coords(edge.a)
    cb = cache.coords(edge.b)
    return normalized_length(ca, cb, ca.z.value, cb.z.value, ca.h.value, cb.h.value)


def _build_f4(tri, defo, cache, d3, d4) -> ExactMatrix:
    field = tri.field
    zero = field.zero()
    cols = []
    for edge in tri.edges:
        try:
            phi = _edge_phi(cache, edge)
        except NonGenericError as exc:
            raise NonGenericError(f"edge {edge}: {exc}") from exc
        col = []
        for label in d4:
            kind, name = label
            if kind == "dalpha":
                tag = f"a:{name}"
            elif kind == "dbeta":
                tag = f"z:{name}"
            else:
                tag = name
            part = phi.partials.get(tag)
            col.append(zero if part is None else part)
        cols.append(col)
    rows = [[cols[j][i] for j in range(len(cols))] for i in range(len(d4))]
    return ExactMatrix.from_rows(field, rows, d4, d3)


def _build_f5(tri, stab, d4, d5) -> ExactMatrix:
    field = tri.field
    zero = field.zero()
    rows = []
    for i, (xa, xb, xc) in enumerate(stab.vectors):
        row = []
        for label in d4:
            kind, name = label
            if kind == "dalpha":
                z = tri.zeta[name]
                row.append(-xa + z * xc)
            elif kind == "dbeta":
                z = tri.zeta[name]
                row.append(field.scalar(2) * z * xa + xb - z * z * xc)
            else:
                row.append(zero)
        rows.append(row)
    return ExactMatrix.from_rows(field, rows, d5, d4)


# ---------------------------------------------------------------------------
# Macroscopic (nonlinear) checks

_PAIR_CLASS = {
    frozenset({0, 2}): 0, frozenset({1, 3}): 0,
    frozenset({0, 3}): 1, frozenset({1, 2}): 1,
    frozenset({0, 1}): 2, frozenset({2, 3}): 2,
}


def deficit_angles(tri: GaugedTriangulation, rep) -> dict:
    """Product of cross-ratio values around each edge (1 for coherent data)."""
    defo = undeformed_family(rep)
    cache = _CoordCache(tri, defo)
    triples = []
    for tet in tri.tets:
        zv = [cache.zeta(lv) for lv in tet]
        triples.append(cross_ratio(*zv))
    out = {}
    for edge in tri.edges:
        total = tri.field.one()
        for inc in tri.edge_stars[edge]:
            cls = _PAIR_CLASS[frozenset(inc.slots[:2])]
            total = total * triples[inc.tet][cls]
        out[edge] = total
    return out


def discrepancies(tri: GaugedTriangulation, rep) -> list:
    """The length-determinant of each tetrahedron (0 for coherent data)."""
    from .mobius import discrepancy, squared_length

    defo = undeformed_family(rep)
    cache = _CoordCache(tri, defo)
    out = []
    for tet in tri.tets:
        coords = [cache.coords(lv) for lv in tet]
        vals = [VertexCoords(c.z.value, c.h.value) for c in coords]
        lengths = {}
        for i in range(4):
            for j in range(i + 1, 4):
                lengths[(i, j)] = squared_length(vals[i], vals[j])
        out.append(discrepancy(lengths))
    return out


# ---------------------------------------------------------------------------
# Relative complex for a distinguished tetrahedron pair

class RelativeComplexError(ValueError):
    pass


def boundary_edge_slots(tri: GaugedTriangulation, distinguished: Sequence[int]):
    """The 12 edge slots of the two distinguished tetrahedra, in a fixed order.

    Doubled edges appear once per slot, so entries may repeat as quotient
    edges; subsets of these slots select the boundary rows of the relative
    complex.
    """
    return tuple(tri.edge_for(u, v)
                 for u, v in boundary_slot_pairs(tri, distinguished))


def boundary_slot_pairs(tri: GaugedTriangulation, distinguished: Sequence[int]):
    """Lifted endpoint pairs of the 12 boundary slots, in slot order."""
    t1, t2 = distinguished
    pairs = []
    for ti in (t1, t2):
        tet = tri.tets[ti]
        for p in range(4):
            for q in range(p + 1, 4):
                pairs.append((tet[p], tet[q]))
    if len(pairs) != 12:
        raise RelativeComplexError(f"expected 12 boundary slots, found {len(pairs)}")
    return tuple(pairs)


def interior_edges(tri: GaugedTriangulation, distinguished: Sequence[int]):
    excluded = set(distinguished)
    out = []
    for edge in tri.edges:
        if all(inc.tet not in excluded for inc in tri.edge_stars[edge]):
            out.append(edge)
    return tuple(out)


def relative_f3_rows(tri: GaugedTriangulation, rep, distinguished: Sequence[int]):
    """Rows of the pairing map restricted to the interior columns.

    An interior edge's row sums its whole star.  A boundary slot is a torus
    edge of the cut-open exterior: its row sums the *arc* of the edge's
    link cycle on that slot's side, i.e. the incidences that follow the
    slot's own distinguished tetrahedron until the next distinguished one.
    Doubled edges thus get two different rows, one per copy.

    Returns (col_tets, interior list of (edge, row), slots, slot_rows).
    """
    from .triangulation import edge_link_cycle

    defo = undeformed_family(rep)
    cache = _CoordCache(tri, defo)
    excluded = set(distinguished)
    col_tets = [ti for ti in range(tri.n3) if ti not in excluded]
    col_pos = {ti: i for i, ti in enumerate(col_tets)}
    interior = interior_edges(tri, distinguished)
    slots = boundary_edge_slots(tri, distinguished)
    zero = tri.field.zero()

    def contribution(row, inc):
        zv = [cache.zeta(lv) for lv in tri.tets[inc.tet]]
        i, j, k, l = inc.slots
        pos = col_pos[inc.tet]
        row[pos] = row[pos] + (zv[i] - zv[j]) * (zv[k] - zv[l])

    interior_rows = []
    for e in interior:
        row = [zero] * len(col_tets)
        for inc in tri.edge_stars[e]:
            contribution(row, inc)
        interior_rows.append((e, row))

    slot_rows = []
    slot_index = 0
    for td in distinguished:
        tet = tri.tets[td]
        for p in range(4):
            for q in range(p + 1, 4):
                edge = slots[slot_index]
                slot_index += 1
                cycle = edge_link_cycle(tri, edge)
                own = None
                for i, inc in enumerate(cycle):
                    if inc.tet == td and set(inc.slots[:2]) == {p, q}:
                        own = i
                        break
                if own is None:
                    raise RelativeComplexError(
                        f"slot ({td},{p},{q}) not found in the link of {edge}")
                row = [zero] * len(col_tets)
                m = len(cycle)
                for step in range(1, m):
                    inc = cycle[(own + step) % m]
                    if inc.tet in excluded:
                        break
                    contribution(row, inc)
                slot_rows.append(row)
    return col_tets, interior_rows, slots, slot_rows


def build_relative_f3(tri: GaugedTriangulation, rep, distinguished: Sequence[int],
                      d_slots: Sequence[int]) -> ExactMatrix:
    """The square pairing matrix on interior tetrahedra against interior
    edges plus four selected boundary slots (indices 0..11)."""
    if len(d_slots) != 4 or len(set(d_slots)) != 4:
        raise RelativeComplexError("the boundary selection must be 4 distinct slots")
    col_tets, interior_rows, slots, slot_rows = relative_f3_rows(tri, rep, distinguished)
    if any(not 0 <= s < len(slots) for s in d_slots):
        raise RelativeComplexError(f"slot indices must lie in 0..{len(slots) - 1}")
    rows = [r for _, r in interior_rows]
    row_labels = [("dphi", e.key) for e, _ in interior_rows]
    for s in d_slots:
        rows.append(slot_rows[s])
        row_labels.append(("dphiD", s, slots[s].key))
    n_rows, n_cols = len(rows), len(col_tets)
    if n_rows != n_cols:
        raise RelativeComplexError(
            f"relative complex is not square: {n_rows} rows vs {n_cols} columns")
    col_labels = [("dy", ti) for ti in col_tets]
    return ExactMatrix.from_rows(tri.field, rows, row_labels, col_labels)
