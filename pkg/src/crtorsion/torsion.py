"""Acyclicity checks, tau-chain search, torsion, and the derived invariants.

The torsion of an acyclic based complex is the alternating product of
determinants of the principal minors selected by a nondegenerate tau-chain.
Everything here is exact and defined up to sign; ``InvariantValue``
comparisons always mean equality up to sign.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .field import Scalar
from .linalg import det_exact, rank_and_pivots
from .complexes import TwistedComplex, build_relative_f3, build_twisted_complex
from .representation import undeformed_family
from .triangulation import GaugedTriangulation, MoveRecord, QuotientEdge


class NotAcyclicError(ArithmeticError):
    def __init__(self, message, homology=None):
        super().__init__(message)
        self.homology = homology


class ChainError(ArithmeticError):
    pass


@dataclass(frozen=True)
class InvariantValue:
    value: Scalar
    sign_convention: str = "up_to_sign"

    def eq_up_to_sign(self, other) -> bool:
        v = other.value if isinstance(other, InvariantValue) else other
        return self.value == v or self.value == -v

    def __str__(self) -> str:
        return f"+/-{self.value}"


@dataclass(frozen=True)
class TauChain:
    """Basis subsets B_1..B_4 selecting the nondegenerate principal minors."""

    b1: tuple
    b2: tuple
    b3: tuple
    b4: tuple

    def sets(self):
        return (self.b1, self.b2, self.b3, self.b4)


_B1_TO_B4 = {"dz": "dbeta", "dg": "dgstar"}


def _forced_b4(cx: TwistedComplex, b1) -> tuple:
    excluded = {( _B1_TO_B4[kind], name) for kind, name in b1}
    return tuple(label for label in cx.spaces[4] if label not in excluded)


def check_acyclic(cx: TwistedComplex):
    """Homology dimensions from exact ranks; acyclic iff all vanish."""
    dims = cx.dims
    ranks = [rank_and_pivots(cx.maps[i])[0] for i in range(5)]
    h = [dims[0] - ranks[0]]
    for i in range(1, 5):
        h.append(dims[i] - ranks[i - 1] - ranks[i])
    h.append(dims[5] - ranks[4])
    homology = tuple(h)
    return all(x == 0 for x in homology), homology


def _minor(cx: TwistedComplex, i: int, chain: TauChain):
    """The selected principal minor of f_i: target rows B_i, domain columns
    complementary to B_{i-1} (all of D0 for i = 1; all of D5 rows for i = 5)."""
    b = (None, chain.b1, chain.b2, chain.b3, chain.b4, None)
    f = cx.f(i)
    rows = list(cx.spaces[i]) if b[i] is None else list(b[i])
    if i == 1:
        cols = list(cx.spaces[0])
    else:
        prev = set(b[i - 1])
        cols = [l for l in cx.spaces[i - 1] if l not in prev]
    return f.submatrix(rows, cols)


def validate_tau_chain(cx: TwistedComplex, chain: TauChain, require_side_condition=True):
    """Check all selected minors are square and nonsingular; raises ChainError."""
    if require_side_condition and tuple(chain.b4) != _forced_b4(cx, chain.b1):
        raise ChainError("side condition fails: B4 is not the complement dual to B1")
    for i in range(1, 6):
        m = _minor(cx, i, chain)
        if m.rows != m.cols:
            raise ChainError(f"minor {i} is {m.rows}x{m.cols}, not square")
        if m.rows and det_exact(m).is_zero:
            raise ChainError(f"minor {i} is singular")
    return True


def find_tau_chain(cx: TwistedComplex, variant: int = 0, max_attempts: int = 12) -> TauChain:
    """Greedy pivot propagation with deterministic backtracking.

    ``variant`` rotates the pivot preference orders, which yields distinct
    valid chains on the same complex.
    """
    d1, d2, d3, d4 = cx.spaces[1], cx.spaces[2], cx.spaces[3], cx.spaces[4]
    last_error = None
    for attempt in range(max_attempts):
        v = variant + attempt
        rot = lambda labels: tuple(labels[v % len(labels):]) + tuple(labels[:v % len(labels)]) if labels else tuple(labels)
        r1, b1, _ = rank_and_pivots(cx.f(1), row_pref=rot(d1))
        if r1 != len(cx.spaces[0]):
            _, hom = check_acyclic(cx)
            raise NotAcyclicError(f"stage 1: rank {r1} < {len(cx.spaces[0])}", hom)
        m2 = cx.f(2).submatrix(col_labels=[l for l in d1 if l not in set(b1)])
        r2, b2, _ = rank_and_pivots(m2, row_pref=rot(d2))
        if r2 != m2.cols:
            _, hom = check_acyclic(cx)
            raise NotAcyclicError(f"stage 2: rank {r2} < {m2.cols}", hom)
        m3 = cx.f(3).submatrix(col_labels=[l for l in d2 if l not in set(b2)])
        r3, b3, _ = rank_and_pivots(m3, row_pref=rot(d3))
        if r3 != m3.cols:
            _, hom = check_acyclic(cx)
            raise NotAcyclicError(f"stage 3: rank {r3} < {m3.cols}", hom)
        chain = TauChain(tuple(b1), tuple(b2), tuple(b3), _forced_b4(cx, b1))
        try:
            validate_tau_chain(cx, chain)
            return chain
        except ChainError as exc:
            last_error = exc
    raise ChainError(f"no tau-chain found after {max_attempts} attempts: {last_error}")


def torsion(cx: TwistedComplex, chain: TauChain, cross_check: bool = True) -> InvariantValue:
    """Alternating product of the selected minor determinants.

    The closed-complex form (det m1)^2 m3 / (m2 m4) is cross-checked against
    the generic alternating product, which replaces one det m1 by det m5.
    """
    dets = {}
    for i in range(1, 6):
        m = _minor(cx, i, chain)
        if m.rows != m.cols:
            raise ChainError(f"minor {i} is {m.rows}x{m.cols}, not square")
        dets[i] = det_exact(m)
        if dets[i].is_zero:
            raise ChainError(f"minor {i} is singular: invalid chain")
    tau = dets[1] * dets[1] * dets[3] / (dets[2] * dets[4])
    if cross_check:
        generic = dets[5] * dets[3] * dets[1] / (dets[4] * dets[2])
        if generic != tau and generic != -tau:
            raise ChainError("generic and specialized torsion formulas disagree")
    return InvariantValue(tau)


# ---------------------------------------------------------------------------
# Invariants

def lifted_zeta(tri: GaugedTriangulation, rep, lv) -> Scalar:
    """Coordinate of a lifted vertex, transported by the representation."""
    if lv.gauge.is_identity:
        return tri.zeta[lv.vertex]
    return rep.apply(lv.gauge).apply_z(tri.zeta[lv.vertex])


def edge_weight_product(tri: GaugedTriangulation, rep,
                        exclude: Sequence[QuotientEdge] = ()) -> Scalar:
    """Product of squared coordinate differences over the fundamental edges,
    each evaluated at the edge's family lift."""
    excluded = {e.key for e in exclude}
    total = tri.field.one()
    for edge in tri.edges:
        if edge.key in excluded:
            continue
        u, v = tri.edge_lifts[edge.key]
        d = lifted_zeta(tri, rep, u) - lifted_zeta(tri, rep, v)
        total = total * d * d
    return total


def invariant_closed(tri: GaugedTriangulation, rep, defo=None,
                     chain_variant: int = 0) -> InvariantValue:
    """tau divided by the squared edge-coordinate products; up to sign."""
    cx = build_twisted_complex(tri, rep, defo)
    acyclic, hom = check_acyclic(cx)
    if not acyclic:
        raise NotAcyclicError(f"complex is not acyclic: homology {hom}", hom)
    chain = find_tau_chain(cx, variant=chain_variant)
    tau = torsion(cx, chain)
    return InvariantValue(tau.value / edge_weight_product(tri, rep))


def relative_weight_product(tri: GaugedTriangulation, rep, distinguished: Sequence[int],
                            d_slots: Sequence[int]) -> Scalar:
    """Squared edge-weight product over the exterior's cells not selected.

    The exterior complex has the interior edges (weights at their family
    lifts) plus the 12 boundary torus slots (weights at the slot's own
    lifted pair); the four selected slots are left out.
    """
    from .complexes import boundary_slot_pairs, interior_edges

    total = tri.field.one()
    for edge in interior_edges(tri, distinguished):
        u, v = tri.edge_lifts[edge.key]
        d = lifted_zeta(tri, rep, u) - lifted_zeta(tri, rep, v)
        total = total * d * d
    selected = set(d_slots)
    for i, (u, v) in enumerate(boundary_slot_pairs(tri, distinguished)):
        if i in selected:
            continue
        d = lifted_zeta(tri, rep, u) - lifted_zeta(tri, rep, v)
        total = total * d * d
    return total


def invariant_relative(tri: GaugedTriangulation, rep, distinguished: Sequence[int],
                       d_slots: Sequence[int]) -> InvariantValue:
    """det of the relative pairing matrix over the complementary edge weights."""
    m = build_relative_f3(tri, rep, distinguished, d_slots)
    det = det_exact(m)
    if det.is_zero:
        return InvariantValue(tri.field.zero())
    denom = relative_weight_product(tri, rep, distinguished, d_slots)
    return InvariantValue(det / denom)


def pachner_ratio_check(tri_before: GaugedTriangulation, tri_after: GaugedTriangulation,
                        rep, defo, move: MoveRecord):
    """Compare the torsion ratio across a move with its predicted edge factor."""
    cx0 = build_twisted_complex(tri_before, rep, defo)
    cx1 = build_twisted_complex(tri_after, rep, defo)
    tau0 = torsion(cx0, find_tau_chain(cx0))
    tau1 = torsion(cx1, find_tau_chain(cx1))
    ratio = tau1.value / tau0.value
    p = [lifted_zeta(tri_after if move.kind == "14" else tri_before, rep, lv)
         for lv in move.points]
    if move.kind == "23":
        factor = p[4] - p[3]
    elif move.kind == "14":
        factor = (p[0] - p[4]) * (p[1] - p[4]) * (p[2] - p[4]) * (p[4] - p[3])
    else:
        raise ValueError(f"no ratio formula for move kind {move.kind!r}")
    expected = factor * factor
    return ratio, (ratio == expected or ratio == -expected)
