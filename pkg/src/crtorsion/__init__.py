"""Exact-arithmetic Reidemeister torsion of cross-ratio chain complexes.

The package builds chain complexes out of Moebius geometry on triangulated
oriented 3-manifolds (optionally twisted by a PSL(2) representation of the
fundamental group), computes their torsion, and derives the closed and
relative topological invariants.  Everything runs over Q or a number field
Q[x]/(m(x)); there is no floating point anywhere.
"""

from .field import Field, FieldError, Scalar, rationals, number_field
from .jets import Jet
from .linalg import ExactMatrix, det_exact, rank_and_pivots
from .mobius import (
    MobiusElement,
    VertexCoords,
    cross_ratio,
    deficit_angle,
    discrepancy,
    normalized_length,
    squared_length,
)
from .groups import DeckGroup, GroupElement
from .triangulation import (
    GaugedTriangulation,
    LiftedVertex,
    TriangulationError,
    build_quotient,
    pachner_14,
    pachner_23,
    pachner_32,
)
from .representation import DeformationFamily, Representation, StabilizerBasis, stabilizer_basis
from .complexes import TwistedComplex, build_relative_f3, build_twisted_complex
from .torsion import (
    InvariantValue,
    NotAcyclicError,
    TauChain,
    check_acyclic,
    find_tau_chain,
    invariant_closed,
    invariant_relative,
    pachner_ratio_check,
    torsion,
)

__all__ = [
    "Field",
    "FieldError",
    "Scalar",
    "rationals",
    "number_field",
    "Jet",
    "ExactMatrix",
    "det_exact",
    "rank_and_pivots",
    "MobiusElement",
    "VertexCoords",
    "cross_ratio",
    "deficit_angle",
    "discrepancy",
    "normalized_length",
    "squared_length",
    "DeckGroup",
    "GroupElement",
    "GaugedTriangulation",
    "LiftedVertex",
    "TriangulationError",
    "build_quotient",
    "pachner_14",
    "pachner_23",
    "pachner_32",
    "DeformationFamily",
    "Representation",
    "StabilizerBasis",
    "stabilizer_basis",
    "TwistedComplex",
    "build_relative_f3",
    "build_twisted_complex",
    "InvariantValue",
    "NotAcyclicError",
    "TauChain",
    "check_acyclic",
    "find_tau_chain",
    "invariant_closed",
    "invariant_relative",
    "pachner_ratio_check",
    "torsion",
]
