"""Acceptance suite: one test per criterion, exact arithmetic throughout.

Every comparison is exact field equality (up to sign where stated); there
are no numerical tolerances anywhere.
"""

import itertools
import random
import time
from fractions import Fraction

import pytest

from crtorsion.catalog import (
    KNOWN_TABLE,
    make_doubled_tetrahedron,
    make_lens,
    make_s2xs1,
    table1_search,
)
from crtorsion.complexes import build_twisted_complex, deficit_angles, discrepancies
from crtorsion.field import rationals
from crtorsion.linalg import det_exact
from crtorsion.torsion import (
    TauChain,
    _minor,
    check_acyclic,
    find_tau_chain,
    invariant_closed,
    pachner_ratio_check,
    torsion,
    validate_tau_chain,
)
from crtorsion.triangulation import random_pachner_move

Q = rationals()
LAMBDAS = [Fraction(2), Fraction(3, 2), Fraction(5, 3), Fraction(-2), Fraction(7)]


def _sampler(r):
    return Q.scalar(Fraction(r.randint(-97, 97), r.randint(1, 97)))


def test_criterion_1_nonparabolic_closed_invariant():
    """S2xS1, diagonal representation: invariant = +/-(lambda - 1/lambda)^-4."""
    for lam in LAMBDAS:
        lam_s = Q.scalar(lam)
        expected = (lam_s - lam_s.inverse()) ** (-4)
        for seed in range(5):
            tri, rep, defo = make_s2xs1("nonparabolic", lam=lam_s,
                                        rng=random.Random(100 + seed))
            got = invariant_closed(tri, rep, defo)
            assert got.eq_up_to_sign(expected), (lam, seed, str(got.value))
    print("criterion 1: PASS (5 lambdas x 5 draws, exact)")


def test_criterion_2_parabolic_closed_invariant():
    """S2xS1, parabolic representation: invariant = +/-1/4."""
    expected = Q.scalar(Fraction(1, 4))
    for seed in range(5):
        tri, rep, defo = make_s2xs1("parabolic", rng=random.Random(200 + seed))
        assert invariant_closed(tri, rep, defo).eq_up_to_sign(expected)
    print("criterion 2: PASS (5 draws, exact)")


def test_criterion_3_intermediate_minors():
    """The four selected minors match their closed forms up to sign."""
    for seed in range(3):
        rng = random.Random(300 + seed)
        lam_s = _sampler(rng)
        one = Q.one()
        while lam_s.is_zero or lam_s == one or lam_s == -one:
            lam_s = _sampler(rng)
        tri, rep, defo = make_s2xs1("nonparabolic", lam=lam_s, rng=rng)
        z1, z2, z3 = (tri.zeta[v] for v in ("1", "2", "3"))
        l2 = lam_s * lam_s
        z1p, z2p, z3p = l2 * z1, l2 * z2, l2 * z3
        cx = build_twisted_complex(tri, rep, defo)
        chain = TauChain(
            (("dz", "1"),),
            (("dy", 0), ("dy", 1), ("dy", 2)),
            tuple(("dphi", k) for k in ("1@e:1@t", "2@e:2@t", "3@e:3@t")),
            tuple(l for l in cx.spaces[4] if l != ("dbeta", "1")))
        validate_tau_chain(cx, chain)
        two = Q.scalar(2)
        lm, lp = lam_s - one, lam_s + one
        d11, d22, d33 = z1p - z1, z2p - z2, z3p - z3
        d12, d13, d23 = z1 - z2, z1 - z3, z2 - z3
        d1p2, d1p3, d23p = z1p - z2, z1p - z3, z2 - z3p
        expected = {
            1: two * z1,
            2: -(two * lm * lm * lp * lp * z1)
               / (l2 * d11 * d22 * d33 * d12 * d13 * d23 * d1p2 * d1p3 * d23p),
            3: l2 * d11 * d22 * d33 * d1p2 * d13 * d23,
            4: (two * lm * lm * lp * lp * z1) / (d12 * d23p * d1p3),
        }
        for i, value in expected.items():
            got = det_exact(_minor(cx, i, chain))
            assert got == value or got == -value, (seed, i)
    print("criterion 3: PASS (3 random points, all four minors exact up to sign)")


def _generic(factory, base_seed):
    """Retry random draws until the complex build is generic."""
    for seed in range(base_seed, base_seed + 30):
        made = factory(random.Random(seed))
        try:
            build_twisted_complex(made[0], made[1], made[2] if len(made) > 2 else None)
            return made
        except Exception:
            continue
    raise AssertionError("no generic draw found")


def _catalog_complexes():
    lam_s = Q.scalar(Fraction(3, 2))
    tri, rep, defo = _generic(
        lambda r: make_s2xs1("nonparabolic", lam=lam_s, rng=r), 41)
    yield "s2xs1-nonparabolic", tri, rep, defo
    tri, rep, defo = _generic(lambda r: make_s2xs1("parabolic", rng=r), 142)
    yield "s2xs1-parabolic", tri, rep, defo
    tri, rep = _generic(lambda r: make_doubled_tetrahedron(rng=r), 243)
    yield "sphere", tri, rep, None


def test_criterion_4_chain_property_and_macroscopic():
    """f_{i+1} f_i = 0 exactly, also on 20 mutated variants; deficit angles
    and length discrepancies vanish on coordinate data."""
    mutations = 0
    for name, tri, rep, defo in _catalog_complexes():
        cx = build_twisted_complex(tri, rep, defo)
        assert all(cx.chain_defects()), name
        one = tri.field.one()
        assert all(v == one for v in deficit_angles(tri, rep).values()), name
        assert all(v.is_zero for v in discrepancies(tri, rep)), name
        rng = random.Random(44)
        cur = tri
        while mutations < 20 and cur.n3 < 30:
            for _attempt in range(40):
                try:
                    new, _ = random_pachner_move(cur, rng, _sampler)
                    cx2 = build_twisted_complex(new, rep, defo)
                    angles = deficit_angles(new, rep)
                    discs = discrepancies(new, rep)
                    break
                except Exception:
                    continue
            else:
                break
            assert all(cx2.chain_defects()), (name, mutations)
            assert all(v == one for v in angles.values())
            assert all(v.is_zero for v in discs)
            cur = new
            mutations += 1
    assert mutations >= 20
    print(f"criterion 4: PASS (catalog + {mutations} mutations, exact)")


def test_criterion_5_acyclicity():
    """Every catalog complex and every mutation is exactly acyclic."""
    checked = 0
    for name, tri, rep, defo in _catalog_complexes():
        acyclic, hom = check_acyclic(build_twisted_complex(tri, rep, defo))
        assert acyclic, (name, hom)
        rng = random.Random(45)
        cur = tri
        for _ in range(7):
            for _attempt in range(40):
                try:
                    new, _ = random_pachner_move(cur, rng, _sampler)
                    cx = build_twisted_complex(new, rep, defo)
                    acyclic, hom = check_acyclic(cx)
                    break
                except Exception:
                    continue
            else:
                break
            assert acyclic, (name, hom)
            cur = new
            checked += 1
    for seed in range(46, 66):
        try:
            lens = make_lens(5, 1, 1, rng=random.Random(seed))
            acyclic, hom = check_acyclic(build_twisted_complex(lens.tri, lens.rep))
            break
        except Exception:
            continue
    assert acyclic, hom
    print(f"criterion 5: PASS (catalog, lens space, {checked} mutations)")


def test_criterion_6_pachner_machinery():
    """>= 20 seeded random moves: exact torsion ratios and constant invariant."""
    start = time.time()
    lam_s = Q.scalar(Fraction(3, 2))
    moves_done = 0
    for kind, seed in (("nonparabolic", 51), ("parabolic", 52)):
        lam = lam_s if kind == "nonparabolic" else None
        tri, rep, defo = make_s2xs1(kind, lam=lam, rng=random.Random(seed))
        base = invariant_closed(tri, rep, defo)
        rng = random.Random(seed + 1)
        cur = tri
        while moves_done < (10 if kind == "nonparabolic" else 20) and cur.n3 < 40:
            for _attempt in range(40):
                try:
                    new, move = random_pachner_move(cur, rng, _sampler)
                    ratio, ok = pachner_ratio_check(cur, new, rep, defo, move)
                    value = invariant_closed(new, rep, defo)
                    break
                except Exception:
                    continue
            else:
                break
            assert ok, (kind, moves_done, move.kind)
            assert value.eq_up_to_sign(base), (kind, moves_done)
            cur = new
            moves_done += 1
    elapsed = time.time() - start
    assert moves_done >= 20
    assert elapsed < 10, f"runtime {elapsed:.1f}s exceeds the 10s budget"
    print(f"criterion 6: PASS ({moves_done} moves, {elapsed:.1f}s)")


def test_criterion_7_lens_space_table():
    """Reference integer table for L(7,1) and L(7,2): each row must be hit
    by at least one boundary selection after monomial normalization.

    The report isolates the squareness audit in either outcome.
    """
    failures = []
    diagnostics = []
    for (p, q) in ((7, 1), (7, 2)):
        result = table1_search(p, q, rep_root=1, seed=61)
        zeros = sum(1 for v in result.vectors.values() if all(x.is_zero for x in v))
        normalized = sum(1 for mi, v in result.normalized.values() if any(x != 0 for x in v))
        diagnostics.append(
            f"L({p},{q}): squareness 4p-2 = {result.square_dimension} held; "
            f"{len(result.vectors)} subsets, {zeros} zero vectors, "
            f"{normalized} rational-monomial-normalized nonzero vectors")
        for ri, (target, mono_idx) in enumerate(KNOWN_TABLE[(p, q)]):
            hits = result.row_matches.get(ri, [])
            if not hits:
                failures.append(f"L({p},{q}) row {ri} {target} (monomial {mono_idx}): no match")
    for line in diagnostics:
        print(line)
    if failures:
        print("criterion 7: FAIL")
        pytest.fail("unmatched reference rows:\n" + "\n".join(failures + diagnostics))
    print("criterion 7: PASS")


def test_criterion_8_torsion_well_definedness():
    """Chain independence, formula cross-check, and invariance under
    coordinate re-draws and whole-family relabelling, all up to sign."""
    for kind in ("nonparabolic", "parabolic"):
        lam = Q.scalar(Fraction(5, 3)) if kind == "nonparabolic" else None
        tri, rep, defo = make_s2xs1(kind, lam=lam, rng=random.Random(71))
        cx = build_twisted_complex(tri, rep, defo)
        chains = [find_tau_chain(cx, variant=v) for v in range(3)]
        assert len({c.b1 for c in chains}) >= 3
        # torsion() cross-asserts the generic against the closed-form formula
        taus = [torsion(cx, c) for c in chains]
        assert all(t.eq_up_to_sign(taus[0]) for t in taus)

        base = invariant_closed(tri, rep, defo)
        rng = random.Random(72)
        for _ in range(5):
            while True:
                zeta = {v: tri.field.random_rational(rng) for v in tri.vertex_ids}
                if len({s.coeffs for s in zeta.values()}) == len(zeta):
                    break
            assert invariant_closed(tri.with_zeta(zeta), rep, defo).eq_up_to_sign(base)
        # family relabelling by deck translations (coordinates transported)
        t = tri.group.generator()
        for k in (1, -1, 2):
            zeta = {v: rep.apply(t ** k).apply_z(tri.zeta[v]) for v in tri.vertex_ids}
            assert invariant_closed(tri.with_zeta(zeta), rep, defo).eq_up_to_sign(base)
    print("criterion 8: PASS (3 chains, formula cross-check, 5 redraws, relabelling)")
