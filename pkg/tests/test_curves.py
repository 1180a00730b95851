"""Finite fields, point groups, and the weight-one fixed point layer."""

import itertools
import math
import random

import pytest

from frobfix.abgroup import FgAbGroup, TRIVIAL, Z, Zmod
from frobfix.curves import (EllipticCurveSpec, FqField, INF, canonical_modulus,
                            curve_order, get_field, isogeny_degree_form,
                            kernel_count, odd_power_sharpness, point_group,
                            point_fixed_points, point_independence_check,
                            frobenius_on_points, perm_twisted_fixed_points,
                            rigidity_compare, trace_of_frobenius, units_group,
                            verify_frobenius_additive, verschiebung_on_points,
                            weight1_frobenius_cohomology)
from frobfix.indgroup import ResourceCeilingError


def test_canonical_modulus_hand_values():
    # lowest packed-coefficient primitive polynomials
    assert canonical_modulus(2, 2) == (1, 1, 1)            # x^2+x+1
    assert canonical_modulus(2, 3) == (1, 1, 0, 1)         # x^3+x+1
    assert canonical_modulus(3, 2) == (2, 1, 1)            # x^2+x+2
    assert canonical_modulus(5, 2) == (2, 1, 1)            # x^2+x+2
    assert canonical_modulus(3, 1) == (1, 1)               # x-2, gen 2


def test_modulus_generator_is_primitive():
    for p, k in [(2, 4), (3, 3), (5, 2), (7, 2), (2, 6)]:
        f = FqField(p, k)
        assert f.element_order(f.gen) == f.q - 1
        seen = set()
        cur = 1
        for _ in range(f.q - 1):
            seen.add(cur)
            cur = f.mul(cur, f.gen)
        assert len(seen) == f.q - 1 and cur == 1


def test_field_axioms_random():
    rng = random.Random(20260825)
    for p, k in [(2, 2), (2, 5), (3, 2), (3, 3), (5, 2), (7, 1), (11, 1)]:
        f = FqField(p, k)
        for _ in range(150):
            a, b, c = (rng.randrange(f.q) for _ in range(3))
            assert f.add(a, b) == f.add(b, a)
            assert f.mul(a, b) == f.mul(b, a)
            assert f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))
            assert f.add(a, f.neg(a)) == 0
            if a:
                assert f.mul(a, f.inv(a)) == 1
            # frobenius is a ring endomorphism fixing F_p
            assert f.frobenius(f.add(a, b)) == f.add(f.frobenius(a),
                                                     f.frobenius(b))
            assert f.frobenius(f.mul(a, b)) == f.mul(f.frobenius(a),
                                                     f.frobenius(b))
        for c in range(p):
            assert f.frobenius(c) == c
        for a in range(min(f.q, 80)):
            t = f.trace_to_prime(a)
            assert t < p
            assert f.trace_to_prime(f.frobenius(a)) == t


def test_tabled_matches_polynomial_mode():
    # the Zech-table path and the raw polynomial path are independent
    # implementations; they must agree operation for operation
    rng = random.Random(99)
    for p, k in [(2, 4), (3, 3), (5, 2)]:
        fast = FqField(p, k)
        slow = FqField(p, k, tables=False)
        assert fast.modulus == slow.modulus
        for _ in range(200):
            a, b = rng.randrange(fast.q), rng.randrange(fast.q)
            assert fast.add(a, b) == slow.add(a, b)
            assert fast.mul(a, b) == slow.mul(a, b)
            if a:
                assert fast.inv(a) == slow.inv(a)


def test_pow_agreement_both_modes():
    rng = random.Random(100)
    for p, k in [(2, 4), (3, 3)]:
        fast = FqField(p, k)
        slow = FqField(p, k, tables=False)
        for _ in range(100):
            a = rng.randrange(fast.q)
            e = rng.randrange(1, 60)
            assert fast.pow(a, e) == slow.pow(a, e)


def test_sqrt_and_quadratics_exhaustive():
    for p, k in [(3, 2), (2, 3), (2, 4), (5, 2), (7, 1)]:
        f = FqField(p, k)
        squares = {f.mul(a, a) for a in f.elements()}
        for a in f.elements():
            s = f.sqrt(a)
            if s is None:
                assert a not in squares
            else:
                assert f.mul(s, s) == a
        for a, b, c in itertools.product(list(f.elements())[:5], repeat=3):
            if a == 0 and b == 0:
                continue
            roots = f.quad_solve(a, b, c)
            brute = [y for y in f.elements()
                     if f.add(f.add(f.mul(a, f.mul(y, y)), f.mul(b, y)),
                              c) == 0]
            assert sorted(roots) == sorted(brute)


def test_artin_schreier_solutions():
    # y^p - y = a is solvable exactly when the absolute trace vanishes
    for p, k in [(2, 2), (2, 3), (3, 2), (3, 3), (5, 2)]:
        f = FqField(p, k)
        n_solvable = 0
        for a in f.elements():
            y = f.artin_schreier_solve(a)
            if y is None:
                assert f.trace_to_prime(a) != 0
            else:
                n_solvable += 1
                assert f.trace_to_prime(a) == 0
                assert f.sub(f.pow(y, p), y) == a
        assert n_solvable == f.q // p


def test_big_field_mode():
    f = FqField(2, 24, tables=False)
    assert not f.tabled
    assert f.modulus == (1, 1, 0, 1, 1) + (0,) * 19 + (1,)
    a = 0xBEEF01
    b = f.pow(a, 2 ** 24 - 2)
    assert f.mul(a, b) == 1
    y = f.artin_schreier_solve(f.mul(a, a))
    if y is not None:
        assert f.sub(f.mul(y, y), y) == f.mul(a, a)
    # F_4 embeds: its generator solves z^2 + z + 1 = 0
    f4 = FqField(2, 2)
    emb = f4.embed_into(f)
    img = emb(f4.gen)
    assert f.add(f.add(f.mul(img, img), img), 1) == 0
    for x in f4.elements():
        for z in f4.elements():
            assert emb(f4.add(x, z)) == f.add(emb(x), emb(z))
            assert emb(f4.mul(x, z)) == f.mul(emb(x), emb(z))


def test_embeddings_respect_structure():
    rng = random.Random(4242)
    for (p, m, n) in [(3, 2, 4), (3, 2, 6), (5, 2, 4), (2, 3, 6), (3, 3, 6)]:
        sub, sup = get_field(p, m), get_field(p, n)
        emb = sub.embed_into(sup)
        for _ in range(80):
            a, b = rng.randrange(sub.q), rng.randrange(sub.q)
            assert emb(sub.add(a, b)) == sup.add(emb(a), emb(b))
            assert emb(sub.mul(a, b)) == sup.mul(emb(a), emb(b))
        imgs = {emb(a) for a in sub.elements()}
        assert len(imgs) == sub.q


# ---------------------------------------------------------------------------
# Curves


def test_curve_validation():
    with pytest.raises(ValueError):
        EllipticCurveSpec(2)                       # y^2 = x^3 is singular
    with pytest.raises(ValueError):
        EllipticCurveSpec(3, a4=0, a6=0)
    with pytest.raises(ValueError):
        EllipticCurveSpec(4, a6=1)                 # 4 is not prime
    e = EllipticCurveSpec(5, a4=11, a6=-3)
    assert e.a4 == 1 and e.a6 == 2                 # coefficients mod p


# base-field point counts, verified by a naive double loop over the
# Weierstrass equation with plain integer arithmetic mod p
BASE_COUNTS = [
    (EllipticCurveSpec(2, a3=1), 3),                        # y^2+y = x^3
    (EllipticCurveSpec(2, a3=1, a4=1), 5),                  # y^2+y = x^3+x
    (EllipticCurveSpec(2, a1=1, a2=1, a6=1), 2),            # y^2+xy = x^3+x^2+1
    (EllipticCurveSpec(3, a4=-1), 4),                       # y^2 = x^3-x
    (EllipticCurveSpec(3, a4=2, a6=1), 7),
    (EllipticCurveSpec(5, a2=-4, a4=3), 4),                 # y^2 = x(x-1)(x-3)
    (EllipticCurveSpec(5, a6=1), 6),                        # y^2 = x^3+1
    (EllipticCurveSpec(7, a6=2), 9),
]


def _naive_count(e):
    n = 1
    for x in range(e.p):
        for y in range(e.p):
            lhs = y * y + e.a1 * x * y + e.a3 * y
            rhs = x ** 3 + e.a2 * x * x + e.a4 * x + e.a6
            if (lhs - rhs) % e.p == 0:
                n += 1
    return n


def test_base_point_counts():
    for e, expected in BASE_COUNTS:
        assert _naive_count(e) == expected
        assert len(point_group(e, 1).points) == expected


def test_curve_order_recurrence():
    # the trace recurrence must reproduce honest enumeration at every level
    for e, _ in BASE_COUNTS:
        for k in (1, 2, 3):
            assert curve_order(e, k) == len(point_group(e, k).points)


def test_group_law_random():
    rng = random.Random(314159)
    for e, _ in BASE_COUNTS[:6]:
        g = point_group(e, 2)
        pts = g.points
        for _ in range(200):
            a, b, c = (rng.choice(pts) for _ in range(3))
            assert g.add(a, b) == g.add(b, a)
            assert g.add(g.add(a, b), c) == g.add(a, g.add(b, c))
            assert g.add(a, g.neg(a)) is INF
            assert g.add(a, INF) == a
        n = len(pts)
        assert g.structure.order() == n
        for _ in range(25):
            assert g.scalar(n, rng.choice(pts)) is INF


def test_structure_invariants():
    # at most two invariant factors, a | b and a | q - 1
    for e, _ in BASE_COUNTS:
        for k in (1, 2):
            g = point_group(e, k)
            fac = g.structure.invariant_factors
            assert len(fac) <= 2
            if len(fac) == 2:
                assert fac[1] % fac[0] == 0
                assert (g.field.q - 1) % fac[0] == 0


def test_full_two_torsion_curve():
    # y^2 = x(x-1)(x-3) over F_5 has all of E[2] rational
    e = EllipticCurveSpec(5, a2=-4, a4=3)
    g = point_group(e, 1)
    assert g.structure == FgAbGroup(0, (2, 2))
    twos = [pt for pt in g.points if pt is not INF and g.add(pt, pt) is INF]
    assert len(twos) == 3


def test_frobenius_and_verschiebung():
    for e, _ in BASE_COUNTS[:6]:
        g = point_group(e, 2)
        phi = frobenius_on_points(g)
        v = verschiebung_on_points(g)
        p = e.p
        assert verify_frobenius_additive(g)
        for pt in g.points:
            assert phi[v[pt]] == g.scalar(p, pt)
            assert v[phi[pt]] == g.scalar(p, pt)
        fixed = [pt for pt in g.points if phi[pt] == pt]
        assert len(fixed) == len(point_group(e, 1).points)


def test_degree_form_identity():
    for e, n1 in BASE_COUNTS:
        p = e.p
        assert isogeny_degree_form(e, -1, p) == p * n1
        for k in (1, 2):
            g = point_group(e, k)
            kc = kernel_count(g, -1, p)
            assert (p * n1) % kc == 0


def test_degree_form_positive_on_window():
    for e, _ in BASE_COUNTS:
        for r in range(-5, 6):
            for s in range(-5, 6):
                if (r, s) != (0, 0):
                    assert isogeny_degree_form(e, r, s) > 0
    with pytest.raises(ValueError):
        isogeny_degree_form(BASE_COUNTS[0][0], 0, 0)


def test_odd_power_sharpness():
    for p in (2, 3):
        rep = odd_power_sharpness(p)
        assert rep["found"]
        assert rep["points_over_square"] == (p + 1) ** 2
        assert rep["form_value"] == 0
        assert rep["pointwise_zero"]
        assert rep["trace_over_square"] == -2 * p
        base = EllipticCurveSpec.from_json(rep["curve"])
        assert trace_of_frobenius(base) == 0


def test_field_ceiling_enforced():
    with pytest.raises(ResourceCeilingError):
        point_group(EllipticCurveSpec(7, a6=2), 7)     # 7^7 > 10^5


# ---------------------------------------------------------------------------
# Units, Pic, weight one


def test_units_group_shapes():
    u = units_group("point", (), 2, p=3)
    assert u.group == Zmod(8) and u.divisor_rank == 0
    u = units_group("p1", ("0", "1", "inf"), 2, p=3)
    assert u.group == Zmod(8).direct_sum(FgAbGroup(2, ()))
    assert u.divisor_rank == 2
    # partial: p on constants only; full: p everywhere
    assert u.partial_endo.matrix.entries[0][0] == 3
    assert u.partial_endo.matrix.entries[1][1] == 1
    assert u.full_endo.matrix.entries[1][1] == 3
    with pytest.raises(ValueError):
        units_group("point", ("0",), 1, p=3)


def test_units_group_elliptic_lattice():
    # divisors on a curve must sum to the identity to be principal, which
    # cuts a finite-index sublattice of the degree-zero lattice
    e = EllipticCurveSpec(3, a4=-1)
    g = point_group(e, 1)
    pts = [pt for pt in g.points if pt is not INF]
    u = units_group("elliptic", (INF, pts[0]), 1, curve=e)
    assert u.divisor_rank == 1
    u = units_group("elliptic", tuple(pts[:3]), 1, curve=e)
    assert u.divisor_rank == 2


def test_weight1_point_and_line():
    w = weight1_frobenius_cohomology("point", 2, p=3)
    assert set(w) == {1}
    assert w[1].h0 == Zmod(2) and w[1].h1 == Zmod(2)
    w = weight1_frobenius_cohomology("p1", 2, p=5)
    assert set(w) == {1, 2}
    assert w[1].h0 == Zmod(4)
    assert w[2].h0 == Z and w[2].h1 == Z


def test_weight1_elliptic():
    e = EllipticCurveSpec(3, a4=-1)
    w = weight1_frobenius_cohomology("elliptic", 2, curve=e)
    # kernel in degree 2 is Z (degree) + E(F_3) = (Z/2)^2
    assert w[2].h0 == Z.direct_sum(FgAbGroup(0, (2, 2)))
    assert w[2].h1.order() == w[2].h0.order()   # infinite==infinite, torsion equal
    pf = point_fixed_points(point_group(e, 2))
    assert pf.kernel_group == FgAbGroup(0, (2, 2))
    assert pf.cokernel_group.order() == 4
    assert len(pf.class_reps) == 4


def test_weight1_localize_strips_p_torsion():
    # ordinary curve over F_2 with rational 2-torsion
    e = EllipticCurveSpec(2, a1=1, a2=1, a6=1)
    assert trace_of_frobenius(e) % 2 == 1       # ordinary
    w = weight1_frobenius_cohomology("elliptic", 2, curve=e)
    assert w[2].h0 == Z.direct_sum(Zmod(2))
    w = weight1_frobenius_cohomology("elliptic", 2, curve=e,
                                     localize_away_p=True)
    assert w[2].h0 == Z


def test_point_balance_random_levels():
    # |ker| = |coker| for 1 - phi on every finite point group
    for e, _ in BASE_COUNTS:
        for k in (1, 2, 3):
            pf = point_fixed_points(point_group(e, k))
            assert pf.kernel_group.order() == pf.cokernel_group.order()
            assert len(pf.class_reps) * len(pf.image) == len(
                point_group(e, k).points)


# ---------------------------------------------------------------------------
# Rigidity along the tower


def test_rigidity_point_and_line():
    r = rigidity_compare("point", (1, 2, 3), p=3)
    assert r.certified
    assert r.kernel_group == Zmod(2)
    # class 1 at level m dies at level 2m for p = 3
    assert r.unit_witnesses == ((1, 1, 2), (2, 1, 4), (3, 1, 6))
    r = rigidity_compare("p1", (1, 2), p=5)
    assert r.certified
    assert r.kernel_group == Zmod(4).direct_sum(Z)


def test_rigidity_exponent_two_curves_certify():
    for e in (EllipticCurveSpec(3, a4=-1), EllipticCurveSpec(5, a2=-4, a4=3)):
        r = rigidity_compare("elliptic", (1, 2, 3), curve=e)
        assert r.certified
        assert r.kernels_agree
        # E(F_p) has exponent 2, so every class dies one doubling up
        assert len(r.point_witnesses) == 9
        assert all(died == 2 * m for m, _, died in r.point_witnesses)


def test_rigidity_honest_failure_high_exponent():
    # E(F_3) = Z/7 forces witnesses at level 7m, beyond the default cap
    e = EllipticCurveSpec(3, a4=2, a6=1)
    r = rigidity_compare("elliptic", (1, 2), curve=e)
    assert not r.certified
    assert any("no witness" in f for f in r.failures)
    r7 = rigidity_compare("elliptic", (1, 2), curve=e, witness_level_cap=7)
    lvl1 = [w for w in r7.point_witnesses if w[0] == 1]
    assert lvl1 and all(died == 7 for _, _, died in lvl1)


def test_rigidity_requires_two_levels():
    with pytest.raises(ValueError):
        rigidity_compare("point", (1,), p=3)


# ---------------------------------------------------------------------------
# Point independence and permutation twists


def test_point_independence():
    for p, level in ((2, 2), (3, 2), (2, 3)):
        rep = point_independence_check(p, level)
        assert rep["agrees"]
        assert rep["kernel_evaluations_agree"]
        assert not rep["cokernel_failures"]
        n = p ** level - 2
        assert rep["rational_points"] == n
        assert rep["cokernel_pairs_checked"] == 3 * n * (n - 1) // 2
    assert point_independence_check(3, 2)["kernel_classes"] == 2


def test_point_independence_needs_points():
    with pytest.raises(ValueError):
        point_independence_check(2, 1)      # F_2 minus {0,1} is empty


def test_perm_twisted_swap():
    rep = perm_twisted_fixed_points(2, (1, 0), 2, 3)
    assert rep["sigma_order"] == 2 and rep["torsion_killer"] == 3
    assert rep["kernels"] == ["0", "Z/3", "Z/3"]
    assert rep["cokernels"] == ["0", "Z/3", "Z/3"]
    assert rep["kernels_finite"]
    assert rep["cokernels_die_after_inverting"]
    assert rep["depth2_certificate"]["certified"]


def test_perm_twisted_identity_and_cycle():
    rep = perm_twisted_fixed_points(2, (0, 1), 3, 2)
    assert rep["kernels"] == ["Z/2 x Z/2", "Z/2 x Z/2"]
    assert rep["cokernels_die_after_inverting"]
    rep = perm_twisted_fixed_points(3, (1, 2, 0), 2, 2)
    assert rep["torsion_killer"] == 7
    assert rep["kernels"] == ["0", "0"]
    assert rep["cokernels_die_after_inverting"]
    with pytest.raises(ValueError):
        perm_twisted_fixed_points(2, (0, 0), 2, 2)
