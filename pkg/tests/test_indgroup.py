"""Factorial towers, stabilization, colimit-vanishing certificates.

Witness levels frozen here were derived by hand first: a class at level m of
coker(1 - p^i) on the roots-of-unity tower dies at level M exactly when
gcd(p^i - 1, p^(M!) - 1) divides (p^(M!) - 1)/(p^(m!) - 1).
"""

import pytest

from frobfix.abgroup import GroupHom, IntMatrix, Zmod, kernel
from frobfix.indgroup import (
    IndAbGroup, ResourceCeilingError, colim_vanishes, default_level_ceiling,
    ind_fixed_points, roots_of_unity_ind, stabilize,
)


def _twisted(p, i, ceiling=None):
    tower = roots_of_unity_ind(p, level_ceiling=ceiling)
    return tower.with_endo(lambda m: GroupHom(
        tower.presentation(m), tower.presentation(m),
        IntMatrix.from_rows([[p ** i]])))


def test_tower_levels_and_transitions():
    t = roots_of_unity_ind(3)
    assert t.group(1) == Zmod(2)
    assert t.group(2) == Zmod(8)
    assert t.group(3) == Zmod(728)          # 3**6 - 1
    assert t.transition(1).matrix.entries == ((4,),)   # (3^2-1)/(3^1-1)
    # transitions are injective: multiplication by T into Z/(m*T)
    for m in (1, 2, 3):
        ker, _ = kernel(t.transition(m))
        assert ker.is_trivial()
    # composite agrees with the product of steps
    comp = t.composite_transition(1, 3)
    assert comp.matrix.entries[0][0] == (3 ** 6 - 1) // 2


def test_level_ceiling(monkeypatch):
    assert default_level_ceiling() == 8
    monkeypatch.setenv("FROBFIX_LEVEL_CEILING", "3")
    t = roots_of_unity_ind(2)
    assert t.level_ceiling == 3
    t.group(3)
    with pytest.raises(ResourceCeilingError):
        t.group(4)
    with pytest.raises(ValueError):
        t.group(0)


def test_commuting_square_enforced():
    t = roots_of_unity_ind(3)
    # mult by m-dependent constants that fail to commute with the transition
    bad = t.with_endo(lambda m: GroupHom(
        t.presentation(m), t.presentation(m),
        IntMatrix.from_rows([[1 if m == 1 else 2]])))
    with pytest.raises(ValueError):
        bad.transition(1)


def test_kummer_fixed_point_towers():
    # endo = mult p; kernels are constant Z/(p-1), cokernel classes all die
    for p, wit in (
        (2, ()),
        (3, ((1, 0, 2), (2, 0, 4), (3, 0, 4), (4, 0, 6))),
        (5, ((1, 0, 4), (2, 0, 4), (3, 0, 4), (4, 0, 8))),
    ):
        fp = ind_fixed_points(roots_of_unity_ind(p))
        stab = stabilize(fp.kernels, 8)
        assert stab.stabilized and stab.level == 1
        assert stab.group == Zmod(p - 1)
        cert = colim_vanishes(fp.cokernels, 4, search_limit=8)
        assert cert.certified
        assert cert.witnesses == wit
        assert cert.failures == ()


def test_twisted_kernel_stabilization():
    # ker(1 - p^i) stabilizes to Z/(p^i - 1) at the first level m with i | m!
    cases = [(3, 2, 2), (5, 3, 3), (2, 4, 4), (2, 7, 7)]
    for p, i, expect_level in cases:
        fp = ind_fixed_points(_twisted(p, i))
        stab = stabilize(fp.kernels, 8)
        assert stab.stabilized
        assert stab.level == expect_level
        assert stab.group == Zmod(p ** i - 1)


def test_twisted_cokernel_certificates():
    # depth 2 certifies for every twist in the working range
    for p in (2, 3, 5):
        for i in range(1, 8):
            fp = ind_fixed_points(_twisted(p, i))
            assert colim_vanishes(fp.cokernels, 2, search_limit=8).certified

    # the depth-4 boundary is sharp: the level-4 class of coker(1 - 5^4)
    # needs a tower level >= 13 (the factor 13 of 624 must enter M!/4!),
    # far beyond any computable modulus, so the certificate honestly fails
    fp = ind_fixed_points(_twisted(5, 4))
    cert = colim_vanishes(fp.cokernels, 4, search_limit=8)
    assert not cert.certified
    assert cert.failures == ((4, 0, 8),)
    cert3 = colim_vanishes(fp.cokernels, 3, search_limit=8)
    assert cert3.certified
    assert cert3.witnesses == ((1, 0, 6), (2, 0, 8), (3, 0, 8))


def test_stabilize_boundary_semantics():
    # stabilization claimed only within the checked range: a tower that
    # first becomes constant at the last checked level is not certified
    fp = ind_fixed_points(_twisted(2, 7))
    assert not stabilize(fp.kernels, 7).stabilized
    assert stabilize(fp.kernels, 8).stabilized


def test_custom_tower():
    # constant tower Z/6 with identity transitions and endo mult 5
    pres = Zmod(6).canonical_presentation()
    t = IndAbGroup(lambda m: pres,
                   lambda m: GroupHom.identity(pres),
                   lambda m: GroupHom(pres, pres, IntMatrix.from_rows([[5]])))
    fp = ind_fixed_points(t)
    stab = stabilize(fp.kernels, 5)
    assert stab.stabilized and stab.group == Zmod(2)   # ker(1-5) = ker(4) on Z/6
    cert = colim_vanishes(fp.cokernels, 3, search_limit=8)
    assert not cert.certified                          # constant Z/2, never dies
    assert len(cert.failures) == 3
