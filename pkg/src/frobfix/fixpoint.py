"""Fixed points of endomorphisms via the two-term complex [M --(1-phi)--> M].

The homotopy fixed points of an endomorphism phi sitting on a group M are
the kernel and cokernel of 1 - phi:

    h0 = ker(1 - phi)        (honest fixed points)
    h1 = coker(1 - phi)      (obstruction term)

For finite M these always have the same order (rank-nullity over Z).  Graded
inputs are assembled degreewise: the long exact sequence contributes, in
output degree n, an extension

    0 -> coker(1 - phi on M_{n+1}) -> Fix_n -> ker(1 - phi on M_n) -> 0

and the extension is only resolved when one side vanishes or when
Ext^1(quot, sub) = 0 forces the split ("coprime-split").
"""

from __future__ import annotations

from dataclasses import dataclass

from .abgroup import (FgAbGroup, GroupHom, IntMatrix, LocalizedGroup,
                      Presentation, RATIONAL, TRIVIAL, cokernel,
                      cokernel_data, factor_through, homs_equal, kernel,
                      localize, underlying_group)


def is_trivial_group(g):
    return g.is_trivial()


def _small_prime_factors(n):
    n = abs(n)
    out = set()
    d = 2
    while d * d <= n:
        while n % d == 0:
            out.add(d)
            n //= d
        d += 1
    if n > 1:
        out.add(n)
    return out


@dataclass(frozen=True)
class Endo:
    """Endomorphism of a (possibly localized) group on its canonical presentation.

    `matrix / denominator` is the actual map; a denominator != 1 is only
    legal when every prime dividing it is inverted in the group, so that the
    denominator is a unit and 1 - phi has the same kernel and cokernel as the
    integer map  denominator * I - matrix.
    """

    group: object                 # FgAbGroup | LocalizedGroup
    matrix: IntMatrix
    denominator: int = 1

    def __post_init__(self):
        g = underlying_group(self.group)
        n = len(g.invariant_factors) + g.free_rank
        if self.matrix.rows != n or self.matrix.cols != n:
            raise ValueError("endo matrix must be square on the canonical "
                             "presentation")
        if self.denominator < 1:
            raise ValueError("denominator must be positive")
        if self.denominator > 1:
            if not isinstance(self.group, LocalizedGroup):
                raise ValueError("denominators need a localized group")
            if self.group.inverted != RATIONAL:
                bad = _small_prime_factors(self.denominator) - set(self.group.inverted)
                if bad:
                    raise ValueError(f"denominator primes {sorted(bad)} are "
                                     "not inverted")
        # must be a well-defined self-map of the presentation
        pres = g.canonical_presentation()
        GroupHom(pres, pres, self.matrix)

    @staticmethod
    def identity(group):
        g = underlying_group(group)
        n = len(g.invariant_factors) + g.free_rank
        return Endo(group, IntMatrix.identity(n))

    @staticmethod
    def mult(group, c):
        g = underlying_group(group)
        n = len(g.invariant_factors) + g.free_rank
        return Endo(group, IntMatrix.identity(n) * int(c))


@dataclass(frozen=True)
class FixedPointPair:
    """h0/h1 with the witnessing homs into/out of the ambient group."""

    h0: object
    h1: object
    inclusion: GroupHom
    projection: GroupHom

    def to_json(self):
        return {"h0": self.h0.to_json(), "h1": self.h1.to_json()}


def fixed_points(endo):
    """Kernel and cokernel of 1 - phi, with witnesses.

    >>> from .abgroup import Zmod
    >>> pair = fixed_points(Endo.mult(Zmod(7), 2))     # 1 - 2 = -1 invertible
    >>> str(pair.h0), str(pair.h1)
    ('0', '0')
    >>> pair = fixed_points(Endo.identity(Zmod(6)))
    >>> str(pair.h0), str(pair.h1)
    ('Z/6', 'Z/6')
    """
    g = underlying_group(endo.group)
    pres = g.canonical_presentation()
    n = endo.matrix.rows
    one_minus = GroupHom(pres, pres,
                         IntMatrix.identity(n) * endo.denominator - endo.matrix)
    h0, incl = kernel(one_minus)
    h1, proj = cokernel(one_minus)
    if g.free_rank == 0:
        assert h0.order() == h1.order(), "finite two-term complex must balance"
    if isinstance(endo.group, LocalizedGroup):
        h0 = localize(h0, endo.group.inverted)
        h1 = localize(h1, endo.group.inverted)
    return FixedPointPair(h0, h1, incl, proj)


def fixed_points_mult(group, p, n):
    """Fixed points of multiplication by p**n (n may be negative if p is inverted).

    The computed value for mult-by-p on Z[1/p] is (0, Z/(p-1)): 1 - p is
    injective on a torsion-free group, and Z[1/p]/(p-1) = Z/(p-1) because p
    is already a unit mod p - 1.
    """
    if n >= 0:
        return fixed_points(Endo.mult(group, p ** n))
    if not isinstance(group, LocalizedGroup):
        raise ValueError("negative twist requires p inverted")
    if group.inverted != RATIONAL and p not in group.inverted:
        raise ValueError("negative twist requires p inverted")
    g = underlying_group(group)
    size = len(g.invariant_factors) + g.free_rank
    return fixed_points(Endo(group, IntMatrix.identity(size),
                             denominator=p ** (-n)))


# ---------------------------------------------------------------------------
# Graded assembly


def _merge_groups(a, b):
    """Direct sum across the plain/localized divide.

    Promoting a plain group into a localization is only allowed when the
    localization would not strip any of its torsion (otherwise the sum is
    not literally the direct sum of the given pieces).
    """
    a_loc = isinstance(a, LocalizedGroup)
    b_loc = isinstance(b, LocalizedGroup)
    if not a_loc and not b_loc:
        return a.direct_sum(b)
    inv_a = a.inverted if a_loc else frozenset()
    inv_b = b.inverted if b_loc else frozenset()
    union = RATIONAL if RATIONAL in (inv_a, inv_b) else (frozenset(inv_a)
                                                         | frozenset(inv_b))
    ua, ub = underlying_group(a), underlying_group(b)
    pa, pb = localize(ua, union), localize(ub, union)
    if pa.underlying != ua or pb.underlying != ub:
        raise ValueError("cannot merge: localization would strip torsion")
    return LocalizedGroup(ua.direct_sum(ub), union)


def resolve_extension(sub, quot):
    """Resolve 0 -> sub -> X -> quot -> 0 when the answer is forced.

    Returns (group, kind) or (None, None).  Forced cases: either side
    trivial, or Ext^1(quot, sub) = 0, which for f.g. groups means quot is
    torsion-free, or sub is finite with torsion order coprime to quot's.
    """
    if sub.is_trivial():
        return quot, "sub-trivial"
    if quot.is_trivial():
        return sub, "quot-trivial"
    usub, uquot = underlying_group(sub), underlying_group(quot)
    if not uquot.invariant_factors:
        return _merge_groups(sub, quot), "coprime-split"
    import math
    if (usub.free_rank == 0
            and math.gcd(usub.torsion_order(), uquot.torsion_order()) == 1):
        return _merge_groups(sub, quot), "coprime-split"
    return None, None


@dataclass(frozen=True)
class DegreePair:
    degree: int
    sub: object                   # h1 of degree n+1
    quot: object                  # h0 of degree n
    resolved_group: object = None
    resolution: str = ""

    @property
    def resolved(self):
        return self.resolved_group is not None

    def to_json(self):
        data = {"degree": self.degree,
                "sub": self.sub.to_json(),
                "quot": self.quot.to_json(),
                "resolved": self.resolved}
        if self.resolved:
            data["group"] = self.resolved_group.to_json()
            data["resolution"] = self.resolution
        return data

    def describe(self):
        if self.resolved:
            return str(self.resolved_group)
        return f"[sub {self.sub} | quot {self.quot}]"


@dataclass(frozen=True)
class GradedEndo:
    """Graded group with one endomorphism per degree; missing degrees are 0."""

    degrees: tuple                # tuple of (degree, Endo), sorted

    @staticmethod
    def from_dict(d):
        return GradedEndo(tuple(sorted(d.items())))

    def endo(self, n):
        for deg, e in self.degrees:
            if deg == n:
                return e
        return None


def assemble_degree(n, h_at_n, h_above):
    """DegreePair in degree n from h0 at n and h1 at n+1."""
    sub = h_above.h1 if h_above is not None else TRIVIAL
    quot = h_at_n.h0 if h_at_n is not None else TRIVIAL
    resolved, kind = resolve_extension(sub, quot)
    return DegreePair(n, sub, quot, resolved, kind or "")


def graded_fixed_points(graded):
    """Degreewise fixed points with long-exact-sequence assembly.

    Output covers every degree that can receive a contribution: each input
    degree n feeds quot into degree n and sub into degree n - 1.
    """
    pairs = {deg: fixed_points(e) for deg, e in graded.degrees}
    out_degrees = sorted(set(pairs) | {d - 1 for d in pairs})
    out = {}
    for n in out_degrees:
        out[n] = assemble_degree(n, pairs.get(n), pairs.get(n + 1))
    return out


# ---------------------------------------------------------------------------
# Bounded complexes


@dataclass(frozen=True)
class BoundedComplex:
    """Cochain complex of f.g. abelian groups, d_n : C^n -> C^{n+1}."""

    groups: tuple                 # tuple of (degree, FgAbGroup)
    differentials: tuple          # tuple of (degree, GroupHom)

    @staticmethod
    def build(groups, differentials):
        c = BoundedComplex(tuple(sorted(groups.items())),
                           tuple(sorted(differentials.items())))
        for n, d in c.differentials:
            nxt = c.differential(n + 1)
            if nxt is not None:
                comp = nxt.compose(d)
                zero = GroupHom.zero(d.source, nxt.target)
                if not homs_equal(comp, zero):
                    raise ValueError(f"d^2 != 0 at degree {n}")
        return c

    def group(self, n):
        for deg, g in self.groups:
            if deg == n:
                return g
        return TRIVIAL

    def differential(self, n):
        for deg, d in self.differentials:
            if deg == n:
                return d
        src = self.group(n).canonical_presentation()
        tgt = self.group(n + 1).canonical_presentation()
        return GroupHom.zero(src, tgt) if (not self.group(n).is_trivial()
                                           or not self.group(n + 1).is_trivial()) \
            else None

    def degree_range(self):
        degs = [d for d, _ in self.groups]
        return (min(degs), max(degs)) if degs else (0, -1)


def _cohomology_with_endo(cx, endo_maps, n):
    """H^n with the induced endomorphism, or None when trivially zero."""
    g = cx.group(n)
    if g.is_trivial():
        return None
    d_out = cx.differential(n)
    ker_g, incl = kernel(d_out)
    if ker_g.is_trivial():
        return None
    d_in = cx.differential(n - 1)
    into_ker = factor_through(d_in, incl)
    h_group, proj, reps = cokernel_data(into_ker)
    if h_group.is_trivial():
        return None
    phi = endo_maps.get(n)
    if phi is None:
        phi = GroupHom.identity(cx.group(n).canonical_presentation())
    phi_ker = factor_through(phi.compose(incl), incl)
    # express the descended map in cohomology coordinates: lift a generator,
    # apply phi on the kernel, project back down
    mat = proj.matrix * phi_ker.matrix * reps
    return h_group, Endo(h_group, mat)


def total_complex_fixed_points(cx, endo_maps):
    """Fixed points of an endomorphism of a bounded complex, degreewise.

    `endo_maps` is {degree: GroupHom} and must commute with the
    differentials.  In each degree the output is the forced extension

        0 -> coker(1 - phi on H^{n-1}) -> out_n -> ker(1 - phi on H^n) -> 0.
    """
    for n, phi in endo_maps.items():
        d = cx.differential(n)
        if d is not None and not cx.group(n + 1).is_trivial():
            phi_next = endo_maps.get(n + 1)
            if phi_next is None:
                phi_next = GroupHom.identity(
                    cx.group(n + 1).canonical_presentation())
            if not homs_equal(d.compose(phi), phi_next.compose(d)):
                raise ValueError(f"endo does not commute with d at degree {n}")
    lo, hi = cx.degree_range()
    pairs = {}
    for n in range(lo, hi + 1):
        h = _cohomology_with_endo(cx, endo_maps, n)
        if h is not None:
            pairs[n] = fixed_points(h[1])
    out = {}
    for n in range(lo, hi + 2):
        sub = pairs[n - 1].h1 if n - 1 in pairs else TRIVIAL
        quot = pairs[n].h0 if n in pairs else TRIVIAL
        resolved, kind = resolve_extension(sub, quot)
        out[n] = DegreePair(n, sub, quot, resolved, kind or "")
    return out
