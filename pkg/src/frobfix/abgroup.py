"""Finitely generated abelian groups with exact integer arithmetic.

A group is presented as Z^g modulo the row space of an integer relations
matrix, and normalized to invariant-factor form

    Z^r  +  Z/d1 + ... + Z/dk        with d1 | d2 | ... | dk,  di >= 2.

All arithmetic is done on Python integers: the cyclic moduli that show up
downstream (orders like p**(8!) - 1 in indgroup.py) overflow any fixed-width
type by thousands of digits, so nothing here may silently truncate.

The Smith normal form returns the unimodular transforms together with their
inverses.  kernel() and cokernel() use them to return actual homomorphisms
(inclusion of the kernel, projection onto the cokernel) expressed on
canonical presentations, not just abstract isomorphism types.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

RATIONAL = "all"


class SizeError(ValueError):
    """Raised when an enumeration is asked of an infinite or over-bound group."""


# ---------------------------------------------------------------------------
# Integer matrices


@dataclass(frozen=True)
class IntMatrix:
    """Immutable dense matrix over Z.  Entries are plain Python ints."""

    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.entries) != self.rows:
            raise ValueError("row count mismatch")
        if any(len(r) != self.cols for r in self.entries):
            raise ValueError("ragged rows")

    @staticmethod
    def from_rows(rows, cols=None):
        rows = [tuple(int(x) for x in r) for r in rows]
        if cols is None:
            if not rows:
                raise ValueError("cols required for empty matrix")
            cols = len(rows[0])
        return IntMatrix(len(rows), cols, tuple(rows))

    @staticmethod
    def identity(n):
        return IntMatrix(n, n, tuple(tuple(1 if i == j else 0 for j in range(n))
                                     for i in range(n)))

    @staticmethod
    def zero(rows, cols):
        return IntMatrix(rows, cols, tuple(tuple(0 for _ in range(cols))
                                           for _ in range(rows)))

    @staticmethod
    def diagonal(diag, rows=None, cols=None):
        rows = len(diag) if rows is None else rows
        cols = len(diag) if cols is None else cols
        return IntMatrix(rows, cols, tuple(
            tuple(diag[i] if i == j and i < len(diag) else 0
                  for j in range(cols)) for i in range(rows)))

    @staticmethod
    def hstack(a, b):
        if a.rows != b.rows:
            raise ValueError("hstack row mismatch")
        return IntMatrix(a.rows, a.cols + b.cols,
                         tuple(ra + rb for ra, rb in zip(a.entries, b.entries)))

    @staticmethod
    def vstack(a, b):
        if a.cols != b.cols:
            raise ValueError("vstack col mismatch")
        return IntMatrix(a.rows + b.rows, a.cols, a.entries + b.entries)

    def __mul__(self, other):
        if isinstance(other, int):
            return IntMatrix(self.rows, self.cols, tuple(
                tuple(x * other for x in r) for r in self.entries))
        if self.cols != other.rows:
            raise ValueError("shape mismatch in product")
        bt = other.transpose().entries
        return IntMatrix(self.rows, other.cols, tuple(
            tuple(sum(x * y for x, y in zip(row, col)) for col in bt)
            for row in self.entries))

    def __add__(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch in sum")
        return IntMatrix(self.rows, self.cols, tuple(
            tuple(x + y for x, y in zip(ra, rb))
            for ra, rb in zip(self.entries, other.entries)))

    def __sub__(self, other):
        return self + (other * -1)

    def __neg__(self):
        return self * -1

    def transpose(self):
        return IntMatrix(self.cols, self.rows,
                         tuple(tuple(r[i] for r in self.entries)
                               for i in range(self.cols)))

    def column(self, j):
        return tuple(r[j] for r in self.entries)

    def columns_as_matrix(self, idx):
        return IntMatrix(self.rows, len(idx),
                         tuple(tuple(r[j] for j in idx) for r in self.entries))

    def apply(self, vec):
        if len(vec) != self.cols:
            raise ValueError("vector length mismatch")
        return tuple(sum(x * y for x, y in zip(row, vec)) for row in self.entries)

    def is_zero(self):
        return all(all(x == 0 for x in r) for r in self.entries)

    def max_abs(self):
        return max((abs(x) for r in self.entries for x in r), default=0)


# ---------------------------------------------------------------------------
# Smith normal form
#
# Pivot strategy: at each step the remaining submatrix entry of smallest
# nonzero absolute value is moved to the pivot position, and rows/columns are
# reduced by floor division against it.  The smallest entry can only shrink
# under these reductions, which keeps intermediate growth close to the gcd
# ladder instead of the determinant ladder (important here because inputs can
# already be many-thousand-digit integers).  After the pivot clears its row
# and column, any submatrix entry it fails to divide is folded into the pivot
# row, which makes the diagonal come out as a divisibility chain directly.


class _Workspace:
    def __init__(self, a, m, n):
        self.m = m
        self.n = n
        self.w = [list(r) for r in a]
        self.u = [[1 if i == j else 0 for j in range(self.m)] for i in range(self.m)]
        self.uinv = [[1 if i == j else 0 for j in range(self.m)] for i in range(self.m)]
        self.v = [[1 if i == j else 0 for j in range(self.n)] for i in range(self.n)]
        self.vinv = [[1 if i == j else 0 for j in range(self.n)] for i in range(self.n)]

    # row ops: w <- L w, u <- L u, uinv <- uinv L^{-1}
    def swap_rows(self, i, j):
        if i == j:
            return
        self.w[i], self.w[j] = self.w[j], self.w[i]
        self.u[i], self.u[j] = self.u[j], self.u[i]
        for r in self.uinv:
            r[i], r[j] = r[j], r[i]

    def negate_row(self, i):
        self.w[i] = [-x for x in self.w[i]]
        self.u[i] = [-x for x in self.u[i]]
        for r in self.uinv:
            r[i] = -r[i]

    def add_row(self, i, j, c):
        """row i += c * row j"""
        if c == 0:
            return
        self.w[i] = [x + c * y for x, y in zip(self.w[i], self.w[j])]
        self.u[i] = [x + c * y for x, y in zip(self.u[i], self.u[j])]
        for r in self.uinv:
            r[j] -= c * r[i]

    # column ops: w <- w R, v <- v R, vinv <- R^{-1} vinv
    def swap_cols(self, i, j):
        if i == j:
            return
        for r in self.w:
            r[i], r[j] = r[j], r[i]
        for r in self.v:
            r[i], r[j] = r[j], r[i]
        self.vinv[i], self.vinv[j] = self.vinv[j], self.vinv[i]

    def negate_col(self, i):
        for r in self.w:
            r[i] = -r[i]
        for r in self.v:
            r[i] = -r[i]
        self.vinv[i] = [-x for x in self.vinv[i]]

    def add_col(self, i, j, c):
        """col i += c * col j"""
        if c == 0:
            return
        for r in self.w:
            r[i] += c * r[j]
        for r in self.v:
            r[i] += c * r[j]
        self.vinv[j] = [x - c * y for x, y in zip(self.vinv[j], self.vinv[i])]

    def min_entry_pos(self, t):
        best = None
        for i in range(t, self.m):
            row = self.w[i]
            for j in range(t, self.n):
                x = row[j]
                if x != 0 and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
        return None if best is None else (best[1], best[2])


def _mat(rows_list, nrows, ncols):
    return IntMatrix(nrows, ncols, tuple(tuple(r) for r in rows_list))


def _snf_workspace(a):
    ws = _Workspace(a.entries, a.rows, a.cols)
    m, n = ws.m, ws.n
    t = 0
    while t < min(m, n):
        pos = ws.min_entry_pos(t)
        if pos is None:
            break
        ws.swap_rows(t, pos[0])
        ws.swap_cols(t, pos[1])
        while True:
            # clear column t below the pivot
            dirty = False
            for i in range(t + 1, m):
                if ws.w[i][t] != 0:
                    q = ws.w[i][t] // ws.w[t][t]
                    ws.add_row(i, t, -q)
                    if ws.w[i][t] != 0:
                        ws.swap_rows(t, i)   # strictly smaller remainder up
                        dirty = True
            if dirty:
                continue
            # clear row t right of the pivot
            for j in range(t + 1, n):
                if ws.w[t][j] != 0:
                    q = ws.w[t][j] // ws.w[t][t]
                    ws.add_col(j, t, -q)
                    if ws.w[t][j] != 0:
                        ws.swap_cols(t, j)
                        dirty = True
            if dirty:
                continue
            # pivot must divide the rest of the submatrix for the chain
            pivot = ws.w[t][t]
            offender = None
            for i in range(t + 1, m):
                row = ws.w[i]
                for j in range(t + 1, n):
                    if row[j] % pivot != 0:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            ws.add_row(t, offender, 1)
        if ws.w[t][t] < 0:
            ws.negate_row(t)
        t += 1
    return ws


def smith_normal_form(a):
    """Return (U, D, V) with U*a*V = D diagonal, d1 | d2 | ..., U, V unimodular.

    >>> a = IntMatrix.from_rows([[2, 4], [6, 8]])
    >>> u, d, v = smith_normal_form(a)
    >>> [d.entries[i][i] for i in range(2)]
    [2, 4]
    >>> u * a * v == d
    True
    """
    ws = _snf_workspace(a)
    u = _mat(ws.u, a.rows, a.rows)
    v = _mat(ws.v, a.cols, a.cols)
    d = _mat(ws.w, a.rows, a.cols)
    assert u * a * v == d, "smith normal form transform check failed"
    return u, d, v


def _snf_full(a):
    """Like smith_normal_form but also returns the transform inverses."""
    ws = _snf_workspace(a)
    u = _mat(ws.u, a.rows, a.rows)
    uinv = _mat(ws.uinv, a.rows, a.rows)
    v = _mat(ws.v, a.cols, a.cols)
    vinv = _mat(ws.vinv, a.cols, a.cols)
    d = _mat(ws.w, a.rows, a.cols)
    assert u * a * v == d
    assert u * uinv == IntMatrix.identity(a.rows)
    assert vinv * v == IntMatrix.identity(a.cols)
    return u, uinv, d, v, vinv


def solve_columns(a, b):
    """Integer solution X of a*X = b, or None.

    Solves column by column through the Smith form: with U a V = D the system
    becomes D y = U b, which is diagonal divisibility.
    """
    if a.rows != b.rows:
        raise ValueError("shape mismatch")
    u, _, d, v, _ = _snf_full(a)
    ub = u * b
    cols = []
    for jc in range(b.cols):
        c = ub.column(jc)
        y = [0] * a.cols
        ok = True
        for i in range(a.rows):
            di = d.entries[i][i] if i < a.cols else 0
            if di != 0:
                if c[i] % di != 0:
                    ok = False
                    break
                y[i] = c[i] // di
            elif c[i] != 0:
                ok = False
                break
        if not ok:
            return None
        cols.append(v.apply(tuple(y)))
    return IntMatrix(a.cols, b.cols,
                     tuple(tuple(col[i] for col in cols) for i in range(a.cols)))


def nullspace(a):
    """Matrix whose columns are a lattice basis of {x in Z^n : a x = 0}.

    The basis is saturated (it spans the full integer kernel, not a finite
    index sublattice) because it consists of columns of a unimodular V.
    """
    _, d, v = smith_normal_form(a)
    free = [j for j in range(a.cols)
            if j >= a.rows or d.entries[j][j] == 0]
    return v.columns_as_matrix(free)


# ---------------------------------------------------------------------------
# Normal forms


def _invariant_chain(orders):
    """Normalize a multiset of cyclic orders to an invariant-factor chain.

    Uses gcd/lcm exchanges only, so it works on enormous moduli without
    factoring:  Z/a + Z/b  =  Z/gcd(a,b) + Z/lcm(a,b).
    """
    vals = [abs(int(x)) for x in orders if abs(int(x)) != 1]
    if any(v == 0 for v in vals):
        raise ValueError("zero is not a finite cyclic order")
    changed = True
    while changed:
        changed = False
        for i in range(len(vals)):
            for j in range(i + 1, len(vals)):
                a, b = vals[i], vals[j]
                if a % b and b % a:
                    g = math.gcd(a, b)
                    vals[i], vals[j] = g, a * b // g
                    changed = True
        vals = [v for v in vals if v != 1]
    return _chain_sorted(vals)


def _chain_sorted(vals):
    out = sorted(vals)
    for a, b in zip(out, out[1:]):
        assert b % a == 0
    return tuple(out)


@dataclass(frozen=True)
class FgAbGroup:
    """Invariant-factor normal form of a finitely generated abelian group.

    >>> FgAbGroup(1, (2, 4))
    FgAbGroup(free_rank=1, invariant_factors=(2, 4))
    >>> str(FgAbGroup(0, (6,)))
    'Z/6'
    >>> FgAbGroup(0, ()).is_trivial()
    True
    """

    free_rank: int = 0
    invariant_factors: tuple[int, ...] = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("negative free rank")
        object.__setattr__(self, "invariant_factors",
                           tuple(int(d) for d in self.invariant_factors))
        for d in self.invariant_factors:
            if d < 2:
                raise ValueError("invariant factors must be >= 2")
        for a, b in zip(self.invariant_factors, self.invariant_factors[1:]):
            if b % a != 0:
                raise ValueError("invariant factors must form a divisibility chain")

    def is_trivial(self):
        return self.free_rank == 0 and not self.invariant_factors

    def order(self):
        """Group order, or None when infinite."""
        if self.free_rank > 0:
            return None
        return math.prod(self.invariant_factors)

    def exponent(self):
        if self.free_rank > 0:
            return None
        return self.invariant_factors[-1] if self.invariant_factors else 1

    def torsion_order(self):
        return math.prod(self.invariant_factors)

    def direct_sum(self, other):
        chain = _invariant_chain(self.invariant_factors + other.invariant_factors)
        return FgAbGroup(self.free_rank + other.free_rank, chain)

    def canonical_presentation(self):
        """Torsion generators first (chain order), then free generators."""
        k = len(self.invariant_factors)
        g = k + self.free_rank
        rels = IntMatrix.from_rows(
            [[self.invariant_factors[i] if j == i else 0 for j in range(g)]
             for i in range(k)], g) if k else IntMatrix.zero(0, g)
        return Presentation(g, rels)

    def to_json(self):
        return {"free_rank": self.free_rank,
                "invariant_factors": list(self.invariant_factors)}

    def __str__(self):
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{d}" for d in self.invariant_factors)
        return " x ".join(parts) if parts else "0"


TRIVIAL = FgAbGroup(0, ())
Z = FgAbGroup(1, ())


def Zmod(n):
    n = abs(int(n))
    if n == 0:
        return Z
    if n == 1:
        return TRIVIAL
    return FgAbGroup(0, (n,))


@dataclass(frozen=True)
class Presentation:
    """Z^generator_count modulo the row space of `relations`."""

    generator_count: int
    relations: IntMatrix

    def __post_init__(self):
        if self.relations.cols != self.generator_count:
            raise ValueError("relations width must equal generator count")

    def relation_lattice(self):
        """Relations as columns: the sublattice of Z^g being quotiented."""
        return self.relations.transpose()


def group_from_presentation(pres):
    """Normal form of a presented group.

    >>> p = Presentation(2, IntMatrix.from_rows([[2, 2], [0, 4]]))
    >>> str(group_from_presentation(p))
    'Z/2 x Z/4'
    """
    _, d, _ = smith_normal_form(pres.relations)
    n = pres.generator_count
    diag = [d.entries[i][i] for i in range(min(pres.relations.rows, n))]
    factors = _chain_sorted([x for x in diag if x not in (0, 1)])
    rank = sum(1 for x in diag if x != 0)
    return FgAbGroup(n - rank, factors)


@dataclass(frozen=True)
class NormalizedPresentation:
    group: FgAbGroup
    presentation: Presentation      # == group.canonical_presentation()
    to_normal: "GroupHom"           # original presentation -> canonical
    from_normal: "GroupHom"         # canonical -> original presentation


def normalize_presentation(pres):
    """Normal form together with explicit change-of-basis homs both ways.

    The two homs compose to the identity in both directions (up to
    relations), which is what lets kernel() and cokernel() return honest
    inclusion/projection maps.
    """
    m = pres.relation_lattice()                       # g x r
    u, uinv, d, _, _ = _snf_full(m)
    g = pres.generator_count

    def dval(j):
        return d.entries[j][j] if j < min(m.rows, m.cols) else 0

    kept = [j for j in range(g) if dval(j) != 1]
    factors = _chain_sorted([dval(j) for j in kept if dval(j) >= 2])
    group = FgAbGroup(sum(1 for j in kept if dval(j) == 0), factors)
    canon = group.canonical_presentation()
    to_rows = [u.entries[j] for j in kept]
    to_matrix = (IntMatrix.from_rows(to_rows, g) if kept
                 else IntMatrix.zero(0, g))
    from_matrix = uinv.columns_as_matrix(kept)
    to_normal = GroupHom(pres, canon, to_matrix)
    from_normal = GroupHom(canon, pres, from_matrix)
    return NormalizedPresentation(group, canon, to_normal, from_normal)


# ---------------------------------------------------------------------------
# Homomorphisms


@dataclass(frozen=True)
class GroupHom:
    """Homomorphism between presented groups, as a matrix on generators.

    Well-definedness is verified at construction: there must be an integer
    witness W with  matrix * Rel_source^T = Rel_target^T * W,  i.e. the
    matrix maps source relations into target relations.
    """

    source: Presentation
    target: Presentation
    matrix: IntMatrix

    def __post_init__(self):
        if self.matrix.cols != self.source.generator_count:
            raise ValueError("matrix width must equal source generators")
        if self.matrix.rows != self.target.generator_count:
            raise ValueError("matrix height must equal target generators")
        lhs = self.matrix * self.source.relation_lattice()
        if solve_columns(self.target.relation_lattice(), lhs) is None:
            raise ValueError("matrix does not carry source relations into "
                             "target relations")

    @staticmethod
    def identity(pres):
        return GroupHom(pres, pres, IntMatrix.identity(pres.generator_count))

    @staticmethod
    def zero(source, target):
        return GroupHom(source, target,
                        IntMatrix.zero(target.generator_count,
                                       source.generator_count))

    def compose(self, other):
        """self o other (apply `other` first)."""
        if other.target.generator_count != self.source.generator_count:
            raise ValueError("composition shape mismatch")
        return GroupHom(other.source, self.target, self.matrix * other.matrix)

    def apply(self, vec):
        return self.matrix.apply(vec)


def element_is_zero(pres, vec):
    """Is the generator-coordinate vector the zero element of the group?"""
    col = IntMatrix(len(vec), 1, tuple((int(x),) for x in vec))
    return solve_columns(pres.relation_lattice(), col) is not None


def homs_equal(f, g):
    """Equality as maps of presented groups (matrices may differ by relations)."""
    if f.source.generator_count != g.source.generator_count:
        return False
    if f.target.generator_count != g.target.generator_count:
        return False
    diff = f.matrix - g.matrix
    return solve_columns(f.target.relation_lattice(), diff) is not None


def kernel(f):
    """Kernel subgroup with its inclusion hom.

    Returns (group, incl) where incl maps the canonical presentation of the
    kernel into f.source.  The kernel lattice is the projection to source
    coordinates of the integer nullspace of [matrix | target relations].

    >>> g = Zmod(24)
    >>> f = GroupHom(g.canonical_presentation(), g.canonical_presentation(),
    ...              IntMatrix.from_rows([[-4]]))
    >>> ker, incl = kernel(f)
    >>> str(ker)
    'Z/4'
    >>> incl.matrix.entries    # generated by the class of 6 in Z/24
    ((6,),)
    """
    stacked = IntMatrix.hstack(f.matrix, f.target.relation_lattice())
    null = nullspace(stacked)
    s = f.source.generator_count
    gen_mat = IntMatrix(s, null.cols, tuple(null.entries[i] for i in range(s)))
    rel_stack = IntMatrix.hstack(gen_mat, f.source.relation_lattice())
    rel_null = nullspace(rel_stack)
    rel_rows = [tuple(rel_null.entries[i][j] for i in range(gen_mat.cols))
                for j in range(rel_null.cols)]
    pres = Presentation(gen_mat.cols,
                        IntMatrix.from_rows(rel_rows, gen_mat.cols)
                        if rel_rows else IntMatrix.zero(0, gen_mat.cols))
    norm = normalize_presentation(pres)
    incl_mat = gen_mat * norm.from_normal.matrix
    # fix generator signs (a diagonal +-1 automorphism of the canonical
    # presentation) so the inclusion is deterministic across pivot choices
    cols = []
    for j in range(incl_mat.cols):
        col = incl_mat.column(j)
        lead = next((x for x in col if x != 0), 0)
        cols.append(tuple(-x for x in col) if lead < 0 else col)
    incl_mat = IntMatrix(incl_mat.rows, incl_mat.cols,
                         tuple(tuple(c[i] for c in cols)
                               for i in range(incl_mat.rows)))
    incl = GroupHom(norm.presentation, f.source, incl_mat)
    return norm.group, incl


def cokernel_data(f):
    """(group, projection, representatives) for coker(f).

    `representatives` is a raw matrix whose columns lift the canonical
    cokernel generators to f.target coordinates (it is a section of the
    projection on generators, not a hom).
    """
    extra = f.matrix.transpose()
    rels = IntMatrix.vstack(f.target.relations, extra)
    pres = Presentation(f.target.generator_count, rels)
    norm = normalize_presentation(pres)
    proj = GroupHom(f.target, norm.presentation, norm.to_normal.matrix)
    return norm.group, proj, norm.from_normal.matrix


def cokernel(f):
    """Cokernel with its projection hom from f.target.

    >>> g = Zmod(24)
    >>> f = GroupHom(g.canonical_presentation(), g.canonical_presentation(),
    ...              IntMatrix.from_rows([[-4]]))
    >>> cok, proj = cokernel(f)
    >>> str(cok)
    'Z/4'
    """
    group, proj, _ = cokernel_data(f)
    return group, proj


def factor_through(f, thru):
    """g with thru o g == f, for f: A -> C and thru: B -> C containing im f.

    Raises ValueError when no integer factorization exists.  Used to push
    transition maps down to kernel subgroups.
    """
    if f.target.generator_count != thru.target.generator_count:
        raise ValueError("targets differ")
    stacked = IntMatrix.hstack(thru.matrix, thru.target.relation_lattice())
    sol = solve_columns(stacked, f.matrix)
    if sol is None:
        raise ValueError("map does not factor through the given subgroup")
    b = thru.source.generator_count
    g_mat = IntMatrix(b, f.matrix.cols,
                      tuple(sol.entries[i] for i in range(b)))
    g = GroupHom(f.source, thru.source, g_mat)
    assert homs_equal(thru.compose(g), f)
    return g


def hom_is_iso(f):
    ker, _ = kernel(f)
    cok, _ = cokernel(f)
    return ker.is_trivial() and cok.is_trivial()


# ---------------------------------------------------------------------------
# Localization


@dataclass(frozen=True)
class LocalizedGroup:
    """A normal form together with the set of primes made invertible.

    `inverted` is either a frozenset of primes or the string "all"
    (rationalization).  The stored normal form already has the inverted
    torsion stripped, so Z/24 with 2 inverted is stored as Z/3.
    """

    underlying: FgAbGroup
    inverted: object = frozenset()

    def __post_init__(self):
        if self.inverted != RATIONAL:
            object.__setattr__(self, "inverted",
                               frozenset(int(p) for p in self.inverted))
            for p in self.inverted:
                if p < 2:
                    raise ValueError("invalid prime")
            for d in self.underlying.invariant_factors:
                for p in self.inverted:
                    if d % p == 0:
                        raise ValueError("underlying group not reduced")
        elif self.underlying.invariant_factors:
            raise ValueError("rationalized group cannot have torsion")

    def is_trivial(self):
        return self.underlying.is_trivial()

    def order(self):
        return self.underlying.order()

    def free_rank(self):
        return self.underlying.free_rank

    def invariant_factors(self):
        return self.underlying.invariant_factors

    def to_json(self):
        data = self.underlying.to_json()
        data["inverted_primes"] = (RATIONAL if self.inverted == RATIONAL
                                   else sorted(self.inverted))
        return data

    def __str__(self):
        if self.inverted == RATIONAL:
            r = self.underlying.free_rank
            return "0" if r == 0 else ("Q" if r == 1 else f"Q^{r}")
        if not self.inverted:
            return str(self.underlying)
        label = "Z[1/%d]" % math.prod(sorted(self.inverted))
        parts = []
        r = self.underlying.free_rank
        if r == 1:
            parts.append(label)
        elif r > 1:
            parts.append(f"{label}^{r}")
        parts.extend(f"Z/{d}" for d in self.underlying.invariant_factors)
        return " x ".join(parts) if parts else "0"


def _strip(d, primes):
    for p in primes:
        while d % p == 0:
            d //= p
    return d


def localize(group, primes):
    """Invert a set of primes (or RATIONAL for full rationalization).

    >>> str(localize(Zmod(24), {2}))
    'Z/3'
    >>> str(localize(FgAbGroup(1, (6,)), RATIONAL))
    'Q'
    """
    if isinstance(group, LocalizedGroup):
        base = group.underlying
        if group.inverted == RATIONAL or primes == RATIONAL:
            merged = RATIONAL
        else:
            merged = frozenset(group.inverted) | frozenset(primes)
    else:
        base = group
        merged = RATIONAL if primes == RATIONAL else frozenset(primes)
    if merged == RATIONAL:
        return LocalizedGroup(FgAbGroup(base.free_rank, ()), RATIONAL)
    factors = [_strip(d, merged) for d in base.invariant_factors]
    stripped = FgAbGroup(base.free_rank,
                         _chain_sorted([d for d in factors if d > 1]))
    return LocalizedGroup(stripped, merged)


def underlying_group(g):
    return g.underlying if isinstance(g, LocalizedGroup) else g


# ---------------------------------------------------------------------------
# Enumeration (the brute-force oracle layer)


def enumerate_elements(group, bound=10000):
    """All elements of a finite group as coordinate tuples.

    Coordinates follow the canonical presentation: one coordinate per
    invariant factor, reduced mod that factor.  Groups that are infinite or
    larger than `bound` are rejected with SizeError.

    >>> enumerate_elements(Zmod(4))
    [(0,), (1,), (2,), (3,)]
    """
    group = underlying_group(group)
    if group.free_rank > 0:
        raise SizeError("cannot enumerate an infinite group")
    order = group.order()
    if order > bound:
        raise SizeError(f"group order {order} exceeds bound {bound}")
    return [tuple(v) for v in itertools.product(
        *(range(d) for d in group.invariant_factors))]


def reduce_element(group, vec):
    group = underlying_group(group)
    ds = group.invariant_factors
    k = len(ds)
    return tuple(int(x) % ds[i] if i < k else int(x)
                 for i, x in enumerate(vec))


def add_elements(group, a, b):
    return reduce_element(group, tuple(x + y for x, y in zip(a, b)))


def scale_element(group, c, a):
    return reduce_element(group, tuple(c * x for x in a))
