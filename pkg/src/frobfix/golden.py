"""Expected tables for the command line golden-check mode.

This module is data: the closed-form answers that the computation layer is
supposed to reproduce from first principles.  Nothing in here is imported by
the computation modules, so a check that passes really is a comparison of two
independent routes to the same table.

Cells are encoded in a normal form shared with the CLI:

    (free_rank, torsion_factors, inverted_primes)

where ``torsion_factors`` is the invariant-factor chain as a tuple and
``inverted_primes`` is () for a plain group and a sorted tuple of primes for
a localized one.
"""

TRIVIAL_CELL = (0, (), ())

# Degree window of the reference K-theory table.
K_DEGREE_RANGE = (-1, 12)


def expected_k_cell(p, n):
    """Closed-form K-table cell in degree n.

    Z in degrees -1 and 0, Z/(p^i - 1) in degree 2i - 1, zero elsewhere.

    >>> expected_k_cell(3, 3)
    (0, (8,), ())
    >>> expected_k_cell(2, 1)
    (0, (), ())
    """
    if n in (-1, 0):
        return (1, (), ())
    if n >= 1 and n % 2 == 1:
        d = p ** ((n + 1) // 2) - 1
        if d > 1:
            return (0, (d,), ())
    return TRIVIAL_CELL


def expected_k_table(p, n_max=12):
    """Degree -> cell dict for the reference K-theory table."""
    return {n: expected_k_cell(p, n) for n in range(-1, n_max + 1)}


# Stable-stem table rows r in {0, -1}, columns n in [-2, 3].
PI_ROWS = (0, -1)
PI_COLS = (-2, -1, 0, 1, 2, 3)


def expected_pi_cell(p, r, n):
    """Closed-form stable-stem table cell at (row r, column n) for odd p.

    >>> expected_pi_cell(5, 0, 0)
    (1, (2, 2), (5,))
    >>> expected_pi_cell(3, 0, 2)
    (0, (8,), (3,))
    """
    if r == 0:
        if n == -1:
            return (0, (p - 1,), ()) if p > 2 else TRIVIAL_CELL
        if n == 0:
            return (1, (2, 2), (p,))
        if n == 1:
            return (0, (2,), ())
        if n == 2:
            m = 24
            while m % p == 0:
                m //= p
            return (0, (m,), (p,))
    if r == -1 and n == 0:
        return (1, (), (p,))
    return TRIVIAL_CELL


def expected_pi_table(p):
    """(row, column) -> cell dict for the stable-stem table."""
    return {(r, n): expected_pi_cell(p, r, n) for r in PI_ROWS for n in PI_COLS}
