"""Directed towers of abelian groups and their colimit-level certificates.

A tower here is a sequence of presented groups G_1 -> G_2 -> ... with one
transition per step and, optionally, an endomorphism per level commuting
with the transitions.  The motivating instance is the factorial tower of
unit groups

    level m  =  Z/(p**(m!) - 1)          (the units of a field with p**(m!)
    transition: 1 |-> (p**((m+1)!)-1) / (p**(m!)-1)        elements)
    endomorphism: multiplication by p    (the p-power map on units)

m! divides (m+1)!, so every level embeds in the next, and any finite cyclic
group of order prime to p embeds in some level — that is the point of the
factorial exponents.

Nothing here materializes a colimit.  Stabilization is certified up to the
queried level by checking transitions are isomorphisms, and colimit
vanishing is certified per generator by exhibiting a later level where the
image is the zero class.  Failure to find a witness within the search limit
is reported as inconclusive, never as success.
"""

from __future__ import annotations

import math
import os
import threading
from dataclasses import dataclass, field

from .abgroup import (FgAbGroup, GroupHom, IntMatrix, Presentation,
                      cokernel_data, element_is_zero, factor_through,
                      group_from_presentation, homs_equal, hom_is_iso, kernel)


def default_level_ceiling():
    return int(os.environ.get("FROBFIX_LEVEL_CEILING", "8"))


class ResourceCeilingError(RuntimeError):
    """A query went past the configured tower/field ceiling."""


class IndAbGroup:
    """Lazy memoized tower of presented groups.

    Levels are 1-based.  All accessors are safe under concurrent use (a
    single lock guards the memo tables; level data is pure).
    """

    def __init__(self, level_fn, transition_fn, endo_fn=None,
                 level_ceiling=None, name=""):
        self._level_fn = level_fn
        self._transition_fn = transition_fn
        self._endo_fn = endo_fn
        self.level_ceiling = (default_level_ceiling()
                              if level_ceiling is None else level_ceiling)
        self.name = name
        self._lock = threading.Lock()
        self._pres = {}
        self._trans = {}
        self._endos = {}
        self._squares_checked = set()

    def _check_level(self, m):
        if m < 1:
            raise ValueError("levels are 1-based")
        if m > self.level_ceiling:
            raise ResourceCeilingError(
                f"level {m} beyond ceiling {self.level_ceiling}"
                + (f" for {self.name}" if self.name else ""))

    def presentation(self, m):
        self._check_level(m)
        with self._lock:
            if m not in self._pres:
                self._pres[m] = self._level_fn(m)
            return self._pres[m]

    def group(self, m):
        return group_from_presentation(self.presentation(m))

    def transition(self, m):
        """Transition hom from level m to level m + 1."""
        self._check_level(m + 1)
        with self._lock:
            if m not in self._trans:
                t = self._transition_fn(m)
                self._trans[m] = t
            t = self._trans[m]
        self._verify_square(m)
        return t

    def endo(self, m):
        self._check_level(m)
        if self._endo_fn is None:
            return None
        with self._lock:
            if m not in self._endos:
                self._endos[m] = self._endo_fn(m)
            return self._endos[m]

    def _verify_square(self, m):
        """Transitions must commute with the endomorphism, level by level."""
        if self._endo_fn is None:
            return
        with self._lock:
            if m in self._squares_checked:
                return
        t = self._trans[m]
        e_low, e_high = self.endo(m), self.endo(m + 1)
        if not homs_equal(t.compose(e_low), e_high.compose(t)):
            raise ValueError(f"endo does not commute with transition at "
                             f"level {m}")
        with self._lock:
            self._squares_checked.add(m)

    def with_endo(self, endo_fn):
        """Same tower, different endomorphism."""
        return IndAbGroup(self._level_fn, self._transition_fn, endo_fn,
                          level_ceiling=self.level_ceiling, name=self.name)

    def composite_transition(self, m, target):
        """Hom from level m to level target >= m."""
        pres = self.presentation(m)
        acc = GroupHom.identity(pres)
        for k in range(m, target):
            acc = self.transition(k).compose(acc)
        return acc


def roots_of_unity_ind(p, level_ceiling=None):
    """The factorial tower of unit groups of the fields F_(p**(m!)).

    >>> t = roots_of_unity_ind(2)
    >>> str(t.group(2))              # 2**(2!) - 1
    'Z/3'
    >>> t.transition(2).matrix.entries      # Z/3 -> Z/63, 1 |-> 21
    ((21,),)
    >>> str(roots_of_unity_ind(3).group(3))  # 3**6 - 1
    'Z/728'
    """
    def order(m):
        return p ** math.factorial(m) - 1

    def level(m):
        return Presentation(1, IntMatrix.from_rows([[order(m)]]))

    def transition(m):
        return GroupHom(level(m), level(m + 1),
                        IntMatrix.from_rows([[order(m + 1) // order(m)]]))

    def endo(m):
        return GroupHom(level(m), level(m),
                        IntMatrix.from_rows([[p]]))

    return IndAbGroup(level, transition, endo,
                      level_ceiling=level_ceiling,
                      name=f"roots_of_unity({p})")


@dataclass
class IndFixedPoints:
    """Levelwise kernels and cokernels of 1 - endo, as towers themselves."""

    base: IndAbGroup
    kernels: IndAbGroup
    cokernels: IndAbGroup


def ind_fixed_points(ind, level_ceiling=None):
    """Towers of ker(1 - endo) and coker(1 - endo) with induced transitions.

    The kernel transitions are produced by factoring level transitions
    through the kernel inclusions, so the construction fails loudly if the
    endomorphism did not commute with a transition.
    """
    if ind._endo_fn is None:
        raise ValueError("tower carries no endomorphism")
    ceiling = ind.level_ceiling if level_ceiling is None else level_ceiling
    cache = {}
    lock = threading.Lock()

    def level_data(m):
        with lock:
            if m in cache:
                return cache[m]
        pres = ind.presentation(m)
        e = ind.endo(m)
        n = pres.generator_count
        one_minus = GroupHom(pres, pres, IntMatrix.identity(n) - e.matrix)
        kg, incl = kernel(one_minus)
        cg, proj, reps = cokernel_data(one_minus)
        data = (one_minus, kg, incl, cg, proj, reps)
        with lock:
            cache[m] = data
        return data

    def ker_level(m):
        return level_data(m)[2].source

    def ker_transition(m):
        incl_m = level_data(m)[2]
        incl_next = level_data(m + 1)[2]
        return factor_through(ind.transition(m).compose(incl_m), incl_next)

    def cok_level(m):
        return level_data(m)[4].target

    def cok_transition(m):
        # project level-(m+1), push the level transition, lift from level m
        proj_next = level_data(m + 1)[4]
        reps_m = level_data(m)[5]
        mat = proj_next.matrix * ind.transition(m).matrix * reps_m
        return GroupHom(cok_level(m), cok_level(m + 1), mat)

    kernels = IndAbGroup(ker_level, ker_transition,
                         level_ceiling=ceiling,
                         name=(ind.name or "tower") + ".ker")
    cokernels = IndAbGroup(cok_level, cok_transition,
                           level_ceiling=ceiling,
                           name=(ind.name or "tower") + ".coker")
    return IndFixedPoints(ind, kernels, cokernels)


@dataclass(frozen=True)
class StabilizeResult:
    stabilized: bool
    level: int          # first level from which all checked transitions are isos
    checked_to: int
    group: FgAbGroup

    def to_json(self):
        return {"stabilized": self.stabilized, "level": self.level,
                "checked_to": self.checked_to, "group": self.group.to_json()}


def stabilize(ind, max_level):
    """Detect stabilization up to max_level.

    Returns the smallest N such that every transition between levels N and
    max_level is an isomorphism, together with the level-N normal form.
    The claim is only about the checked range; nothing beyond max_level is
    asserted.
    """
    if max_level < 1:
        raise ValueError("max_level must be >= 1")
    last_bad = 0
    for m in range(1, max_level):
        if not hom_is_iso(ind.transition(m)):
            last_bad = m
    level = last_bad + 1
    stabilized = level < max_level or max_level == 1
    return StabilizeResult(stabilized, level, max_level, ind.group(level))


@dataclass(frozen=True)
class VanishingCertificate:
    certified: bool
    witnesses: tuple      # (level, generator_index, witness_level)
    failures: tuple       # (level, generator_index, searched_to)

    def to_json(self):
        return {"certified": self.certified,
                "witnesses": [list(w) for w in self.witnesses],
                "failures": [list(f) for f in self.failures]}


def colim_vanishes(ind, max_level, search_limit=None):
    """Per-generator witnesses that classes die further up the tower.

    For every generator of every level <= max_level, searches levels up to
    `search_limit` (default: the tower ceiling) for the first level where
    its image is the zero class.  A full witness list certifies that the
    colimit of the queried part vanishes; any miss is listed as a failure
    and the certificate is not granted.
    """
    limit = ind.level_ceiling if search_limit is None else search_limit
    witnesses = []
    failures = []
    for m in range(1, max_level + 1):
        pres = ind.presentation(m)
        for j in range(pres.generator_count):
            vec = tuple(1 if i == j else 0 for i in range(pres.generator_count))
            found = None
            level = m
            cur = vec
            while level <= limit:
                if element_is_zero(ind.presentation(level), cur):
                    found = level
                    break
                if level == limit:
                    break
                cur = ind.transition(level).apply(cur)
                level += 1
            if found is None:
                failures.append((m, j, limit))
            else:
                witnesses.append((m, j, found))
    return VanishingCertificate(not failures, tuple(witnesses), tuple(failures))
