"""Minimal hitting sets of a family of sets.

Two implementations of the same function: a size-ascending sweep whose
correctness is obvious, and a branching search that prunes early and copes
with larger families.  They agree on everything; the sweep doubles as a
check on the search in the tests.
"""

from __future__ import annotations

import itertools
from typing import Collection, Iterable


def is_hitting_set(candidate: Iterable, family: Iterable[Collection]) -> bool:
    """True when candidate draws only from the family's union and meets
    every non-empty member."""
    cand = set(candidate)
    fam = [set(s) for s in family]
    union: set = set()
    for s in fam:
        union |= s
    if not cand <= union:
        return False
    return all(cand & s for s in fam if s)


def minimal_hitting_sets(family: Iterable[Collection]) -> tuple[frozenset, ...]:
    """All subset-minimal hitting sets, smallest first.

    Exhaustive size-ascending enumeration over subsets of the union; once a
    set is found, its supersets are skipped, so everything kept is minimal.
    """
    fam = [frozenset(s) for s in family if s]
    union = sorted(frozenset().union(*fam)) if fam else []
    found: list[frozenset] = []
    for n in range(len(union) + 1):
        for combo in itertools.combinations(union, n):
            cand = frozenset(combo)
            if any(f <= cand for f in found):
                continue
            if all(cand & s for s in fam):
                found.append(cand)
    return tuple(sorted(found, key=lambda s: (len(s), sorted(s))))


def minimal_hitting_sets_bb(family: Iterable[Collection]) -> tuple[frozenset, ...]:
    """Same result as minimal_hitting_sets via branch and bound: branch on
    the elements of a smallest unhit member, prune supersets of solutions."""
    fam = [frozenset(s) for s in family if s]
    found: list[frozenset] = []

    def search(partial: frozenset) -> None:
        if any(f <= partial for f in found):
            return
        unhit = [s for s in fam if not s & partial]
        if not unhit:
            found.append(partial)
            # a new solution can make earlier supersets non-minimal
            found[:] = [f for f in found if not partial < f]
            return
        pivot = min(unhit, key=lambda s: (len(s), sorted(s)))
        for elem in sorted(pivot):
            search(partial | {elem})

    search(frozenset())
    dedup = []
    for f in sorted(found, key=lambda s: (len(s), sorted(s))):
        if f not in dedup and not any(g <= f and g != f for g in dedup):
            dedup.append(f)
    return tuple(dedup)
