"""Explanations: which base facts a derivable atom rests on.

A local explanation is the set of stored facts consumed by one proof branch;
it is minimal for that branch but different branches may overlap, so the
family as a whole need not be subset-minimal.  explanations() reduces the
family to its subset-minimal members.  For an underivable atom the same
machinery run with hypothesised facts reports which absent base facts each
almost-proof needs.
"""

from __future__ import annotations

from .lang import Atom, Database
from .semantics import build_proof_tree, least_model


def _dedup(sets) -> tuple[frozenset[Atom], ...]:
    seen = []
    for s in sets:
        if s not in seen:
            seen.append(s)
    return tuple(seen)


def minimal_members(family) -> tuple[frozenset[Atom], ...]:
    """Subset-minimal members, smallest first, ties broken lexically."""
    fam = sorted(set(family), key=lambda s: (len(s), sorted(s)))
    out: list[frozenset[Atom]] = []
    for s in fam:
        if not any(m < s for m in out):
            out.append(s)
    return tuple(out)


def local_explanations(
    db: Database, atom: Atom, model: frozenset[Atom] | None = None
) -> tuple[frozenset[Atom], ...]:
    """Fact sets of the individual proofs of atom, in proof order."""
    tree = build_proof_tree(db, atom, model=model)
    return _dedup(tree.success_sets())


def explanations(
    db: Database, atom: Atom, model: frozenset[Atom] | None = None
) -> tuple[frozenset[Atom], ...]:
    """Subset-minimal sets of stored facts that make atom derivable."""
    return minimal_members(local_explanations(db, atom, model))


def missing_support(
    db: Database, atom: Atom, model: frozenset[Atom] | None = None
) -> tuple[frozenset[Atom], ...]:
    """Assumption sets of branches that would prove atom if the listed
    absent base facts were stored, in proof order."""
    tree = build_proof_tree(db, atom, hypothesize=True, model=model)
    return _dedup(tree.hypothesised_sets())


def support_union(db: Database, atom: Atom, model: frozenset[Atom] | None = None) -> frozenset[Atom]:
    """Every stored fact touched by some proof of atom."""
    fam = local_explanations(db, atom, model)
    return frozenset().union(*fam) if fam else frozenset()


def missing_union(db: Database, atom: Atom, model: frozenset[Atom] | None = None) -> frozenset[Atom]:
    """Every absent base fact touched by some almost-proof of atom."""
    fam = missing_support(db, atom, model)
    return frozenset().union(*fam) if fam else frozenset()
