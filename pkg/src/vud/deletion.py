"""View deletion through contrapositive clauses and a splitting tableau.

To delete a derivable view atom, every proof of it must lose a stored fact.
The ground rules that actually fire are turned into contrapositives: from
``p :- a, e`` comes ``del(a) or del(e) :- del(p)``, written here with negated
literals standing for the deletions.  A tableau over these clauses, seeded
with the deletion request, splits on each disjunction; every open saturated
branch collects one complete way of cutting all proofs, and its stored-fact
part is a candidate deletion.

A second transformation pivots on the current model instead of deleting
everything: atoms true in the model move across the arrow negated, atoms
false in it stay in place.  The resulting clauses mention both deletions and
(positive) insertions, which suits reasoning over a materialized view, at
the price of branches that are not always minimal.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .explain import local_explanations, minimal_members
from .lang import Atom, Database, Literal, Rule
from .semantics import fixpoint_model, least_model, reduct


@dataclass(frozen=True)
class Clause:
    """Disjunctive clause: body conjunction implies head disjunction."""

    head: tuple[Literal, ...]
    body: tuple[Literal, ...] = ()

    def __str__(self) -> str:
        head = " ; ".join(str(l) for l in self.head)
        if not self.body:
            return head or ":-"
        body = ", ".join(str(l) for l in self.body)
        return "%s :- %s" % (head, body) if head else ":- " + body


def transform_rules(rules: Iterable[Rule], pivot: frozenset[Atom]) -> tuple[Clause, ...]:
    """Move every atom of each ground rule that lies in the pivot across the
    arrow, negated.  Rules must be ground and free of negation."""
    out: list[Clause] = []
    for r in rules:
        head: list[Literal] = []
        body: list[Literal] = []
        if r.head is not None:
            if r.head in pivot:
                body_tail = [Literal(r.head, negated=True)]
            else:
                head.append(Literal(r.head))
                body_tail = []
        else:
            body_tail = []
        for lit in r.body:
            if lit.negated:
                raise ValueError("transformation expects negation-free rules, got %s" % r)
            if lit.atom in pivot:
                head.append(Literal(lit.atom, negated=True))
            else:
                body.append(Literal(lit.atom))
        out.append(Clause(tuple(head), tuple(body + body_tail)))
    return tuple(out)


def deletion_program(db: Database, model: frozenset[Atom] | None = None) -> tuple[Clause, ...]:
    """Contrapositives of exactly the ground rules that fire in the model.

    Rules whose body fails in the model contribute nothing to any proof, so
    they are dropped rather than translated; keeping them would send the
    tableau chasing deletions of facts that are not even stored.
    """
    if model is None:
        model = least_model(db)
    fired = [
        r
        for r in reduct(db.idb, model, db.universe())
        if all(l.atom in model for l in r.body)
    ]
    return transform_rules(fired, model)


def materialized_program(db: Database, model: frozenset[Atom] | None = None) -> tuple[Clause, ...]:
    """Every ground rule and constraint pivoted on the current model.

    Unlike deletion_program this keeps non-firing rules, so the clause set
    can talk about insertions as well as deletions, and it carries the
    denial constraints along as closing clauses.
    """
    if model is None:
        model = least_model(db)
    universe = db.universe()
    clauses = list(transform_rules(reduct(db.idb, model, universe), model))
    clauses.extend(transform_rules(reduct(db.ic, model, universe), model))
    return tuple(clauses)


def delete_request(atom: Atom) -> Clause:
    return Clause((Literal(atom, negated=True),))


def insert_request(atom: Atom) -> Clause:
    return Clause((Literal(atom),))


@dataclass(frozen=True)
class Branch:
    literals: frozenset[Literal]
    order: tuple[Literal, ...]
    closed: bool


@dataclass(frozen=True)
class Tableau:
    """Finished branches plus search effort counters.

    peak_live is the largest number of branches simultaneously pending
    during the depth-first construction; it stays small even when the
    number of finished branches explodes.
    """

    branches: tuple[Branch, ...]
    peak_live: int
    expansions: int

    def open(self) -> tuple[Branch, ...]:
        return tuple(b for b in self.branches if not b.closed)


def build_tableau(clauses: Sequence[Clause], request: Clause) -> Tableau:
    """Depth-first saturation, always applying the first applicable clause.

    A clause applies to a branch when its body is contained in the branch
    and none of its head literals is already there.  Applying it splits the
    branch per head literal; a literal whose complement is on the branch
    closes its child, an empty head closes the branch itself.  Termination:
    every child strictly grows the branch within a fixed literal universe.
    """
    program = (request,) + tuple(clauses)
    stack: list[tuple[Literal, ...]] = [()]
    branches: list[Branch] = []
    peak = 0
    expansions = 0
    while stack:
        peak = max(peak, len(stack))
        order = stack.pop()
        lits = frozenset(order)
        chosen = None
        for c in program:
            if set(c.body) <= lits and not set(c.head) & lits:
                chosen = c
                break
        if chosen is None:
            branches.append(Branch(lits, order, closed=False))
            continue
        expansions += 1
        if not chosen.head:
            branches.append(Branch(lits, order, closed=True))
            continue
        children: list[tuple[Literal, ...]] = []
        for disjunct in chosen.head:
            if disjunct.complement() in lits:
                branches.append(Branch(lits | {disjunct}, order + (disjunct,), closed=True))
            else:
                children.append(order + (disjunct,))
        stack.extend(reversed(children))
    return Tableau(tuple(branches), peak, expansions)


def branch_deletions(branch: Branch, edb: frozenset[Atom]) -> frozenset[Atom]:
    """The stored facts a branch wants gone."""
    return frozenset(l.atom for l in branch.literals if l.negated and l.atom in edb)


def branch_additions(branch: Branch, edb: frozenset[Atom], base_preds: frozenset[str]) -> frozenset[Atom]:
    """The absent base facts a branch wants stored."""
    return frozenset(
        l.atom
        for l in branch.literals
        if not l.negated and l.atom.pred in base_preds and l.atom not in edb
    )


def _dedup(sets: Iterable[frozenset[Atom]]) -> tuple[frozenset[Atom], ...]:
    seen: list[frozenset[Atom]] = []
    for s in sets:
        if s not in seen:
            seen.append(s)
    return tuple(seen)


def strongly_minimal(db: Database, atom: Atom, candidate: frozenset[Atom]) -> bool:
    """True when the deletion works and every deleted fact individually
    matters: putting any single one back restores a proof of the atom."""
    base = db.edb - candidate
    universe = db.universe()
    if atom in fixpoint_model(db.idb, base, universe):
        return False
    for s in candidate:
        if atom not in fixpoint_model(db.idb, base | {s}, universe):
            return False
    return True


def deletion_candidates(
    db: Database,
    atom: Atom,
    minimality: bool = True,
    model: frozenset[Atom] | None = None,
) -> tuple[frozenset[Atom], ...]:
    """Sets of stored facts whose removal makes atom underivable, one per
    open tableau branch, in branch order.

    With minimality on, branches that delete more than needed are filtered
    by the put-one-back test.  An atom that is not derivable to begin with
    needs no deletion and yields the single empty candidate.
    """
    if model is None:
        model = least_model(db)
    if atom not in model:
        return (frozenset(),)
    tableau = build_tableau(deletion_program(db, model), delete_request(atom))
    candidates = _dedup(branch_deletions(b, db.edb) for b in tableau.open())
    if minimality:
        candidates = tuple(c for c in candidates if strongly_minimal(db, atom, c))
    return tuple(candidates)


def edb_cuts(db: Database, atom: Atom, model: frozenset[Atom] | None = None) -> tuple[frozenset[Atom], ...]:
    """Deletion candidates the explanation way: pick one stored fact out of
    every proof, then keep the subset-minimal picks.  Agrees with the
    tableau route; exists as an independently simple formulation."""
    family = local_explanations(db, atom, model)
    if not family:
        return ()
    picks = {frozenset(choice) for choice in itertools.product(*(sorted(s) for s in family))}
    return tuple(minimal_members(picks))
