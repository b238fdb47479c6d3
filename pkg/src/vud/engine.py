"""The update engine: turn a view-level request into fact-level changes.

A request names atoms to insert and atoms to delete.  Each goal first gets
its own candidate family (the delta search for insertions, the tableau for
deletions; base atoms are changed directly), the families are combined, and
every combination is verified against the whole request and the
constraints.  A combination that fails is re-expanded against its own
result state, so goals that interact (one goal's change breaking another)
are still solved; constraint violations go through the bounded repair
search.  If nothing survives, the request is unrealizable and the error
carries a trace of what was tried.

Two variants: "minimal" filters each family and the final alternatives
down to an antichain of smallest changes; "materialized" runs deletions on
the transformed program for the whole database (reusable across requests
via MaterializedViewCache) and reports every verified branch.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass

from .deletion import (
    Clause,
    branch_additions,
    branch_deletions,
    build_tableau,
    delete_request,
    deletion_candidates,
    materialized_program,
)
from .insertion import insertion_candidates
from .lang import Atom, Database, Rule, Transaction
from .revision import rationality_report, repair_constraints
from .semantics import check_ic, least_model


class UnrealizableError(Exception):
    """No fact-level change realises the request."""

    def __init__(self, message: str, trace: tuple[str, ...] = ()):
        super().__init__(message)
        self.trace = trace

    def __str__(self) -> str:
        base = super().__str__()
        if not self.trace:
            return base
        return base + "\n  " + "\n  ".join(self.trace)


@dataclass(frozen=True)
class UpdateRequest:
    inserts: tuple[Atom, ...] = ()
    deletes: tuple[Atom, ...] = ()

    def __str__(self) -> str:
        parts = ["+%s" % a for a in self.inserts] + ["-%s" % a for a in self.deletes]
        return ", ".join(parts) if parts else "no change"

    @property
    def goals(self) -> tuple[tuple[str, Atom], ...]:
        return tuple(("insert", a) for a in self.inserts) + tuple(
            ("delete", a) for a in self.deletes
        )


@dataclass(frozen=True)
class PostulateReport:
    """Rationality audit of the chosen transaction for one goal."""

    goal: Atom
    operation: str
    checks: tuple[tuple[str, bool], ...]

    @property
    def ok(self) -> bool:
        return all(v for _, v in self.checks)

    @property
    def failures(self) -> tuple[str, ...]:
        return tuple(k for k, v in self.checks if not v)


@dataclass(frozen=True)
class UpdateResult:
    request: UpdateRequest
    variant: str
    alternatives: tuple[Transaction, ...]
    chosen: Transaction
    database: Database
    postulates: tuple[PostulateReport, ...] = ()


class MaterializedViewCache:
    """Transformed programs keyed by database value, so repeated updates
    against the same contents skip the rebuild."""

    def __init__(self) -> None:
        self._programs: dict[tuple[Rule, ...], tuple[Clause, ...]] = {}
        self.hits = 0
        self.misses = 0

    def program(self, db: Database) -> tuple[Clause, ...]:
        key = db.rules
        cached = self._programs.get(key)
        if cached is not None:
            self.hits += 1
            return cached
        program = materialized_program(db)
        self._programs[key] = program
        self.misses += 1
        return program

    def __len__(self) -> int:
        return len(self._programs)


def _insert_family(db: Database, goal: Atom, minimality: bool) -> tuple[Transaction, ...]:
    if goal.pred in db.view_predicates:
        return insertion_candidates(db, goal, minimality=minimality)
    if goal in db.edb:
        return (Transaction(),)
    return (Transaction(frozenset({goal}), frozenset()),)


def _delete_family(
    db: Database, goal: Atom, variant: str, cache: MaterializedViewCache | None
) -> tuple[Transaction, ...]:
    if goal.pred in db.view_predicates:
        if variant == "materialized":
            if cache is None:
                cache = MaterializedViewCache()
            program = cache.program(db)
            tableau = build_tableau(program, delete_request(goal))
            base = frozenset(db.base_predicates)
            family: list[Transaction] = []
            for branch in tableau.open():
                tx = Transaction(
                    branch_additions(branch, db.edb, base),
                    branch_deletions(branch, db.edb),
                )
                if tx not in family:
                    family.append(tx)
            return tuple(family)
        return tuple(
            Transaction(frozenset(), cut) for cut in deletion_candidates(db, goal)
        )
    if goal not in db.edb:
        return (Transaction(),)
    return (Transaction(frozenset(), frozenset({goal})),)


def view_update(
    db: Database,
    request: UpdateRequest,
    variant: str = "minimal",
    cache: MaterializedViewCache | None = None,
    max_rounds: int = 8,
    max_states: int = 20000,
) -> UpdateResult:
    """Realise the request, smallest verified change first.

    Raises UnrealizableError when no combination of candidate changes
    survives verification, with a trace of the failed attempts.
    """
    if variant not in ("minimal", "materialized"):
        raise ValueError("variant must be 'minimal' or 'materialized', got %r" % variant)
    for atom in request.inserts + request.deletes:
        if not atom.is_ground:
            raise ValueError("update goals must be ground, got %s" % atom)
    contradictory = set(request.inserts) & set(request.deletes)
    if contradictory:
        raise UnrealizableError(
            "request is contradictory: %s both inserted and deleted"
            % ", ".join(sorted(map(str, contradictory)))
        )

    minimality = variant == "minimal"
    trace: list[str] = []
    families: list[tuple[Transaction, ...]] = []
    for kind, goal in request.goals:
        family = (
            _insert_family(db, goal, minimality)
            if kind == "insert"
            else _delete_family(db, goal, variant, cache)
        )
        trace.append("%s %s: %d candidate change(s)" % (kind, goal, len(family)))
        families.append(family)

    seeds: list[Transaction] = []
    for combo in itertools.product(*families):
        merged = Transaction()
        for part in combo:
            merged = merged.merge(part)
        if merged.consistent and merged not in seeds:
            seeds.append(merged)
        if len(seeds) > max_states:
            break
    if not seeds and families:
        trace.append("all combined candidates were self-contradictory")

    protect_present = frozenset(a for a in request.inserts if a.pred not in db.view_predicates)
    protect_absent = frozenset(a for a in request.deletes if a.pred not in db.view_predicates)

    queue: deque[tuple[Transaction, int]] = deque((s, 0) for s in seeds)
    visited = {(s.additions, s.removals) for s in seeds}
    verified: list[Transaction] = []
    states = 0
    while queue:
        tx, depth = queue.popleft()
        states += 1
        if states > max_states:
            trace.append("search stopped after %d states" % max_states)
            break
        after = tx.apply(db)
        model = least_model(after)
        unmet = None
        for kind, goal in request.goals:
            holds = goal in model
            if kind == "insert" and not holds:
                unmet = (kind, goal)
                break
            if kind == "delete" and holds:
                unmet = (kind, goal)
                break
        if unmet is not None:
            kind, goal = unmet
            if depth >= max_rounds:
                trace.append("%s: %s %s not achieved, depth limit" % (tx, kind, goal))
                continue
            family = (
                _insert_family(after, goal, minimality)
                if kind == "insert"
                else _delete_family(after, goal, variant, cache)
            )
            progressed = False
            for extra in family:
                merged = tx.merge(extra)
                if not merged.consistent:
                    continue
                if merged.additions & protect_absent or merged.removals & protect_present:
                    continue
                key = (merged.additions, merged.removals)
                if key in visited:
                    continue
                visited.add(key)
                queue.append((merged, depth + 1))
                progressed = True
            if not progressed and len(trace) < 40:
                trace.append("%s: %s %s not achieved" % (tx, kind, goal))
            continue
        violated = check_ic(after)
        if violated:
            if depth >= max_rounds:
                trace.append("%s: constraint repair depth limit" % tx)
                continue
            outcome = repair_constraints(
                after,
                protect_present=tx.additions | protect_present,
                protect_absent=tx.removals | protect_absent,
                all_solutions=True,
            )
            if outcome.exhausted and len(trace) < 40:
                trace.append("%s: constraint repair exhausted" % tx)
            progressed = False
            for extra in outcome.transactions:
                merged = tx.merge(extra)
                if not merged.consistent:
                    continue
                key = (merged.additions, merged.removals)
                if key in visited:
                    continue
                visited.add(key)
                queue.append((merged, depth + 1))
                progressed = True
            if not progressed and len(trace) < 40:
                trace.append("%s: violates '%s'" % (tx, violated[0]))
            continue
        if tx not in verified:
            verified.append(tx)

    if not verified:
        raise UnrealizableError("cannot realise %s" % request, tuple(trace[:40]))

    if minimality:
        verified = [
            t for t in verified if not any(o is not t and t.covers(o) for o in verified)
        ]
    verified.sort(
        key=lambda t: (t.size, sorted(map(str, t.additions)), sorted(map(str, t.removals)))
    )
    alternatives = tuple(verified)
    chosen = alternatives[0]
    after = chosen.apply(db)

    postulates: tuple[PostulateReport, ...] = ()
    if len(request.goals) == 1:
        (kind, goal), = request.goals
        if goal.pred in db.view_predicates:
            report = rationality_report(db, goal, chosen, kind)
            postulates = (PostulateReport(goal, kind, tuple(report.items())),)

    return UpdateResult(
        request=request,
        variant=variant,
        alternatives=alternatives,
        chosen=chosen,
        database=after,
        postulates=postulates,
    )
