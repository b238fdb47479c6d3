"""Belief change over the stored facts.

Rules and constraints are the immutable part of the knowledge base; the
stored facts are up for revision.  Contraction retracts an atom by removing
facts, revision accepts an atom by adding (and, when a constraint forces
it, removing) facts.  Candidates come from the atom's explanations: every
minimal stored support is a kernel, and a change is rational when it cuts
or completes kernels and nothing else.  The checkers at the bottom state
the rationality postulates operationally so a result can be audited.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .deletion import deletion_candidates
from .explain import (
    local_explanations,
    minimal_members,
    missing_support,
    missing_union,
    support_union,
)
from .hitting import minimal_hitting_sets
from .insertion import insertion_candidates
from .lang import EQ, Atom, Database, Transaction, ground_program
from .semantics import body_holds, check_ic, fixpoint_model, least_model


def kernel_change(
    db: Database,
    atom: Atom,
    operation: str,
    model: frozenset[Atom] | None = None,
) -> tuple[Transaction, ...]:
    """Raw kernel-level candidates, before any constraint checking.

    Deleting: every kernel (minimal stored support of atom) must lose a
    member, so candidates are the minimal hitting sets of the kernel
    family.  Inserting: one missing support set must be stored whole, so
    each verified member of that family is a candidate on its own.
    """
    if model is None:
        model = least_model(db)
    if operation == "delete":
        if atom not in model:
            return (Transaction(),)
        kernels = local_explanations(db, atom, model=model)
        return tuple(
            Transaction(frozenset(), cut) for cut in minimal_hitting_sets(kernels)
        )
    if operation == "insert":
        if atom in model:
            return (Transaction(),)
        family = minimal_members(missing_support(db, atom, model=model))
        txs = [Transaction(adds, frozenset()) for adds in family]
        good = [t for t in txs if atom in least_model(t.apply(db))]
        return tuple(
            sorted(good, key=lambda t: (t.size, sorted(map(str, t.additions))))
        )
    raise ValueError("operation must be 'insert' or 'delete', got %r" % operation)


# --- constraint repair -------------------------------------------------------


@dataclass(frozen=True)
class RepairOutcome:
    """Repairs found for a constraint-violating database.

    exhausted means the search hit its depth or state budget, so an empty
    transaction list is inconclusive rather than a proof of impossibility.
    """

    transactions: tuple[Transaction, ...]
    exhausted: bool


def repair_constraints(
    db: Database,
    protect_present: frozenset[Atom] = frozenset(),
    protect_absent: frozenset[Atom] = frozenset(),
    max_depth: int = 16,
    all_solutions: bool = False,
    max_states: int = 20000,
) -> RepairOutcome:
    """Smallest fact changes that make every constraint hold again.

    Breadth first over transactions: a violated denial instance is disarmed
    by retracting one of its true body atoms (through the deletion
    machinery when the atom is a view) or by storing the atom under one of
    its negated literals.  protect_present facts may not be removed,
    protect_absent atoms may not be added.
    """
    start = Transaction()
    queue = deque([start])
    visited = {(start.additions, start.removals)}
    found: list[Transaction] = []
    exhausted = False
    states = 0
    while queue:
        tx = queue.popleft()
        states += 1
        if states > max_states:
            exhausted = True
            break
        after = tx.apply(db)
        violated = check_ic(after)
        if not violated:
            found.append(tx)
            if not all_solutions:
                break
            continue
        if tx.size >= max_depth:
            exhausted = True
            continue
        instance = violated[0]
        steps: list[Transaction] = []
        for lit in instance.body:
            a = lit.atom
            if a.pred == EQ:
                continue
            if lit.negated:
                if a.pred in db.view_predicates:
                    steps.extend(insertion_candidates(after, a))
                elif a not in protect_absent:
                    steps.append(Transaction(frozenset({a}), frozenset()))
            else:
                if a.pred in db.view_predicates:
                    for cut in deletion_candidates(after, a):
                        if not cut & protect_present:
                            steps.append(Transaction(frozenset(), cut))
                elif a in after.edb and a not in protect_present:
                    steps.append(Transaction(frozenset(), frozenset({a})))
        for step in steps:
            if step.additions & protect_absent or step.removals & protect_present:
                continue
            merged = tx.merge(step)
            if not merged.consistent or merged.size == tx.size:
                continue
            key = (merged.additions, merged.removals)
            if key in visited:
                continue
            visited.add(key)
            queue.append(merged)
    keep = [
        t for t in found if not any(o is not t and t.covers(o) for o in found)
    ]
    keep.sort(key=lambda t: (t.size, sorted(map(str, t.additions)), sorted(map(str, t.removals))))
    return RepairOutcome(tuple(keep), exhausted)


# --- the two change operations ----------------------------------------------


def _finalize(
    db: Database,
    atom: Atom,
    raw: tuple[Transaction, ...],
    want_derivable: bool,
) -> tuple[Transaction, ...]:
    results: list[Transaction] = []
    for tx in raw:
        after = tx.apply(db)
        if (atom in least_model(after)) != want_derivable:
            continue
        if check_ic(after):
            protect_p = tx.additions
            protect_a = tx.removals | (frozenset({atom}) if not want_derivable else frozenset())
            outcome = repair_constraints(
                after, protect_present=protect_p, protect_absent=protect_a, all_solutions=True
            )
            for extra in outcome.transactions:
                merged = tx.merge(extra)
                if not merged.consistent:
                    continue
                final = merged.apply(db)
                if (atom in least_model(final)) != want_derivable:
                    continue
                if check_ic(final):
                    continue
                results.append(merged)
        else:
            results.append(tx)
    out: list[Transaction] = []
    for t in results:
        if t not in out:
            out.append(t)
    out = [t for t in out if not any(o is not t and t.covers(o) for o in out)]
    out.sort(key=lambda t: (t.size, sorted(map(str, t.additions)), sorted(map(str, t.removals))))
    return tuple(out)


def contract(db: Database, atom: Atom) -> tuple[Transaction, ...]:
    """Fact removals after which atom is no longer derivable, smallest
    first.  Constraint violations caused by a removal are repaired on the
    spot; repairs may not resurrect the atom."""
    model = least_model(db)
    if atom not in model:
        return (Transaction(),)
    return _finalize(db, atom, kernel_change(db, atom, "delete", model=model), False)


def revise(db: Database, atom: Atom) -> tuple[Transaction, ...]:
    """Fact changes after which atom is derivable and the constraints
    hold, smallest first."""
    model = least_model(db)
    if atom in model and not check_ic(db):
        return (Transaction(),)
    return _finalize(db, atom, kernel_change(db, atom, "insert", model=model), True)


# --- equivalence ------------------------------------------------------------


@dataclass(frozen=True)
class EquivalenceVerdict:
    equivalent: bool
    reason: str

    def __bool__(self) -> bool:
        return self.equivalent


def kb_equivalent(db1: Database, db2: Database) -> EquivalenceVerdict:
    """Do the two databases hold the same beliefs?

    Compared over the joint constant universe: same derivable atoms and the
    same constraint status.  Rule syntax is allowed to differ.
    """
    universe = db1.universe() | db2.universe()
    m1 = fixpoint_model(db1.idb, db1.edb, universe)
    m2 = fixpoint_model(db2.idb, db2.edb, universe)
    if m1 != m2:
        witness = sorted(map(str, m1 ^ m2))[0]
        return EquivalenceVerdict(False, "models differ on %s" % witness)
    if bool(check_ic(db1)) != bool(check_ic(db2)):
        return EquivalenceVerdict(False, "constraint status differs")
    return EquivalenceVerdict(True, "same beliefs and constraint status")


# --- rationality postulates --------------------------------------------------


def derivable_without_facts(db: Database, atom: Atom) -> bool:
    """Does the atom follow from the rules alone, with nothing stored?"""
    return atom in fixpoint_model(db.idb, frozenset(), db.universe() | set(atom.args))


def closed_under_rules(db: Database, model: frozenset[Atom]) -> bool:
    for r in ground_program(db.idb, db.universe()):
        if r.head is not None and r.body and body_holds(r.body, model):
            if r.head not in model:
                return False
    return True


def rationality_report(
    db: Database, atom: Atom, tx: Transaction, operation: str
) -> dict[str, bool]:
    """Audit one candidate change against the rationality postulates.

    Keys and their operational readings, for deleting / inserting:

      closure              the result's belief set is closed under the rules
      weak-success         the atom is gone (resp. present), unless it holds
                           with no facts stored at all (resp. no consistent
                           way to accept it exists)
      inclusion            nothing was added (resp. additions licensed by
                           some missing support set of the atom)
      immutable-inclusion  rules and constraints survive untouched
      vacuity              an already-absent (resp. already-present and
                           consistent) atom changes nothing
      consistency          the result satisfies the constraints
      weak-relevance       removals confined to the atom's stored support
                           (resp. additions to its missing support)
      strong-relevance     every single change is pivotal for the atom
    """
    if operation not in ("delete", "insert"):
        raise ValueError("operation must be 'insert' or 'delete', got %r" % operation)
    before = least_model(db)
    after_db = tx.apply(db)
    after = least_model(after_db)
    report: dict[str, bool] = {}
    report["closure"] = closed_under_rules(after_db, after)
    report["immutable-inclusion"] = (
        after_db.idb == db.idb and after_db.ic == db.ic
    )
    report["consistency"] = not check_ic(after_db)
    if operation == "delete":
        report["weak-success"] = atom not in after or derivable_without_facts(db, atom)
        report["inclusion"] = not tx.additions
        report["vacuity"] = atom in before or tx.is_empty
        license_ = support_union(db, atom)
        report["weak-relevance"] = tx.removals <= license_
        pivotal = True
        for r in sorted(tx.removals):
            restored = Transaction(frozenset(), tx.removals - {r}).apply(db)
            if atom not in least_model(restored):
                pivotal = False
                break
        report["strong-relevance"] = (atom not in after or not tx.removals) and pivotal
    else:
        report["weak-success"] = atom in after
        report["inclusion"] = tx.additions <= missing_union(db, atom)
        report["vacuity"] = atom not in before or bool(check_ic(db)) or tx.is_empty
        report["weak-relevance"] = report["inclusion"]
        pivotal = True
        for a in sorted(tx.additions):
            slim = Transaction(tx.additions - {a}, tx.removals).apply(db)
            if atom in least_model(slim):
                pivotal = False
                break
        report["strong-relevance"] = pivotal
    return report


CONTRACTION_GUARANTEES = (
    "closure",
    "weak-success",
    "inclusion",
    "immutable-inclusion",
    "vacuity",
    "consistency",
    "weak-relevance",
    "strong-relevance",
)

REVISION_GUARANTEES = (
    "closure",
    "weak-success",
    "immutable-inclusion",
    "vacuity",
    "consistency",
)


def guarantee_failures(
    db: Database, atom: Atom, tx: Transaction, operation: str
) -> tuple[str, ...]:
    """Which of the postulates guaranteed for this operation does the
    transaction break?  Empty means fully rational."""
    wanted = CONTRACTION_GUARANTEES if operation == "delete" else REVISION_GUARANTEES
    report = rationality_report(db, atom, tx, operation)
    return tuple(k for k in wanted if not report[k])


def preservation(db1: Database, db2: Database, atom: Atom, operation: str) -> bool:
    """Equivalent knowledge bases must offer the same candidate changes."""
    if not kb_equivalent(db1, db2):
        return True
    change = contract if operation == "delete" else revise
    return set(change(db1, atom)) == set(change(db2, atom))
