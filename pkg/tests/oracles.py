"""Slow reference implementations used to pin expected values in the tests.

Everything here favours the most obvious exhaustive formulation over speed:
naive ground iteration instead of incremental evaluation, guess-and-check
over subsets instead of goal-directed search.  Tests freeze values computed
by these against the real implementations.
"""

from __future__ import annotations

import itertools
from collections import deque
from typing import Iterable, Sequence

from vud.lang import EQ, Atom, Literal, Rule, is_variable


def _ground_instances(rule: Rule, consts: Sequence[str]) -> list[Rule]:
    names = sorted(rule.variables())
    if not names:
        return [rule]
    out = []
    for combo in itertools.product(consts, repeat=len(names)):
        out.append(rule.substitute(dict(zip(names, combo))))
    return out


def _eq_truth(lit: Literal) -> bool:
    same = lit.atom.args[0] == lit.atom.args[1]
    return same != lit.negated


def _body_holds(body: Iterable[Literal], model: set[Atom]) -> bool:
    for lit in body:
        if lit.atom.pred == EQ:
            if not _eq_truth(lit):
                return False
        elif (lit.atom in model) == lit.negated:
            return False
    return True


def _peel_strata(rules: Sequence[Rule]) -> list[set[str]]:
    """Stratification by peeling: settle predicate groups whose negative
    dependencies are already settled, mutual positive recursion allowed."""
    heads = {r.head.pred for r in rules if r.head is not None and r.body}
    pos: dict[str, set[str]] = {h: set() for h in heads}
    neg: dict[str, set[str]] = {h: set() for h in heads}
    for r in rules:
        if r.head is None or not r.body:
            continue
        for lit in r.body:
            if lit.atom.pred == EQ:
                continue
            (neg if lit.negated else pos)[r.head.pred].add(lit.atom.pred)
    # base predicates are settled from the start
    settled = {p for h in heads for p in pos[h] | neg[h]} - heads
    strata: list[set[str]] = []
    remaining = set(heads)
    while remaining:
        group = {h for h in remaining if neg[h] <= settled}
        while True:
            pruned = {h for h in group if pos[h] - settled <= group}
            if pruned == group:
                break
            group = pruned
        if not group:
            raise ValueError("not stratifiable")
        strata.append(group)
        settled |= group
        remaining -= group
    return strata


def naive_model(rules: Sequence[Rule], facts: Iterable[Atom]) -> frozenset[Atom]:
    """Perfect model by naive repeated application of all ground rules,
    one peeled stratum at a time."""
    rules = [r for r in rules if r.head is not None and r.body]
    consts: set[str] = set()
    for r in rules:
        for a in [r.head] + [l.atom for l in r.body]:
            if a is not None:
                consts.update(t for t in a.args if not is_variable(t))
    for a in facts:
        consts.update(a.args)
    ground: list[Rule] = []
    for r in rules:
        ground.extend(_ground_instances(r, sorted(consts)))
    model = set(facts)
    for stratum in _peel_strata(rules):
        while True:
            added = False
            for r in ground:
                assert r.head is not None
                if r.head.pred in stratum and r.head not in model and _body_holds(r.body, model):
                    model.add(r.head)
                    added = True
            if not added:
                break
    return frozenset(model)


def stable_models(rules: Sequence[Rule], facts: Iterable[Atom]) -> list[frozenset[Atom]]:
    """All stable models by guess-and-check over subsets of the ground base.

    Only usable for small ground programs; asserts the base stays tiny.
    For a stratified program the result is a single model, which makes this
    an independent check on stratified evaluation.
    """
    facts = set(facts)
    consts: set[str] = set()
    for r in rules:
        for a in ([r.head] if r.head else []) + [l.atom for l in r.body]:
            consts.update(t for t in a.args if not is_variable(t))
    for a in facts:
        consts.update(a.args)
    ground: list[Rule] = []
    for r in rules:
        if r.head is None:
            continue
        ground.extend(_ground_instances(r, sorted(consts)))
    base: set[Atom] = set(facts)
    for r in ground:
        if r.head is not None:
            base.add(r.head)
        for lit in r.body:
            if lit.atom.pred != EQ:
                base.add(lit.atom)
    base_list = sorted(base)
    assert len(base_list) <= 20, "guess-and-check oracle restricted to tiny programs"
    out = []
    for bits in itertools.product((False, True), repeat=len(base_list)):
        guess = {a for a, b in zip(base_list, bits) if b}
        if not facts <= guess:
            continue
        # reduct: drop rules whose negative part clashes with the guess,
        # then take the positive least model
        reduct = []
        for r in ground:
            ok = True
            for lit in r.body:
                if lit.atom.pred == EQ:
                    if not _eq_truth(lit):
                        ok = False
                elif lit.negated and lit.atom in guess:
                    ok = False
            if ok:
                reduct.append((r.head, [l.atom for l in r.body if not l.negated and l.atom.pred != EQ]))
        lm = set(facts)
        changed = True
        while changed:
            changed = False
            for head, body in reduct:
                if head not in lm and all(a in lm for a in body):
                    lm.add(head)
                    changed = True
        if lm == guess:
            out.append(frozenset(guess))
    return out


def minimal_sets(family: Iterable[frozenset]) -> list[frozenset]:
    fam = sorted(set(family), key=lambda s: (len(s), sorted(s)))
    out: list[frozenset] = []
    for s in fam:
        if not any(m < s for m in out):
            out.append(s)
    return out


def subset_explanations(idb: Sequence[Rule], universe: Iterable[Atom], goal: Atom) -> list[frozenset[Atom]]:
    """Every subset of candidate base facts from which the goal follows."""
    atoms = sorted(set(universe))
    out = []
    for n in range(len(atoms) + 1):
        for combo in itertools.combinations(atoms, n):
            if goal in naive_model(idb, combo):
                out.append(frozenset(combo))
    return out


# --- propositional clause programs with signed literals ------------------
#
# A clause is (head, body), both tuples of Literals, read as
# "conjunction of body implies disjunction of head".  A candidate model is
# a set of asserted literals; the clause is satisfied when its body being
# contained in the set forces some head literal into the set.

SignedClause = tuple[tuple[Literal, ...], tuple[Literal, ...]]


def _consistent(lits: frozenset[Literal]) -> bool:
    return not any(l.complement() in lits for l in lits)


def clause_models(clauses: Sequence[SignedClause]) -> list[frozenset[Literal]]:
    """All consistent assertion sets over the head-literal universe that
    satisfy every clause."""
    universe = sorted({l for head, _ in clauses for l in head})
    out = []
    for bits in itertools.product((False, True), repeat=len(universe)):
        cand = frozenset(l for l, b in zip(universe, bits) if b)
        if not _consistent(cand):
            continue
        ok = True
        for head, body in clauses:
            if set(body) <= cand and not set(head) & cand:
                ok = False
                break
        if ok:
            out.append(cand)
    return out


def saturated_sets(clauses: Sequence[SignedClause]) -> list[frozenset[Literal]]:
    """Open saturated literal sets reachable by first-applicable expansion.

    Breadth-first over literal sets; mirrors the branch semantics of the
    tableau builder without sharing its tree bookkeeping.
    """
    start: frozenset[Literal] = frozenset()
    queue = deque([start])
    seen = {start}
    finished: list[frozenset[Literal]] = []
    while queue:
        lits = queue.popleft()
        chosen = None
        for head, body in clauses:
            if set(body) <= lits and not set(head) & lits:
                chosen = (head, body)
                break
        if chosen is None:
            finished.append(lits)
            continue
        head, _ = chosen
        if not head:
            continue  # closed by an empty-head clause
        for disj in head:
            if disj.complement() in lits:
                continue  # closed child
            child = lits | {disj}
            if child not in seen:
                seen.add(child)
                queue.append(child)
    return finished


def brute_transactions(
    idb: Sequence[Rule],
    ic: Sequence[Rule],
    edb: frozenset[Atom],
    candidates: Iterable[Atom],
    inserts: Sequence[Atom] = (),
    deletes: Sequence[Atom] = (),
    max_change: int = 3,
) -> list[tuple[frozenset[Atom], frozenset[Atom]]]:
    """Minimal (additions, removals) pairs realising the request, found by
    trying every combination up to max_change total changes."""
    adds_pool = sorted(set(candidates) - edb)
    dels_pool = sorted(edb)
    found: list[tuple[frozenset[Atom], frozenset[Atom]]] = []
    combos = []
    for na in range(max_change + 1):
        for nd in range(max_change + 1 - na):
            for adds in itertools.combinations(adds_pool, na):
                for dels in itertools.combinations(dels_pool, nd):
                    combos.append((frozenset(adds), frozenset(dels)))
    combos.sort(key=lambda p: (len(p[0]) + len(p[1]), sorted(p[0]), sorted(p[1])))
    for adds, dels in combos:
        if any(a <= adds and d <= dels for a, d in found):
            continue
        model = naive_model(idb, (edb | adds) - dels)
        if not all(a in model for a in inserts):
            continue
        if any(a in model for a in deletes):
            continue
        if any(_body_holds(r.body, set(model)) for r in _ground_ics(ic, model, edb | adds)):
            continue
        found.append((adds, dels))
    return found


def _ground_ics(ic: Sequence[Rule], model: frozenset[Atom], extra: frozenset[Atom]) -> list[Rule]:
    consts: set[str] = set()
    for a in model | extra:
        consts.update(a.args)
    for r in ic:
        for lit in r.body:
            consts.update(t for t in lit.atom.args if not is_variable(t))
    out: list[Rule] = []
    for r in ic:
        out.extend(_ground_instances(r, sorted(consts)))
    return out
