"""Core language of the deductive database: atoms, rules, parsing, grounding.

A database is a finite ordered list of clauses of three kinds: ground facts
(``p(a).``), rules (``p(X) :- q(X), not r(X).``) and denial constraints
(``:- p(X), q(X).``).  Predicates appearing in some rule head are view
predicates; all others hold base data.  The built-in predicate ``eq`` tests
syntactic equality of terms and may only occur in rule bodies; a rule with
an ``eq`` head is folded into an equivalent denial at parse time.

Terms are plain strings.  A term starting with an uppercase letter or an
underscore is a variable, anything else is a constant.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

EQ = "eq"


def is_variable(term: str) -> bool:
    return term[0].isupper() or term[0] == "_"


@dataclass(frozen=True, order=True)
class Atom:
    """A predicate applied to a tuple of terms."""

    pred: str
    args: tuple[str, ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return self.pred
        return "%s(%s)" % (self.pred, ",".join(self.args))

    @property
    def is_ground(self) -> bool:
        return not any(is_variable(a) for a in self.args)

    def variables(self) -> frozenset[str]:
        return frozenset(a for a in self.args if is_variable(a))

    def substitute(self, theta: Mapping[str, str]) -> "Atom":
        if not self.args:
            return self
        return Atom(self.pred, tuple(theta.get(a, a) for a in self.args))


@dataclass(frozen=True, order=True)
class Literal:
    """An atom or its negation, as it occurs in a rule body."""

    atom: Atom
    negated: bool = False

    def __str__(self) -> str:
        return ("not " if self.negated else "") + str(self.atom)

    def substitute(self, theta: Mapping[str, str]) -> "Literal":
        return Literal(self.atom.substitute(theta), self.negated)

    def complement(self) -> "Literal":
        return Literal(self.atom, not self.negated)


@dataclass(frozen=True)
class Rule:
    """A clause ``head :- body``.  head None encodes a denial constraint."""

    head: Atom | None
    body: tuple[Literal, ...] = ()

    def __str__(self) -> str:
        if self.head is None:
            return ":- " + ", ".join(str(l) for l in self.body)
        if not self.body:
            return str(self.head)
        return "%s :- %s" % (self.head, ", ".join(str(l) for l in self.body))

    @property
    def is_fact(self) -> bool:
        return self.head is not None and not self.body

    @property
    def is_denial(self) -> bool:
        return self.head is None

    def variables(self) -> frozenset[str]:
        out: set[str] = set()
        if self.head is not None:
            out |= self.head.variables()
        for lit in self.body:
            out |= lit.atom.variables()
        return frozenset(out)

    def substitute(self, theta: Mapping[str, str]) -> "Rule":
        head = None if self.head is None else self.head.substitute(theta)
        return Rule(head, tuple(l.substitute(theta) for l in self.body))


def fact(pred: str, *args: str) -> Rule:
    return Rule(Atom(pred, args))


@dataclass(frozen=True)
class Transaction:
    """A net change to the stored facts: additions in, removals out."""

    additions: frozenset[Atom] = frozenset()
    removals: frozenset[Atom] = frozenset()

    def __str__(self) -> str:
        parts = ["+%s" % a for a in sorted(self.additions)]
        parts += ["-%s" % a for a in sorted(self.removals)]
        return ", ".join(parts) if parts else "no change"

    @property
    def is_empty(self) -> bool:
        return not self.additions and not self.removals

    @property
    def size(self) -> int:
        return len(self.additions) + len(self.removals)

    def covers(self, other: "Transaction") -> bool:
        """True when other changes nothing this one does not also change."""
        return other.additions <= self.additions and other.removals <= self.removals

    def merge(self, other: "Transaction") -> "Transaction":
        return Transaction(self.additions | other.additions, self.removals | other.removals)

    @property
    def consistent(self) -> bool:
        return not self.additions & self.removals

    def apply(self, db: "Database") -> "Database":
        return db.with_edb((db.edb | self.additions) - self.removals)


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__("line %d, col %d: %s" % (line, col, message))
        self.line = line
        self.col = col


class NotStratifiableError(ValueError):
    """Raised when negation cycles through a predicate's own definition."""


_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+)
      | (?P<comment>%[^\n]*)
      | (?P<arrow>:-)
      | (?P<punct>[(),.])
      | (?P<name>[A-Za-z_][A-Za-z0-9_]*|\d+)
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> list[tuple[str, str, int, int]]:
    tokens = []
    line, bol = 1, 0
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError("unexpected character %r" % text[pos], line, pos - bol + 1)
        kind = m.lastgroup or ""
        value = m.group()
        if kind not in ("ws", "comment"):
            tokens.append((kind, value, line, pos - bol + 1))
        nl = value.count("\n")
        if nl:
            line += nl
            bol = pos + value.rindex("\n") + 1
        pos = m.end()
    tokens.append(("eof", "", line, len(text) - bol + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str, int, int]:
        return self.tokens[self.i]

    def take(self) -> tuple[str, str, int, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str, value: str | None = None) -> tuple[str, str, int, int]:
        tok = self.take()
        if tok[0] != kind or (value is not None and tok[1] != value):
            want = value if value is not None else kind
            raise ParseError("expected %r, found %r" % (want, tok[1] or "end of input"), tok[2], tok[3])
        return tok

    def at_punct(self, value: str) -> bool:
        tok = self.peek()
        return tok[0] == "punct" and tok[1] == value

    def parse_atom(self) -> Atom:
        tok = self.expect("name")
        if tok[1] == "not":
            raise ParseError("'not' is not a predicate name", tok[2], tok[3])
        args: list[str] = []
        if self.at_punct("("):
            self.take()
            args.append(self.expect("name")[1])
            while self.at_punct(","):
                self.take()
                args.append(self.expect("name")[1])
            self.expect("punct", ")")
        return Atom(tok[1], tuple(args))

    def parse_literal(self) -> Literal:
        tok = self.peek()
        if tok[0] == "name" and tok[1] == "not":
            self.take()
            return Literal(self.parse_atom(), negated=True)
        return Literal(self.parse_atom())

    def parse_body(self) -> tuple[Literal, ...]:
        lits = [self.parse_literal()]
        while self.at_punct(","):
            self.take()
            lits.append(self.parse_literal())
        return tuple(lits)

    def parse_statement(self) -> Rule:
        if self.peek()[0] == "arrow":
            self.take()
            body = self.parse_body()
            self.expect("punct", ".")
            return Rule(None, body)
        tok = self.peek()
        head = self.parse_atom()
        if self.at_punct("."):
            self.take()
            return Rule(head)
        self.expect("arrow")
        body = self.parse_body()
        self.expect("punct", ".")
        if head.pred == EQ:
            # an equality head states a functional constraint; fold it into
            # the denial that rejects any instance violating the equality
            return Rule(None, body + (Literal(head, negated=True),))
        del tok
        return Rule(head, body)

    def parse_program(self) -> tuple[Rule, ...]:
        rules = []
        while self.peek()[0] != "eof":
            rules.append(self.parse_statement())
        return tuple(rules)


def parse_program(text: str) -> tuple[Rule, ...]:
    return _Parser(text).parse_program()


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str

    def __str__(self) -> str:
        return "%s: %s" % (self.kind, self.message)


@dataclass(frozen=True)
class Database:
    """An ordered clause list partitioned into view rules, facts and denials.

    Clause order is preserved because proof search and the update procedures
    scan clauses first to last, so two databases with the same clauses in a
    different order are different objects.
    """

    rules: tuple[Rule, ...]
    idb: tuple[Rule, ...] = field(init=False, compare=False, repr=False)
    ic: tuple[Rule, ...] = field(init=False, compare=False, repr=False)
    edb: frozenset[Atom] = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        idb = tuple(r for r in self.rules if r.head is not None and r.body)
        ic = tuple(r for r in self.rules if r.is_denial)
        edb = frozenset(r.head for r in self.rules if r.is_fact and r.head is not None)
        object.__setattr__(self, "idb", idb)
        object.__setattr__(self, "ic", ic)
        object.__setattr__(self, "edb", edb)

    @classmethod
    def parse(cls, text: str) -> "Database":
        return cls(parse_program(text))

    @classmethod
    def load(cls, path: str) -> "Database":
        with open(path, encoding="utf-8") as fh:
            return cls.parse(fh.read())

    @property
    def view_predicates(self) -> frozenset[str]:
        return frozenset(r.head.pred for r in self.idb if r.head is not None)

    @property
    def base_predicates(self) -> frozenset[str]:
        preds: set[str] = {a.pred for a in self.edb}
        for r in self.rules:
            for lit in r.body:
                preds.add(lit.atom.pred)
        return frozenset(preds - self.view_predicates - {EQ})

    def universe(self) -> frozenset[str]:
        consts: set[str] = set()
        for r in self.rules:
            if r.head is not None:
                consts.update(a for a in r.head.args if not is_variable(a))
            for lit in r.body:
                consts.update(a for a in lit.atom.args if not is_variable(a))
        return frozenset(consts)

    def with_edb(self, facts: Iterable[Atom]) -> "Database":
        """Same rules and constraints over a replaced set of base facts."""
        kept = tuple(r for r in self.rules if not r.is_fact)
        new = tuple(Rule(a) for a in sorted(set(facts)))
        return Database(kept + new)


def format_database(db: Database) -> str:
    return "".join(str(r) + ".\n" for r in db.rules)


def ground_rule(rule: Rule, universe: Iterable[str]) -> Iterator[Rule]:
    """All ground instances of rule over the given constants."""
    varnames = sorted(rule.variables())
    if not varnames:
        yield rule
        return
    consts = sorted(set(universe))
    for combo in itertools.product(consts, repeat=len(varnames)):
        yield rule.substitute(dict(zip(varnames, combo)))


def ground_program(rules: Iterable[Rule], universe: Iterable[str]) -> tuple[Rule, ...]:
    consts = sorted(set(universe))
    out: list[Rule] = []
    for rule in rules:
        out.extend(ground_rule(rule, consts))
    return tuple(out)


def stratify(rules: Iterable[Rule]) -> tuple[frozenset[str], ...]:
    """Predicate strata, lowest first.

    Raises NotStratifiableError when some predicate depends on itself
    through negation.  Denials impose no ordering; they are checked against
    the finished model, not used to compute it.
    """
    rules = tuple(rules)
    preds: set[str] = set()
    for r in rules:
        if r.head is not None:
            preds.add(r.head.pred)
        for lit in r.body:
            if lit.atom.pred != EQ:
                preds.add(lit.atom.pred)
    level = {p: 0 for p in preds}
    # classic iterate-to-fixpoint bound: levels can only rise len(preds)
    # times before a negative cycle is the only explanation
    for _ in range(len(preds) + 1):
        changed = False
        for r in rules:
            if r.head is None:
                continue
            h = r.head.pred
            for lit in r.body:
                if lit.atom.pred == EQ:
                    continue
                need = level[lit.atom.pred] + (1 if lit.negated else 0)
                if level[h] < need:
                    level[h] = need
                    changed = True
        if not changed:
            break
    else:
        raise NotStratifiableError("negation cycles through a view definition")
    if not preds:
        return (frozenset(),)
    strata = []
    for i in range(max(level.values()) + 1):
        strata.append(frozenset(p for p in preds if level[p] == i))
    return tuple(strata)


def validate(db: Database) -> tuple[Violation, ...]:
    """Structural problems with a database.  Empty result means well formed."""
    out: list[Violation] = []
    view = db.view_predicates
    arity: dict[str, int] = {}

    def check_arity(atom: Atom) -> None:
        seen = arity.setdefault(atom.pred, len(atom.args))
        if seen != len(atom.args):
            out.append(Violation("arity-mismatch",
                                 "%s used with %d and %d arguments" % (atom.pred, seen, len(atom.args))))

    for r in db.rules:
        atoms = ([] if r.head is None else [r.head]) + [l.atom for l in r.body]
        for a in atoms:
            check_arity(a)
        if r.is_fact:
            assert r.head is not None
            if not r.head.is_ground:
                out.append(Violation("non-ground-fact", "fact %s contains variables" % r.head))
            if r.head.pred in view:
                out.append(Violation("view-fact", "%s is defined by rules, facts for it are not allowed" % r.head.pred))
            if r.head.pred == EQ:
                out.append(Violation("eq-misuse", "eq is built in and cannot be asserted"))
            continue
        if r.head is not None and r.head.pred == EQ:
            out.append(Violation("eq-misuse", "eq cannot appear in a rule head"))
        # safety: every variable must be bound by a positive body atom
        # of an ordinary predicate
        bound: set[str] = set()
        for lit in r.body:
            if not lit.negated and lit.atom.pred != EQ:
                bound |= lit.atom.variables()
        if not r.variables() <= bound:
            loose = ", ".join(sorted(r.variables() - bound))
            out.append(Violation("unsafe-rule", "variables %s in '%s' are not bound by a positive body atom" % (loose, r)))
        for lit in r.body:
            if lit.atom.pred == EQ and len(lit.atom.args) != 2:
                out.append(Violation("eq-misuse", "eq takes exactly two arguments"))
    return tuple(out)
