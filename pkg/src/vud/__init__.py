"""Deductive database engine with rational view updates."""

from .deletion import deletion_candidates
from .engine import UnrealizableError, UpdateRequest, UpdateResult, view_update
from .explain import explanations, local_explanations
from .insertion import insertion_candidates
from .lang import (
    Atom,
    Database,
    Literal,
    NotStratifiableError,
    ParseError,
    Rule,
    Transaction,
    Violation,
    fact,
    format_database,
    parse_program,
    stratify,
    validate,
)
from .revision import contract, rationality_report, revise
from .semantics import build_proof_tree, check_ic, least_model

__all__ = [
    "Atom",
    "Database",
    "Literal",
    "NotStratifiableError",
    "ParseError",
    "Rule",
    "Transaction",
    "UnrealizableError",
    "UpdateRequest",
    "UpdateResult",
    "Violation",
    "build_proof_tree",
    "check_ic",
    "contract",
    "deletion_candidates",
    "explanations",
    "fact",
    "format_database",
    "insertion_candidates",
    "least_model",
    "local_explanations",
    "parse_program",
    "rationality_report",
    "revise",
    "stratify",
    "validate",
    "view_update",
]
