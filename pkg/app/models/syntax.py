"""
Syntax Models
=============

This module defines the immutable data types of the first-order language:
1. Terms (variables and individual constants, no function symbols)
2. Formulas (atoms, bot, top, and, or, implication, quantifiers)
3. Sequents (pairs of formula multisets)
4. Languages (terms plus non-logical predicates)

All values are frozen dataclasses; every operation on them lives in
app.core.syntax so the models stay plain data.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Union

IDENTITY = "="


class TermKind(Enum):
    """Kind of a term. Variables sort before constants."""
    VARIABLE = "variable"
    CONSTANT = "constant"


@dataclass(frozen=True)
class Term:
    kind: TermKind
    name: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("term names must be non-empty")

    @property
    def is_var(self) -> bool:
        return self.kind is TermKind.VARIABLE

    def sort_key(self):
        return (0 if self.is_var else 1, self.name)

    def __str__(self):
        return self.name if self.is_var else f"#{self.name}"


def Var(name: str) -> Term:
    return Term(TermKind.VARIABLE, name)


def Const(name: str) -> Term:
    return Term(TermKind.CONSTANT, name)


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple[Term, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def signature(self) -> tuple[str, int]:
        return (self.pred, len(self.args))

    @property
    def is_identity(self) -> bool:
        return self.pred == IDENTITY and len(self.args) == 2


@dataclass(frozen=True)
class Bottom:
    pass


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Imp:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


Formula = Union[Atom, Bottom, Top, And, Or, Imp, Forall, Exists]

BOTTOM = Bottom()
TOP = Top()


def Not(f: Formula) -> Imp:
    """Negation is sugar for an implication into bot."""
    return Imp(f, BOTTOM)


@dataclass(frozen=True, eq=False)
class Sequent:
    """
    A pair of formula multisets.

    The tuples keep the written order (for printing and for occurrence
    indices), while equality and hashing are multiset based:
    {A, B} == {B, A} but {A, A, B} != {A, B}.
    """
    ant: tuple[Formula, ...] = ()
    suc: tuple[Formula, ...] = ()

    def __eq__(self, other):
        if not isinstance(other, Sequent):
            return NotImplemented
        return Counter(self.ant) == Counter(other.ant) and Counter(self.suc) == Counter(other.suc)

    def __hash__(self):
        return hash((frozenset(Counter(self.ant).items()), frozenset(Counter(self.suc).items())))

    def formulas(self) -> tuple[Formula, ...]:
        return self.ant + self.suc


@dataclass(frozen=True)
class Language:
    """Terms and non-logical predicates (name, arity), both sorted."""
    terms: tuple[Term, ...] = ()
    predicates: tuple[tuple[str, int], ...] = field(default=())

    def __post_init__(self):
        if any(name == IDENTITY for name, _ in self.predicates):
            raise ValueError("identity is logical and never part of a language")

    def issubset(self, other: "Language") -> bool:
        return set(self.terms) <= set(other.terms) and set(self.predicates) <= set(other.predicates)

    def intersection(self, other: "Language") -> "Language":
        return Language(
            tuple(sorted(set(self.terms) & set(other.terms), key=Term.sort_key)),
            tuple(sorted(set(self.predicates) & set(other.predicates))),
        )

    def union(self, other: "Language") -> "Language":
        return Language(
            tuple(sorted(set(self.terms) | set(other.terms), key=Term.sort_key)),
            tuple(sorted(set(self.predicates) | set(other.predicates))),
        )

    def to_dict(self) -> dict:
        return {
            "terms": [str(t) for t in self.terms],
            "predicates": [f"{name}/{arity}" for name, arity in self.predicates],
        }
