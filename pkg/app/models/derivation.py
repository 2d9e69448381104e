"""
Derivation Models
=================

This module defines derivation trees and their metadata:
1. RuleKind: the rules of the calculus plus geometric and axiom leaves
2. RuleTag: the rule together with its witness, eigenvariables or instance
3. Occ: an occurrence index into one side of a sequent
4. Derivation: a node with conclusion, tag, principal occurrences, premises
5. CheckReport: the list of violations found by the kernel

Principal formulas are addressed by occurrence, never by formula, so
duplicates inside a multiset are never ambiguous.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Optional

from app.models.errors import MalformedDerivation
from app.models.syntax import Sequent, Term


class RuleKind(Enum):
    INIT_ATOM = "InitAtom"
    INIT_TOP = "InitTop"
    INIT_BOT = "InitBot"
    L_AND = "LAnd"
    R_AND = "RAnd"
    L_OR = "LOr"
    R_OR = "ROr"
    L_IMP = "LImp"
    R_IMP = "RImp"
    L_FORALL = "LForall"
    R_FORALL = "RForall"
    L_EXISTS = "LExists"
    R_EXISTS = "RExists"
    GEO = "Geo"
    AXIOM = "Axiom"

    @property
    def is_leaf(self) -> bool:
        return self in LEAF_KINDS


LEAF_KINDS = frozenset({RuleKind.INIT_ATOM, RuleKind.INIT_TOP, RuleKind.INIT_BOT, RuleKind.AXIOM})
WITNESS_KINDS = frozenset({RuleKind.L_FORALL, RuleKind.R_EXISTS})
EIGEN_KINDS = frozenset({RuleKind.R_FORALL, RuleKind.L_EXISTS})


class Side(Enum):
    LEFT = "L"
    RIGHT = "R"


@dataclass(frozen=True)
class Occ:
    side: Side
    index: int

    def __str__(self):
        return f"{self.side.value}{self.index}"


def L(index: int) -> Occ:
    return Occ(Side.LEFT, index)


def R(index: int) -> Occ:
    return Occ(Side.RIGHT, index)


@dataclass(frozen=True)
class RuleTag:
    """
    A rule plus the data it needs.

    - LForall / RExists carry a witness term.
    - RForall / LExists carry exactly one eigenvariable.
    - Geo carries a rule id, the instantiation of the rule's universal
      variables, one eigenvariable per existential of the rule, and for
      the replacement scheme the replaced argument positions.
    - Axiom carries the initial-sequent name (S1, S2) and positions for S2.
    """
    kind: RuleKind
    witness: Optional[Term] = None
    eigens: tuple[str, ...] = ()
    rule_id: Optional[str] = None
    inst: tuple[tuple[str, Term], ...] = ()
    positions: tuple[int, ...] = ()

    def __post_init__(self):
        needs_witness = self.kind in WITNESS_KINDS
        if needs_witness != (self.witness is not None):
            raise MalformedDerivation(f"{self.kind.value}: witness data does not match the rule")
        if self.kind in EIGEN_KINDS and len(self.eigens) != 1:
            raise MalformedDerivation(f"{self.kind.value} needs exactly one eigenvariable")
        if self.kind not in EIGEN_KINDS and self.kind is not RuleKind.GEO and self.eigens:
            raise MalformedDerivation(f"{self.kind.value} takes no eigenvariables")
        if (self.kind in (RuleKind.GEO, RuleKind.AXIOM)) != (self.rule_id is not None):
            raise MalformedDerivation(f"{self.kind.value}: rule id does not match the rule")
        if self.kind is not RuleKind.GEO and self.inst:
            raise MalformedDerivation(f"{self.kind.value} takes no instantiation")

    @property
    def eigen(self) -> str:
        return self.eigens[0]

    @property
    def inst_map(self) -> dict[str, Term]:
        return dict(self.inst)


@dataclass(frozen=True)
class Derivation:
    conclusion: Sequent
    tag: RuleTag
    principal: tuple[Occ, ...] = ()
    premises: tuple["Derivation", ...] = ()

    @property
    def kind(self) -> RuleKind:
        return self.tag.kind

    def walk(self, path: tuple[int, ...] = ()) -> Iterator[tuple[tuple[int, ...], "Derivation"]]:
        """Pre-order traversal yielding (path, node); the root has path ()."""
        yield path, self
        for i, premise in enumerate(self.premises):
            yield from premise.walk(path + (i,))


def format_path(path: tuple[int, ...]) -> str:
    return "root" if not path else "root." + ".".join(str(i) for i in path)


@dataclass(frozen=True)
class Violation:
    path: str
    reason: str

    def __str__(self):
        return f"{self.path}: {self.reason}"


@dataclass(frozen=True)
class CheckReport:
    violations: tuple[Violation, ...] = field(default=())

    @property
    def ok(self) -> bool:
        return not self.violations

    def merged(self, other: "CheckReport", prefix: str = "") -> "CheckReport":
        extra = tuple(Violation(f"{prefix}{v.path}", v.reason) for v in other.violations)
        return CheckReport(self.violations + extra)

    def __str__(self):
        if self.ok:
            return "ok"
        return "\n".join(str(v) for v in self.violations)
