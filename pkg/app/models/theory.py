"""
Theory Models
=============

Geometric axioms, the rules compiled from them, and theories:
1. GeometricAxiom: forall xs (P1 & ... & Pn -> exists ys1 M1 | ... | exists ysm Mm)
2. GeometricRule: principal atoms, premise blocks with eigenvariables,
   singularity flag and an optional scheme marker
3. TheorySpec: a named list of rules plus declared predicates and the
   initial-sequent axioms it admits
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from app.models.syntax import Atom, Formula

REPLACEMENT_SCHEME = "replacement"
SCHEME_PREDICATE = "_P"


@dataclass(frozen=True)
class Disjunct:
    existentials: tuple[str, ...]
    atoms: tuple[Atom, ...]


@dataclass(frozen=True)
class GeometricAxiom:
    name: str
    universals: tuple[str, ...]
    antecedent: tuple[Atom, ...]
    disjuncts: tuple[Disjunct, ...]


@dataclass(frozen=True)
class PremiseBlock:
    """Atoms added by one premise; eigens are the variables to draw fresh."""
    eigens: tuple[str, ...]
    atoms: tuple[Formula, ...]


@dataclass(frozen=True)
class GeometricRule:
    rule_id: str
    universals: tuple[str, ...]
    principal: tuple[Atom, ...]
    blocks: tuple[PremiseBlock, ...]
    singular: bool = True
    scheme: Optional[str] = None
    diagnostics: tuple[str, ...] = ()

    @property
    def existentials(self) -> tuple[str, ...]:
        return tuple(y for block in self.blocks for y in block.eigens)

    @property
    def is_scheme(self) -> bool:
        return self.scheme is not None


@dataclass(frozen=True)
class TheorySpec:
    name: str
    rules: tuple[GeometricRule, ...] = ()
    predicates: tuple[tuple[str, int], ...] = ()
    initial: tuple[str, ...] = ()

    def __post_init__(self):
        ids = [r.rule_id for r in self.rules]
        duplicates = sorted({i for i in ids if ids.count(i) > 1})
        if duplicates:
            raise ValueError(f"theory {self.name}: duplicate rule ids {', '.join(duplicates)}")

    def rule(self, rule_id: str) -> Optional[GeometricRule]:
        for r in self.rules:
            if r.rule_id == rule_id:
                return r
        return None

    @property
    def rule_ids(self) -> tuple[str, ...]:
        return tuple(r.rule_id for r in self.rules)

    @property
    def singular(self) -> bool:
        return all(r.singular for r in self.rules)
