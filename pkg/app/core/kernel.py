"""
Proof Kernel
============

This module implements the rules of the calculus and the checker:
1. upward: the premise sequents a rule tag determines above a conclusion,
   every formula labelled with where it comes from
2. check: leaf shapes, rule shapes, geometric instances, the eigenvariable
   condition and the pure-variable condition over the whole tree
3. height

Premises are computed, never trusted: a node is correct when each of its
premises concludes (as a multiset) exactly the sequent `upward` computes.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from app.core.geometric import instantiate_blocks, replacement_atom
from app.core.syntax import bound_vars, free_var_names, instantiate
from app.models.derivation import (
    EIGEN_KINDS, CheckReport, Derivation, Occ, RuleKind, Side, Violation, format_path,
)
from app.models.errors import CaptureError, IncompleteInstantiation, MalformedDerivation
from app.models.syntax import (
    And, Atom, Bottom, Exists, Forall, Formula, Imp, Or, Sequent, Top, Var,
)
from app.models.theory import TheorySpec


class OriginKind(Enum):
    CONTEXT = "context"
    PRINCIPAL = "principal"
    BLOCK = "block"


@dataclass(frozen=True)
class Origin:
    """Where a premise formula comes from: a conclusion occurrence, or a geometric block."""
    kind: OriginKind
    occ: Optional[Occ] = None


@dataclass(frozen=True)
class ExpectedPremise:
    sequent: Sequent
    ant_origins: tuple[Origin, ...]
    suc_origins: tuple[Origin, ...]


_SHAPES = {
    RuleKind.L_AND: (Side.LEFT, And),
    RuleKind.R_AND: (Side.RIGHT, And),
    RuleKind.L_OR: (Side.LEFT, Or),
    RuleKind.R_OR: (Side.RIGHT, Or),
    RuleKind.L_IMP: (Side.LEFT, Imp),
    RuleKind.R_IMP: (Side.RIGHT, Imp),
    RuleKind.L_FORALL: (Side.LEFT, Forall),
    RuleKind.R_FORALL: (Side.RIGHT, Forall),
    RuleKind.L_EXISTS: (Side.LEFT, Exists),
    RuleKind.R_EXISTS: (Side.RIGHT, Exists),
}


def formula_at(s: Sequent, occ: Occ) -> Formula:
    formulas = s.ant if occ.side is Side.LEFT else s.suc
    if not 0 <= occ.index < len(formulas):
        raise MalformedDerivation(f"occurrence {occ} is out of range")
    return formulas[occ.index]


class _Builder:
    """Accumulates one premise: new formulas first on the left, last on the right."""

    def __init__(self):
        self.ant: list[tuple[Formula, Origin]] = []
        self.suc: list[tuple[Formula, Origin]] = []
        self.new_suc: list[tuple[Formula, Origin]] = []

    def left(self, f: Formula, origin: Origin):
        self.ant.append((f, origin))

    def right(self, f: Formula, origin: Origin):
        self.new_suc.append((f, origin))

    def context(self, s: Sequent, skip: tuple[Occ, ...] = (), principal_kept: tuple[Occ, ...] = ()):
        for i, f in enumerate(s.ant):
            occ = Occ(Side.LEFT, i)
            if occ in skip:
                continue
            kind = OriginKind.PRINCIPAL if occ in principal_kept else OriginKind.CONTEXT
            self.ant.append((f, Origin(kind, occ)))
        for j, f in enumerate(s.suc):
            occ = Occ(Side.RIGHT, j)
            if occ in skip:
                continue
            kind = OriginKind.PRINCIPAL if occ in principal_kept else OriginKind.CONTEXT
            self.suc.append((f, Origin(kind, occ)))

    def build(self) -> ExpectedPremise:
        suc = self.suc + self.new_suc
        return ExpectedPremise(
            Sequent(tuple(f for f, _ in self.ant), tuple(f for f, _ in suc)),
            tuple(o for _, o in self.ant),
            tuple(o for _, o in suc),
        )


def _leaf_shape(node: Derivation, theory: Optional[TheorySpec]):
    s, kind, principal = node.conclusion, node.kind, node.principal
    if kind is RuleKind.INIT_ATOM:
        if len(principal) != 2 or principal[0].side is not Side.LEFT or principal[1].side is not Side.RIGHT:
            raise MalformedDerivation("InitAtom needs principal occurrences @Li,Rj")
        p, q = formula_at(s, principal[0]), formula_at(s, principal[1])
        if not isinstance(p, Atom):
            raise MalformedDerivation("InitAtom needs an atomic formula")
        if p != q:
            raise MalformedDerivation("InitAtom principal formulas differ")
    elif kind is RuleKind.INIT_BOT:
        if len(principal) != 1 or principal[0].side is not Side.LEFT:
            raise MalformedDerivation("InitBot needs one principal occurrence @Li")
        if not isinstance(formula_at(s, principal[0]), Bottom):
            raise MalformedDerivation("InitBot principal formula is not bot")
    elif kind is RuleKind.INIT_TOP:
        if len(principal) != 1 or principal[0].side is not Side.RIGHT:
            raise MalformedDerivation("InitTop needs one principal occurrence @Rj")
        if not isinstance(formula_at(s, principal[0]), Top):
            raise MalformedDerivation("InitTop principal formula is not top")
    elif kind is RuleKind.AXIOM:
        _axiom_shape(node, theory)


def _axiom_shape(node: Derivation, theory: Optional[TheorySpec]):
    s, tag, principal = node.conclusion, node.tag, node.principal
    if theory is None or tag.rule_id not in theory.initial:
        raise MalformedDerivation(f"initial sequent {tag.rule_id} is not part of the theory")
    if tag.rule_id == "S1":
        if len(principal) != 1 or principal[0].side is not Side.RIGHT:
            raise MalformedDerivation("S1 needs one principal occurrence @Rj")
        f = formula_at(s, principal[0])
        if not (isinstance(f, Atom) and f.is_identity and f.args[0] == f.args[1]):
            raise MalformedDerivation("S1 concludes an identity u = u")
    elif tag.rule_id == "S2":
        sides = tuple(o.side for o in principal)
        if sides != (Side.LEFT, Side.LEFT, Side.RIGHT) or principal[0] == principal[1]:
            raise MalformedDerivation("S2 needs principal occurrences @Li,Lj,Rk")
        eq, atom, result = (formula_at(s, o) for o in principal)
        if not (isinstance(eq, Atom) and eq.is_identity):
            raise MalformedDerivation("S2 needs an identity as first principal formula")
        if replacement_atom(atom, eq.args[0], eq.args[1], tag.positions) != result:
            raise MalformedDerivation("S2 succedent is not the replaced atom")
    else:
        raise MalformedDerivation(f"unknown initial sequent {tag.rule_id}")


def upward(node: Derivation, theory: Optional[TheorySpec] = None) -> tuple[ExpectedPremise, ...]:
    """
    Premises the rule of `node` requires above its conclusion.

    Raises MalformedDerivation when the principal occurrences or the tag
    data do not fit the rule; leaves return no premises.
    """
    s, tag, kind, principal = node.conclusion, node.tag, node.kind, node.principal
    for occ in principal:
        formula_at(s, occ)
    if len(set(principal)) != len(principal):
        raise MalformedDerivation("principal occurrences repeat")

    if kind.is_leaf:
        _leaf_shape(node, theory)
        return ()

    if kind is RuleKind.GEO:
        return _geo_upward(node, theory)

    side, shape = _SHAPES[kind]
    if len(principal) != 1 or principal[0].side is not side:
        raise MalformedDerivation(f"{kind.value} needs one principal occurrence on the {side.name.lower()}")
    occ = principal[0]
    f = formula_at(s, occ)
    if not isinstance(f, shape):
        raise MalformedDerivation(f"{kind.value} principal formula has the wrong shape")
    comp = Origin(OriginKind.PRINCIPAL, occ)

    def one(*, left=(), right=(), keep=False) -> ExpectedPremise:
        b = _Builder()
        for g in left:
            b.left(g, comp)
        b.context(s, skip=() if keep else (occ,), principal_kept=(occ,) if keep else ())
        for g in right:
            b.right(g, comp)
        return b.build()

    try:
        match kind:
            case RuleKind.L_AND:
                return (one(left=(f.left, f.right)),)
            case RuleKind.R_AND:
                return one(right=(f.left,)), one(right=(f.right,))
            case RuleKind.L_OR:
                return one(left=(f.left,)), one(left=(f.right,))
            case RuleKind.R_OR:
                return (one(right=(f.left, f.right)),)
            case RuleKind.L_IMP:
                return one(right=(f.left,)), one(left=(f.right,))
            case RuleKind.R_IMP:
                return (one(left=(f.left,), right=(f.right,)),)
            case RuleKind.L_FORALL:
                return (one(left=(instantiate(f, tag.witness),), keep=True),)
            case RuleKind.R_EXISTS:
                return (one(right=(instantiate(f, tag.witness),), keep=True),)
            case RuleKind.R_FORALL:
                return (one(right=(instantiate(f, Var(tag.eigen)),)),)
            case RuleKind.L_EXISTS:
                return (one(left=(instantiate(f, Var(tag.eigen)),)),)
    except CaptureError as e:
        raise MalformedDerivation(f"{kind.value}: {e}") from e
    raise MalformedDerivation(f"no premise shape for {kind.value}")


def _geo_upward(node: Derivation, theory: Optional[TheorySpec]) -> tuple[ExpectedPremise, ...]:
    s, tag, principal = node.conclusion, node.tag, node.principal
    rule = theory.rule(tag.rule_id) if theory is not None else None
    if rule is None:
        raise MalformedDerivation(f"rule {tag.rule_id} is not part of the theory")
    if any(o.side is not Side.LEFT for o in principal):
        raise MalformedDerivation(f"{rule.rule_id}: principal atoms are in the antecedent")
    if len(principal) != len(rule.principal):
        raise MalformedDerivation(
            f"{rule.rule_id}: expected {len(rule.principal)} principal atoms, got {len(principal)}")
    if len(set(v for v, _ in tag.inst)) != len(tag.inst):
        raise MalformedDerivation(f"{rule.rule_id}: a variable is instantiated twice")

    atom = formula_at(s, principal[1]) if rule.is_scheme else None
    try:
        atoms, blocks = instantiate_blocks(rule, tag.inst_map, tag.eigens, atom, tag.positions)
    except IncompleteInstantiation as e:
        raise MalformedDerivation(str(e)) from e
    for occ, expected in zip(principal, atoms):
        if formula_at(s, occ) != expected:
            raise MalformedDerivation(f"{rule.rule_id}: principal atom at {occ} is not the instance atom")

    premises = []
    for block in blocks:
        b = _Builder()
        for a in block:
            b.left(a, Origin(OriginKind.BLOCK))
        b.context(s, principal_kept=principal)
        premises.append(b.build())
    return tuple(premises)


def _eigen_problems(node: Derivation) -> list[str]:
    tag = node.tag
    if tag.kind not in EIGEN_KINDS and tag.kind is not RuleKind.GEO:
        return []
    problems = []
    free = free_var_names(node.conclusion)
    for e in tag.eigens:
        if e in free:
            problems.append(f"eigenvariable {e} occurs free in the conclusion")
    if len(set(tag.eigens)) != len(tag.eigens):
        problems.append("eigenvariables of one rule instance repeat")
    inst_names = {t.name for _, t in tag.inst if t.is_var}
    for e in tag.eigens:
        if e in inst_names:
            problems.append(f"eigenvariable {e} is also an instantiation term")
    return problems


def node_free_names(node: Derivation) -> set[str]:
    """Free variable names a node uses: its conclusion, witness and instantiation terms."""
    names = free_var_names(node.conclusion)
    if node.tag.witness is not None and node.tag.witness.is_var:
        names.add(node.tag.witness.name)
    names |= {t.name for _, t in node.tag.inst if t.is_var}
    return names


def check(d: Derivation, theory: Optional[TheorySpec] = None) -> CheckReport:
    """
    Validate every node of d against theory; never raises.

    Besides the local rule shapes, the whole tree must be pure: no two rule
    instances share an eigenvariable and no variable is both bound and free.
    """
    violations: list[Violation] = []
    eigen_owner: dict[str, str] = {}
    free: set[str] = set()
    bound: set[str] = set()

    for path, node in d.walk():
        where = format_path(path)
        try:
            expected = upward(node, theory)
        except MalformedDerivation as e:
            violations.append(Violation(where, str(e)))
            expected = None
        if expected is not None:
            if len(expected) != len(node.premises):
                violations.append(Violation(
                    where, f"{node.kind.value} needs {len(expected)} premises, found {len(node.premises)}"))
            else:
                for k, (want, premise) in enumerate(zip(expected, node.premises)):
                    if premise.conclusion != want.sequent:
                        violations.append(Violation(
                            format_path(path + (k,)), f"premise {k} of {node.kind.value} does not match the rule"))
        for problem in _eigen_problems(node):
            violations.append(Violation(where, problem))
        for e in dict.fromkeys(node.tag.eigens):
            if e in eigen_owner:
                violations.append(Violation(where, f"eigenvariable {e} already used at {eigen_owner[e]}"))
            else:
                eigen_owner[e] = where
        free |= node_free_names(node)
        bound |= bound_vars(node.conclusion)

    clash = sorted(free & bound)
    if clash:
        violations.append(Violation("root", f"variables both bound and free: {', '.join(clash)}"))
    return CheckReport(tuple(violations))


def height(d: Derivation) -> int:
    if not d.premises:
        return 0
    return 1 + max(height(p) for p in d.premises)
