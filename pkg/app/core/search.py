"""
Proof Search
============

Bounded root-first search for G3c plus a set of geometric rules:
1. Iterative deepening on the height of the derivation, up to max_depth
2. At each node: close with an initial sequent if possible, otherwise
   apply the first invertible rule, otherwise branch over L-forall and
   R-exists witnesses and then over geometric rule instances
3. Loop check on the sequents of the current branch
4. Instance pruning: no quantifier instance already present, no geometric
   instance one of whose blocks is already present

The search is sequential, so the first derivation found is fixed by the
rule and instance order. Failure is never a disproof.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import combinations, product
from typing import Iterator, Optional

from app.core.geometric import replacement_atom
from app.core.kernel import check, height, upward
from app.core.printer import format_sequent
from app.core.syntax import Fresh, instantiate, is_pure, replace_terms, ter_of, var_names
from app.models.derivation import L, R, Derivation, RuleKind, RuleTag
from app.models.errors import ImpureSequent, InvariantViolation, NotFoundWithinBudget
from app.models.syntax import (
    And, Atom, Bottom, Exists, Forall, Imp, Or, Sequent, Term, Top, Var,
)
from app.models.theory import GeometricRule, TheorySpec
from app.utils.config import Config
from app.utils.logger import Logger

# Invertible rules in the order they are tried: (kind, left side?, shape)
INVERTIBLE = (
    (RuleKind.L_AND, True, And),
    (RuleKind.R_OR, False, Or),
    (RuleKind.R_IMP, False, Imp),
    (RuleKind.R_FORALL, False, Forall),
    (RuleKind.L_EXISTS, True, Exists),
    (RuleKind.L_OR, True, Or),
    (RuleKind.R_AND, False, And),
    (RuleKind.L_IMP, True, Imp),
)

PATTERN_PREFIX = "?"


@dataclass(frozen=True)
class Budget:
    max_depth: int = 8
    max_term_witnesses: int = 2
    max_geo_instantiations: int = 24

    def __post_init__(self):
        for name in ("max_depth", "max_term_witnesses", "max_geo_instantiations"):
            if getattr(self, name) < 1:
                raise ValueError(f"budget {name} must be positive")

    @classmethod
    def from_config(cls, **overrides) -> "Budget":
        section = Config().get("search") or {}
        values = {
            "max_depth": section.get("max_depth", 8),
            "max_term_witnesses": section.get("max_term_witnesses", 2),
            "max_geo_instantiations": section.get("max_geo_instantiations", 24),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


class Verdict(Enum):
    YES = "yes"
    UNKNOWN = "unknown"


def _unify(pattern: Atom, atom: Atom, variables: set[str], binding: dict[str, Term]) -> Optional[dict[str, Term]]:
    if pattern.signature != atom.signature:
        return None
    result = dict(binding)
    for p, a in zip(pattern.args, atom.args):
        if p.is_var and p.name in variables:
            bound = result.get(p.name)
            if bound is None:
                result[p.name] = a
            elif bound != a:
                return None
        elif p != a:
            return None
    return result


def match_atoms(patterns: tuple[Atom, ...], atoms: list[tuple[int, Atom]], variables: set[str],
                binding: Optional[dict[str, Term]] = None) -> Iterator[tuple[dict[str, Term], tuple[int, ...]]]:
    """
    Every way to match patterns against distinct antecedent atoms.

    Yields the binding of `variables` and the indices of the matched atoms,
    in antecedent order.
    """
    binding = binding or {}
    if not patterns:
        yield binding, ()
        return
    head, rest = patterns[0], patterns[1:]
    for i, atom in atoms:
        extended = _unify(head, atom, variables, binding)
        if extended is None:
            continue
        others = [(j, a) for j, a in atoms if j != i]
        for final, used in match_atoms(rest, others, variables, extended):
            yield final, (i,) + used


class _Search:
    """One deepening iteration; owns the fresh-name supply of that iteration."""

    def __init__(self, theory: TheorySpec, budget: Budget, fresh: Fresh):
        self.theory = theory
        self.budget = budget
        self.fresh = fresh

    # -- leaves -------------------------------------------------------------

    def closing(self, s: Sequent) -> Optional[Derivation]:
        for i, f in enumerate(s.ant):
            if isinstance(f, Bottom):
                return Derivation(s, RuleTag(RuleKind.INIT_BOT), (L(i),))
        for j, f in enumerate(s.suc):
            if isinstance(f, Top):
                return Derivation(s, RuleTag(RuleKind.INIT_TOP), (R(j),))
        for i, f in enumerate(s.ant):
            if isinstance(f, Atom) and f in s.suc:
                return Derivation(s, RuleTag(RuleKind.INIT_ATOM), (L(i), R(s.suc.index(f))))
        if "S1" in self.theory.initial:
            for j, f in enumerate(s.suc):
                if isinstance(f, Atom) and f.is_identity and f.args[0] == f.args[1]:
                    return Derivation(s, RuleTag(RuleKind.AXIOM, rule_id="S1"), (R(j),))
        if "S2" in self.theory.initial:
            for i, j, positions, result in self._replacements(s):
                if result in s.suc:
                    return Derivation(s, RuleTag(RuleKind.AXIOM, rule_id="S2", positions=positions),
                                      (L(i), L(j), R(s.suc.index(result))))
        return None

    @staticmethod
    def _replacements(s: Sequent) -> Iterator[tuple[int, int, tuple[int, ...], Atom]]:
        atoms = [(i, f) for i, f in enumerate(s.ant) if isinstance(f, Atom)]
        for i, eq in atoms:
            if not eq.is_identity or eq.args[0] == eq.args[1]:
                continue
            left, right = eq.args
            for j, atom in atoms:
                if j == i:
                    continue
                where = [k for k, arg in enumerate(atom.args) if arg == left]
                for size in range(1, len(where) + 1):
                    for positions in combinations(where, size):
                        yield i, j, positions, replacement_atom(atom, left, right, positions)

    # -- rule instances -----------------------------------------------------

    def invertible(self, s: Sequent) -> Optional[tuple[RuleTag, tuple]]:
        for kind, left, shape in INVERTIBLE:
            side = s.ant if left else s.suc
            for i, f in enumerate(side):
                if isinstance(f, shape):
                    occ = L(i) if left else R(i)
                    if kind in (RuleKind.R_FORALL, RuleKind.L_EXISTS):
                        return RuleTag(kind, eigens=(self.fresh.name(),)), (occ,)
                    return RuleTag(kind), (occ,)
        return None

    def witnesses(self, s: Sequent, used: int) -> Iterator[tuple[RuleTag, tuple, int]]:
        terms = ter_of(s)
        for left, shape, kind in ((True, Forall, RuleKind.L_FORALL), (False, Exists, RuleKind.R_EXISTS)):
            side = s.ant if left else s.suc
            for i, f in enumerate(side):
                if not isinstance(f, shape):
                    continue
                occ = L(i) if left else R(i)
                for t in terms:
                    if instantiate(f, t) not in side:
                        yield RuleTag(kind, witness=t), (occ,), used
                if used < self.budget.max_term_witnesses:
                    yield RuleTag(kind, witness=self.fresh.var()), (occ,), used + 1

    def _block_present(self, r: GeometricRule, inst: dict[str, Term], s: Sequent) -> bool:
        atoms = [(i, f) for i, f in enumerate(s.ant) if isinstance(f, Atom)]
        universals = {Var(x): t for x, t in inst.items()}
        for block in r.blocks:
            mapping = dict(universals)
            mapping.update({Var(y): Var(PATTERN_PREFIX + y) for y in block.eigens})
            patterns = tuple(replace_terms(a, mapping) for a in block.atoms)
            if not all(isinstance(p, Atom) for p in patterns):
                if all(p in s.ant for p in patterns):
                    return True
                continue
            variables = {PATTERN_PREFIX + y for y in block.eigens}
            if next(match_atoms(patterns, atoms, variables), None) is not None:
                return True
        return False

    def geometric(self, s: Sequent) -> Iterator[tuple[RuleTag, tuple]]:
        atoms = [(i, f) for i, f in enumerate(s.ant) if isinstance(f, Atom)]
        terms = ter_of(s)
        count = 0
        for r in self.theory.rules:
            for tag, principal in self._instances(r, s, atoms, terms):
                if count >= self.budget.max_geo_instantiations:
                    return
                count += 1
                yield tag, principal

    def _instances(self, r: GeometricRule, s: Sequent, atoms, terms) -> Iterator[tuple[RuleTag, tuple]]:
        if r.is_scheme:
            for i, j, positions, result in self._replacements(s):
                if result in s.ant:
                    continue
                eq = s.ant[i]
                inst = (("x", eq.args[0]), ("y", eq.args[1]))
                yield RuleTag(RuleKind.GEO, rule_id=r.rule_id, inst=inst, positions=positions), (L(i), L(j))
            return

        for binding, occs in match_atoms(r.principal, atoms, set(r.universals)):
            rest = [x for x in r.universals if x not in binding]
            pools = [terms or (self.fresh.var(),)] * len(rest)
            for values in product(*pools):
                inst = {**binding, **dict(zip(rest, values))}
                if self._block_present(r, inst, s):
                    continue
                eigens = tuple(self.fresh.name() for _ in r.existentials)
                tag = RuleTag(RuleKind.GEO, rule_id=r.rule_id, eigens=eigens, inst=tuple(sorted(inst.items())))
                yield tag, tuple(L(i) for i in occs)

    # -- search -------------------------------------------------------------

    def expand(self, s: Sequent, tag: RuleTag, principal: tuple, depth: int,
               history: frozenset, used: int) -> Optional[Derivation]:
        stub = Derivation(s, tag, principal)
        premises = []
        for expected in upward(stub, self.theory):
            d = self.solve(expected.sequent, depth - 1, history, used)
            if d is None:
                return None
            premises.append(d)
        return Derivation(s, tag, principal, tuple(premises))

    def solve(self, s: Sequent, depth: int, history: frozenset = frozenset(), used: int = 0) -> Optional[Derivation]:
        leaf = self.closing(s)
        if leaf is not None:
            return leaf
        if depth <= 0 or s in history:
            return None
        history = history | {s}

        step = self.invertible(s)
        if step is not None:
            return self.expand(s, *step, depth, history, used)

        for tag, principal, after in self.witnesses(s, used):
            d = self.expand(s, tag, principal, depth, history, after)
            if d is not None:
                return d
        for tag, principal in self.geometric(s):
            d = self.expand(s, tag, principal, depth, history, used)
            if d is not None:
                return d
        return None


def prove(goal: Sequent, theory: TheorySpec, b: Optional[Budget] = None) -> Derivation:
    """
    A derivation of goal in G plus the rules of theory, or NotFoundWithinBudget.

    The derivation's conclusion is goal itself, formulas in the same order.
    """
    b = b or Budget.from_config()
    if not is_pure(goal):
        raise ImpureSequent(f"{format_sequent(goal)} has a variable both free and bound")
    log = Logger()
    for depth in range(0, b.max_depth + 1):
        log.debug(f"search: depth {depth} for {format_sequent(goal)}")
        d = _Search(theory, b, Fresh("_v", var_names(goal))).solve(goal, depth)
        if d is None:
            continue
        report = check(d, theory)
        if not report.ok:
            raise InvariantViolation(f"search produced a derivation that does not check:\n{report}")
        log.info(f"search: derived {format_sequent(goal)} with height {height(d)} in {theory.name}")
        return d
    raise NotFoundWithinBudget(f"no derivation of {format_sequent(goal)} in {theory.name} "
                               f"up to depth {b.max_depth}")


def derivable(goal: Sequent, theory: TheorySpec, b: Optional[Budget] = None) -> Verdict:
    try:
        prove(goal, theory, b)
    except NotFoundWithinBudget:
        return Verdict.UNKNOWN
    return Verdict.YES
