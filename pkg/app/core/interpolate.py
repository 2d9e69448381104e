"""
Split Interpolation
===================

This module implements the extraction of split interpolants from checked
derivations:
1. Initial sequents: the fixed table of interpolants for P, bot and top
2. Logical rules: the one-premise rules keep the interpolant, two-premise
   rules join the two premise interpolants with | (side 1) or & (side 2)
3. Geometric rules, by the sides of the principal atoms:
   case 1 all on side 1, case 2 all on side 2, case 3 mixed (3.1 identity
   atoms only on side 2, 3.2 identity atoms only on side 1, 3.3 otherwise),
   case 4 no principal atoms
4. Term closure: terms of a candidate that are not shared by both sides
   are bound by forall (absent from side 1) or exists (absent from side 2)

Every result carries the two witness derivations and the language report;
verify() re-checks all three conditions independently.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

from app.core.build import (
    geo_data, geo_node, l_and, l_and_batch, l_exists, l_forall, l_imp, l_or, l_or_batch, leaf_for,
    r_and, r_and_batch, r_exists, r_forall, r_imp, r_or, r_or_batch,
)
from app.core.kernel import check, formula_at
from app.core.partition import Partition, premise_partitions, split
from app.core.syntax import Fresh, conj, disj, lang_of, rel_of, replace_terms, ter_of
from app.core.transform import derivation_names, subst_derivation, weaken, weaken_all
from app.models.derivation import CheckReport, Derivation, RuleKind, Side, Violation, format_path
from app.models.errors import InvariantViolation, MalformedDerivation, NonSingularTheory
from app.models.syntax import (
    BOTTOM, TOP, And, Atom, Exists, Forall, Formula, Imp, Language, Or, Sequent, Term, Var,
)
from app.models.theory import TheorySpec
from app.utils.config import Config
from app.utils.logger import Logger

CASE33_FORMS = ("implicative", "conjunctive")
CONJUNCT_ORDERS = ("atoms_first", "interpolants_first")


class GeoCase(Enum):
    CASE_1 = "1"
    CASE_2 = "2"
    CASE_3_1 = "3.1"
    CASE_3_2 = "3.2"
    CASE_3_3 = "3.3"
    CASE_4 = "4"


@dataclass(frozen=True)
class LanguageReport:
    interpolant: Language
    side_one: Language
    side_two: Language
    within_one: bool
    within_two: bool

    @property
    def ok(self) -> bool:
        return self.within_one and self.within_two

    def to_dict(self) -> dict:
        return {
            "interpolant": self.interpolant.to_dict(),
            "side_one": self.side_one.to_dict(),
            "side_two": self.side_two.to_dict(),
            "within_side_one": self.within_one,
            "within_side_two": self.within_two,
        }


@dataclass(frozen=True)
class InterpolationResult:
    interpolant: Formula
    witness_one: Derivation
    witness_two: Derivation
    report: LanguageReport
    trace: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class SplitResult:
    """Interpolant of one node with witnesses side 1 => C and C, side 2 =>."""
    formula: Formula
    one: Derivation
    two: Derivation


def language_report(c: Formula, one: Sequent, two: Sequent) -> LanguageReport:
    lc, l1, l2 = lang_of(c), lang_of(one), lang_of(two)
    return LanguageReport(lc, l1, l2, lc.issubset(l1), lc.issubset(l2))


def offending_terms(candidate: Formula, side1, side2) -> tuple[Term, ...]:
    """
    Terms of candidate outside Ter(side1) & Ter(side2), in term order.

    They must all be absent from side1; a term found there means the
    engine broke its own invariant.
    """
    terms1 = set(ter_of(side1))
    shared = terms1 & set(ter_of(side2))
    result = tuple(t for t in ter_of(candidate) if t not in shared)
    inside = [str(t) for t in result if t in terms1]
    if inside:
        raise InvariantViolation(f"terms to close off occur on the closing side: {', '.join(inside)}")
    return result


def geo_case(sides: Sequence[int], atoms: Sequence[Atom], case33_form: str = "implicative") -> GeoCase:
    """Which geometric case applies, from the sides of the principal atoms."""
    if not atoms:
        return GeoCase.CASE_4
    if all(s == 1 for s in sides):
        return GeoCase.CASE_1
    if all(s == 2 for s in sides):
        return GeoCase.CASE_2
    if not rel_of([a for a, s in zip(atoms, sides) if s == 2]):
        return GeoCase.CASE_3_1
    if not rel_of([a for a, s in zip(atoms, sides) if s == 1]):
        return GeoCase.CASE_3_2
    return GeoCase.CASE_3_3


def _quantify(cls, body: Formula, zs: Sequence[str], start: int, values: Sequence[Term]) -> Formula:
    """cls z_start ... cls z_last. body, with z_0 .. z_{start-1} replaced by values."""
    f = body
    for z in reversed(zs[start:]):
        f = cls(z, f)
    return replace_terms(f, {Var(zs[k]): values[k] for k in range(start)})


class Extraction:
    """
    One run of the extraction over one derivation.

    Holds the two name supplies of the run: `_z` names the variables bound
    in interpolants, `_v` names the eigenvariables of the witnesses.
    """

    def __init__(self, theory: TheorySpec, case33_form: str, conjunct_order: str, names: set[str]):
        self.theory = theory
        self.case33_form = case33_form
        self.conjunct_order = conjunct_order
        self.z = Fresh("_z", names)
        self.v = Fresh("_v", names)
        self.trace: list[tuple[str, str]] = []
        self.log = Logger()

    def run(self, node: Derivation, p: Partition, path: tuple[int, ...] = ()) -> SplitResult:
        if node.kind.is_leaf:
            return self.initial(node, p, path)
        if node.kind is RuleKind.GEO:
            return self.geometric(node, p, path)
        return self.logical(node, p, path)

    # -- initial sequents ---------------------------------------------------

    def initial(self, node: Derivation, p: Partition, path) -> SplitResult:
        s, kind = node.conclusion, node.kind
        one, two = split(s, p)

        def one_with(c):
            return Sequent(one.ant, one.suc + (c,))

        def two_with(c):
            return Sequent((c,) + two.ant, two.suc)

        if kind is RuleKind.INIT_ATOM:
            i, j = node.principal
            atom = formula_at(s, i)
            sides = (p.side_of(i), p.side_of(j))
            self.trace.append((format_path(path), f"InitAtom {sides[0]}-{sides[1]}"))
            if sides == (1, 1):
                return SplitResult(BOTTOM, leaf_for(one_with(BOTTOM), kind, atom),
                                   leaf_for(two_with(BOTTOM), RuleKind.INIT_BOT))
            if sides == (2, 2):
                return SplitResult(TOP, leaf_for(one_with(TOP), RuleKind.INIT_TOP),
                                   leaf_for(two_with(TOP), kind, atom))
            if sides == (1, 2):
                return SplitResult(atom, leaf_for(one_with(atom), kind, atom),
                                   leaf_for(two_with(atom), kind, atom))
            c = Imp(atom, BOTTOM)
            above = leaf_for(Sequent((atom,) + one.ant, one.suc + (BOTTOM,)), kind, atom)
            witness_two = l_imp(leaf_for(Sequent(two.ant, two.suc + (atom,)), kind, atom),
                                leaf_for(Sequent((BOTTOM,) + two.ant, two.suc), RuleKind.INIT_BOT), c)
            return SplitResult(c, r_imp(above, c), witness_two)

        if kind in (RuleKind.INIT_BOT, RuleKind.INIT_TOP):
            side = p.side_of(node.principal[0])
            self.trace.append((format_path(path), f"{kind.value} {side}"))
            if side == 1:
                return SplitResult(BOTTOM, leaf_for(one_with(BOTTOM), kind),
                                   leaf_for(two_with(BOTTOM), RuleKind.INIT_BOT))
            return SplitResult(TOP, leaf_for(one_with(TOP), RuleKind.INIT_TOP), leaf_for(two_with(TOP), kind))

        raise MalformedDerivation(f"no interpolant for initial sequent {node.tag.rule_id}")

    # -- logical rules ------------------------------------------------------

    def replay(self, node: Derivation, f: Formula, premises: Sequence[Derivation]) -> Derivation:
        tag = node.tag
        match node.kind:
            case RuleKind.L_AND:
                return l_and(premises[0], f)
            case RuleKind.R_AND:
                return r_and(premises[0], premises[1], f)
            case RuleKind.L_OR:
                return l_or(premises[0], premises[1], f)
            case RuleKind.R_OR:
                return r_or(premises[0], f)
            case RuleKind.L_IMP:
                return l_imp(premises[0], premises[1], f)
            case RuleKind.R_IMP:
                return r_imp(premises[0], f)
            case RuleKind.L_FORALL:
                return l_forall(premises[0], f, tag.witness)
            case RuleKind.R_FORALL:
                return r_forall(premises[0], f, tag.eigen)
            case RuleKind.L_EXISTS:
                return l_exists(premises[0], f, tag.eigen)
            case RuleKind.R_EXISTS:
                return r_exists(premises[0], f, tag.witness)
        raise MalformedDerivation(f"cannot replay {node.kind.value}")

    def logical(self, node: Derivation, p: Partition, path) -> SplitResult:
        occ = node.principal[0]
        f = formula_at(node.conclusion, occ)
        side = p.side_of(occ)
        self.trace.append((format_path(path), f"{node.kind.value} side {side}"))
        parts = premise_partitions(node, p, self.theory)
        subs = [self.run(premise, q, path + (k,)) for k, (premise, q) in enumerate(zip(node.premises, parts))]
        one, two = split(node.conclusion, p)

        if len(subs) == 1:
            sub = subs[0]
            if side == 1:
                result = SplitResult(sub.formula, self.replay(node, f, [sub.one]), sub.two)
            else:
                result = SplitResult(sub.formula, sub.one, self.replay(node, f, [sub.two]))
            if node.kind in (RuleKind.L_FORALL, RuleKind.R_EXISTS):
                close = self.forall_close if side == 1 else self.exists_close
                result = close(result, one, two)
            return result

        first, second = subs
        if side == 1:
            c = Or(first.formula, second.formula)
            left = weaken(first.one, second.formula, Side.RIGHT, self.v)
            right = weaken(second.one, first.formula, Side.RIGHT, self.v)
            return SplitResult(c, r_or(self.replay(node, f, [left, right]), c), l_or(first.two, second.two, c))
        c = And(first.formula, second.formula)
        left = weaken(first.two, second.formula, Side.LEFT, self.v)
        right = weaken(second.two, first.formula, Side.LEFT, self.v)
        return SplitResult(c, r_and(first.one, second.one, c), l_and(self.replay(node, f, [left, right]), c))

    # -- geometric rules ----------------------------------------------------

    def geometric(self, node: Derivation, p: Partition, path) -> SplitResult:
        rule = self.theory.rule(node.tag.rule_id)
        atoms = [formula_at(node.conclusion, o) for o in node.principal]
        sides = [p.side_of(o) for o in node.principal]
        case = geo_case(sides, atoms, self.case33_form)
        implicative = case is GeoCase.CASE_3_3 and self.case33_form == "implicative"
        geo_side = 1 if case in (GeoCase.CASE_1, GeoCase.CASE_4, GeoCase.CASE_3_1) or implicative else 2

        where = format_path(path)
        self.trace.append((where, f"Geo {rule.rule_id} case {case.value}"))
        self.log.debug(f"interpolation: {rule.rule_id} at {where} dispatched to case {case.value}")

        parts = premise_partitions(node, p, self.theory, geo_side)
        subs = [self.run(premise, q, path + (k,)) for k, (premise, q) in enumerate(zip(node.premises, parts))]
        if case is GeoCase.CASE_1:
            return self.geo_case1(node, p, subs)
        if case is GeoCase.CASE_2:
            return self.geo_case2(node, p, subs)
        if case is GeoCase.CASE_4:
            return self.geo_case4(node, p, subs)
        return self.geo_case3(node, p, subs, case)

    def apply_rule(self, node: Derivation, premises: Sequence[Derivation]) -> Derivation:
        """The rule of node below premises, its eigenvariables renamed fresh."""
        rule = self.theory.rule(node.tag.rule_id)
        data = geo_data(node, rule)
        premises = list(premises)
        eigens = []
        for e in node.tag.eigens:
            renamed = self.v.name()
            premises = [subst_derivation(d, Var(e), Var(renamed), self.v) for d in premises]
            eigens.append(renamed)
        data["eigens"] = tuple(eigens)
        return geo_node(premises, rule, **data)

    def _with_others(self, subs: Sequence[SplitResult], witness: str, side: Side) -> list[Derivation]:
        cs = [sub.formula for sub in subs]
        result = []
        for k, sub in enumerate(subs):
            d = getattr(sub, witness)
            for j, c in enumerate(cs):
                if j != k:
                    d = weaken(d, c, side, self.v)
            result.append(d)
        return result

    def _disjunctive(self, node: Derivation, subs: Sequence[SplitResult]) -> tuple[Formula, Derivation, Derivation]:
        cs = [sub.formula for sub in subs]
        one = r_or_batch(self.apply_rule(node, self._with_others(subs, "one", Side.RIGHT)), cs)
        two = l_or_batch([sub.two for sub in subs], cs)
        return disj(cs), one, two

    def geo_case1(self, node: Derivation, p: Partition, subs: Sequence[SplitResult]) -> SplitResult:
        """All principal atoms on side 1: forall-closed disjunction."""
        one, two = split(node.conclusion, p)
        return self.forall_close(SplitResult(*self._disjunctive(node, subs)), one, two)

    def geo_case4(self, node: Derivation, p: Partition, subs: Sequence[SplitResult]) -> SplitResult:
        """No principal atoms (Ref): the construction of case 1 without atoms."""
        return self.geo_case1(node, p, subs)

    def geo_case2(self, node: Derivation, p: Partition, subs: Sequence[SplitResult]) -> SplitResult:
        """All principal atoms on side 2: exists-closed conjunction."""
        one, two = split(node.conclusion, p)
        cs = [sub.formula for sub in subs]
        witness_one = r_and_batch([sub.one for sub in subs], cs)
        witness_two = l_and_batch(self.apply_rule(node, self._with_others(subs, "two", Side.LEFT)), cs)
        return self.exists_close(SplitResult(conj(cs), witness_one, witness_two), one, two)

    def geo_case3(self, node: Derivation, p: Partition, subs: Sequence[SplitResult], case: GeoCase) -> SplitResult:
        one, two = split(node.conclusion, p)
        atoms = [formula_at(node.conclusion, o) for o in node.principal]
        sides = [p.side_of(o) for o in node.principal]
        pi_one = [a for a, s in zip(atoms, sides) if s == 1]
        pi_two = [a for a, s in zip(atoms, sides) if s == 2]

        if case is GeoCase.CASE_3_1 or (case is GeoCase.CASE_3_3 and self.case33_form == "implicative"):
            d, disjunctive_one, disjunctive_two = self._disjunctive(node, subs)
            c = Imp(conj(pi_two), d)
            witness_one = r_imp(l_and_batch(disjunctive_one, pi_two), c)
            premise = r_and_batch(
                [leaf_for(Sequent(two.ant, two.suc + (a,)), RuleKind.INIT_ATOM, a) for a in pi_two], pi_two)
            consequent = weaken_all(disjunctive_two, pi_two, Side.LEFT, self.v)
            witness_two = l_imp(premise, consequent, c)
            return self.forall_close(SplitResult(c, witness_one, witness_two), one, two)

        atom_items = [(a, None) for a in pi_one]
        sub_items = [(sub.formula, sub) for sub in subs]
        items = atom_items + sub_items if self.conjunct_order == "atoms_first" else sub_items + atom_items
        ds = []
        for formula, sub in items:
            if sub is None:
                ds.append(leaf_for(Sequent(one.ant, one.suc + (formula,)), RuleKind.INIT_ATOM, formula))
            else:
                ds.append(weaken_all(sub.one, pi_one, Side.LEFT, self.v))
        formulas = [formula for formula, _ in items]
        witness_one = r_and_batch(ds, formulas)
        witness_two = l_and_batch(self.apply_rule(node, self._with_others(subs, "two", Side.LEFT)), formulas)
        return self.exists_close(SplitResult(conj(formulas), witness_one, witness_two), one, two)

    # -- term closure -------------------------------------------------------

    def forall_close(self, r: SplitResult, one: Sequent, two: Sequent) -> SplitResult:
        """Bind the terms of r.formula missing from side 1 with forall."""
        ts = offending_terms(r.formula, one, two)
        if not ts:
            return r
        zs = [self.z.name() for _ in ts]
        body = replace_terms(r.formula, {t: Var(z) for t, z in zip(ts, zs)})
        es = [self.v.var() for _ in ts]

        witness_one = r.one
        for t, e in zip(ts, es):
            witness_one = subst_derivation(witness_one, t, e, self.v)
        for i in reversed(range(len(ts))):
            witness_one = r_forall(witness_one, _quantify(Forall, body, zs, i, es), es[i].name)

        steps = [_quantify(Forall, body, zs, i, ts) for i in range(len(ts))]
        witness_two = weaken_all(r.two, steps, Side.LEFT, self.v)
        for i in reversed(range(len(ts))):
            witness_two = l_forall(witness_two, steps[i], ts[i])
        return SplitResult(steps[0], witness_one, witness_two)

    def exists_close(self, r: SplitResult, one: Sequent, two: Sequent) -> SplitResult:
        """Bind the terms of r.formula missing from side 2 with exists."""
        ts = offending_terms(r.formula, two, one)
        if not ts:
            return r
        zs = [self.z.name() for _ in ts]
        body = replace_terms(r.formula, {t: Var(z) for t, z in zip(ts, zs)})
        es = [self.v.var() for _ in ts]

        witness_two = r.two
        for t, e in zip(ts, es):
            witness_two = subst_derivation(witness_two, t, e, self.v)
        for i in reversed(range(len(ts))):
            witness_two = l_exists(witness_two, _quantify(Exists, body, zs, i, es), es[i].name)

        steps = [_quantify(Exists, body, zs, i, ts) for i in range(len(ts))]
        witness_one = weaken_all(r.one, steps, Side.RIGHT, self.v)
        for i in reversed(range(len(ts))):
            witness_one = r_exists(witness_one, steps[i], ts[i])
        return SplitResult(steps[0], witness_one, witness_two)


class Interpolator:
    """
    Split interpolation over a singular geometric theory.

    case33_form and conjunct_order default to the `interpolation` section
    of the configuration.
    """

    def __init__(self, theory: TheorySpec, case33_form: Optional[str] = None,
                 conjunct_order: Optional[str] = None):
        config = Config()
        self.theory = theory
        self.case33_form = case33_form or config.get("interpolation", "case33_form", "implicative")
        self.conjunct_order = conjunct_order or config.get("interpolation", "conjunct_order", "atoms_first")
        if self.case33_form not in CASE33_FORMS:
            raise ValueError(f"case33_form must be one of {', '.join(CASE33_FORMS)}")
        if self.conjunct_order not in CONJUNCT_ORDERS:
            raise ValueError(f"conjunct_order must be one of {', '.join(CONJUNCT_ORDERS)}")

    def require_singular(self):
        if self.theory.initial:
            raise NonSingularTheory(
                f"theory {self.theory.name} uses initial sequents {', '.join(self.theory.initial)}; "
                "interpolation needs rules")
        bad = [r for r in self.theory.rules if not r.singular]
        if bad:
            details = "; ".join(f"{r.rule_id}: {' '.join(r.diagnostics)}" for r in bad)
            raise NonSingularTheory(f"theory {self.theory.name} is not singular ({details})")

    def interpolate(self, d: Derivation, p: Partition) -> InterpolationResult:
        self.require_singular()
        p.validate(d.conclusion)
        report = check(d, self.theory)
        if not report.ok:
            raise MalformedDerivation(f"the derivation does not check:\n{report}")

        run = Extraction(self.theory, self.case33_form, self.conjunct_order, derivation_names(d))
        result = run.run(d, p)
        one, two = split(d.conclusion, p)
        return InterpolationResult(result.formula, result.one, result.two,
                                   language_report(result.formula, one, two), tuple(run.trace))


def interpolate(d: Derivation, p: Partition, theory: TheorySpec, **options) -> InterpolationResult:
    return Interpolator(theory, **options).interpolate(d, p)


def verify(r: InterpolationResult, conclusion: Sequent, p: Partition, theory: TheorySpec) -> CheckReport:
    """Conditions I and II (witnesses conclude the right sequents and check) and III (language)."""
    one, two = split(conclusion, p)
    c = r.interpolant
    violations = []
    if r.witness_one.conclusion != Sequent(one.ant, one.suc + (c,)):
        violations.append(Violation("witness-one", "does not conclude side 1 => C"))
    if r.witness_two.conclusion != Sequent((c,) + two.ant, two.suc):
        violations.append(Violation("witness-two", "does not conclude C, side 2 =>"))
    lang = language_report(c, one, two)
    if not lang.within_one:
        violations.append(Violation("interpolant", "language not contained in the language of side 1"))
    if not lang.within_two:
        violations.append(Violation("interpolant", "language not contained in the language of side 2"))
    report = CheckReport(tuple(violations))
    report = report.merged(check(r.witness_one, theory), "witness-one:")
    return report.merged(check(r.witness_two, theory), "witness-two:")
