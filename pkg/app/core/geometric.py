"""
Geometric Theories
==================

This module turns geometric axioms into left rules and provides the
built-in theories:
1. axiom_from_formula: recognise the geometric scheme in a parsed formula
2. compile_axiom: build the rule (an axiom with no disjuncts becomes a
   one-premise rule adding bot)
3. is_singular: condition (a) at most one non-logical predicate, and
   condition (b) premise predicates among the principal atoms
4. instantiate_rule: premise sequents of a rule instance with fresh
   eigenvariables
5. builtin_theory / load_theory: G, G_eq, SPO, G_eq_axioms, TABLE,
   TABLE:<row>, or a theory file

The replacement rule of identity is a scheme over an arbitrary atom; it
is represented by a rule with scheme metadata and instantiated against a
concrete atom and the argument positions to replace.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Mapping, Optional, Sequence

from app.core.parser import TheorySource, parse_formula, parse_theory
from app.core.syntax import Fresh, constants, free_var_names, rel_of, replace_terms, var_names
from app.models.errors import (
    IncompleteInstantiation, MalformedAxiom, MalformedDerivation, UnknownTheory,
)
from app.models.syntax import (
    BOTTOM, And, Atom, Bottom, Exists, Forall, Formula, Imp, Or, Sequent, Term, Top, Var,
)
from app.models.theory import (
    REPLACEMENT_SCHEME, SCHEME_PREDICATE, Disjunct, GeometricAxiom, GeometricRule,
    PremiseBlock, TheorySpec,
)
from app.utils.logger import Logger

THEORIES_DIR = Path(__file__).parent.parent / "theories"


def _flatten(f: Formula, cls) -> list[Formula]:
    if isinstance(f, cls):
        return _flatten(f.left, cls) + _flatten(f.right, cls)
    return [f]


def _atoms(f: Formula, name: str, where: str) -> tuple[Atom, ...]:
    if isinstance(f, Top):
        return ()
    items = _flatten(f, And)
    for item in items:
        if not isinstance(item, Atom):
            raise MalformedAxiom(f"axiom {name}: the {where} must be a conjunction of atoms")
    return tuple(items)


def axiom_from_formula(name: str, formula: Formula,
                       predicates: Optional[Sequence[tuple[str, int]]] = None) -> GeometricAxiom:
    """
    Read forall xs (P1 & ... & Pn -> exists ys1 M1 | ... | exists ysm Mm).

    A body without an implication is read as top -> body, and a
    consequent bot gives m = 0.
    """
    universals: list[str] = []
    body = formula
    while isinstance(body, Forall):
        if body.var in universals:
            raise MalformedAxiom(f"axiom {name}: {body.var} is quantified twice")
        universals.append(body.var)
        body = body.body

    if isinstance(body, Imp):
        antecedent = _atoms(body.left, name, "antecedent")
        consequent = body.right
    else:
        antecedent, consequent = (), body

    disjuncts: list[Disjunct] = []
    if not isinstance(consequent, Bottom):
        for part in _flatten(consequent, Or):
            existentials: list[str] = []
            while isinstance(part, Exists):
                if part.var in universals or part.var in existentials:
                    raise MalformedAxiom(f"axiom {name}: existential {part.var} shadows another variable")
                existentials.append(part.var)
                part = part.body
            disjuncts.append(Disjunct(tuple(existentials), _atoms(part, name, "consequent")))

    for atom in antecedent:
        for y in {y for d in disjuncts for y in d.existentials} & free_var_names(atom):
            raise MalformedAxiom(f"axiom {name}: existential {y} occurs in the antecedent")
    for d in disjuncts:
        allowed = set(universals) | set(d.existentials)
        unbound = sorted(free_var_names(antecedent + d.atoms) - allowed)
        if unbound:
            raise MalformedAxiom(f"axiom {name}: unbound variables {', '.join(unbound)}")
    if not disjuncts:
        unbound = sorted(free_var_names(antecedent) - set(universals))
        if unbound:
            raise MalformedAxiom(f"axiom {name}: unbound variables {', '.join(unbound)}")

    if predicates is not None:
        declared = set(predicates)
        every = antecedent + tuple(a for d in disjuncts for a in d.atoms)
        for atom in every:
            if not atom.is_identity and atom.signature not in declared:
                raise MalformedAxiom(
                    f"axiom {name}: predicate {atom.pred}/{atom.arity} is not declared")

    return GeometricAxiom(name, tuple(universals), antecedent, tuple(disjuncts))


def is_singular(r: GeometricRule) -> tuple[bool, tuple[str, ...]]:
    """Condition (a) |Rel(P, Q)| <= 1 and condition (b) Rel(Q) within Rel(P)."""
    if r.is_scheme:
        return True, ()
    principal = rel_of(r.principal)
    premise = rel_of(a for block in r.blocks for a in block.atoms)
    overall = sorted(set(principal) | set(premise))
    diagnostics = []
    if len(overall) > 1:
        names = ", ".join(f"{p}/{n}" for p, n in overall)
        diagnostics.append(f"(a) more than one non-logical predicate: {names}")
    extra = sorted(set(premise) - set(principal))
    if extra:
        names = ", ".join(f"{p}/{n}" for p, n in extra)
        diagnostics.append(f"(b) premise predicates not among the principal atoms: {names}")
    return not diagnostics, tuple(diagnostics)


def compile_axiom(a: GeometricAxiom) -> GeometricRule:
    if a.disjuncts:
        blocks = tuple(PremiseBlock(d.existentials, d.atoms) for d in a.disjuncts)
    else:
        blocks = (PremiseBlock((), (BOTTOM,)),)
    used = free_var_names(a.antecedent + tuple(x for b in blocks for x in b.atoms))
    universals = tuple(x for x in a.universals if x in used)
    rule = GeometricRule(a.name, universals, a.antecedent, blocks)
    singular, diagnostics = is_singular(rule)

    every = a.antecedent + tuple(x for b in blocks for x in b.atoms)
    consts = constants(every)
    if consts:
        names = ", ".join(str(c) for c in consts)
        if singular:
            raise MalformedAxiom(f"axiom {a.name}: constants {names} in a singular axiom")
        Logger().warning(f"axiom {a.name} mentions constants {names}")

    Logger().debug(f"compiled {a.name}: {len(a.antecedent)} principal atoms, "
                   f"{len(blocks)} premise blocks, singular={singular}")
    return GeometricRule(a.name, universals, a.antecedent, blocks, singular, None, diagnostics)


def replacement_atom(atom: Formula, s: Term, t: Term, positions: Sequence[int]) -> Atom:
    """The atom with the arguments at `positions` (all equal to s) replaced by t."""
    if not isinstance(atom, Atom):
        raise MalformedDerivation("replacement needs an atomic formula")
    if list(positions) != sorted(set(positions)):
        raise MalformedDerivation("replacement positions must be increasing")
    args = list(atom.args)
    for p in positions:
        if p < 0 or p >= len(args) or args[p] != s:
            raise MalformedDerivation(f"position {p} of {atom.pred} does not hold {s}")
        args[p] = t
    return Atom(atom.pred, tuple(args))


def instantiate_blocks(r: GeometricRule, inst: Mapping[str, Term], eigens: Sequence[str],
                       atom: Optional[Formula] = None,
                       positions: Sequence[int] = ()) -> tuple[tuple[Atom, ...], list[tuple[Formula, ...]]]:
    """Principal atoms and premise atoms of a rule instance with given eigenvariables."""
    missing = [x for x in r.universals if x not in inst]
    if missing:
        raise IncompleteInstantiation(f"{r.rule_id}: no term for {', '.join(missing)}")
    extra = sorted(set(inst) - set(r.universals))
    if extra:
        raise MalformedDerivation(f"{r.rule_id}: {', '.join(extra)} is not a variable of the rule")
    if len(eigens) != len(r.existentials):
        raise MalformedDerivation(
            f"{r.rule_id}: expected {len(r.existentials)} eigenvariables, got {len(eigens)}")

    if r.scheme == REPLACEMENT_SCHEME:
        if atom is None:
            raise IncompleteInstantiation(f"{r.rule_id}: no atom to replace in")
        s, t = inst["x"], inst["y"]
        return (Atom("=", (s, t)), atom), [(replacement_atom(atom, s, t, positions),)]

    if positions:
        raise MalformedDerivation(f"{r.rule_id} takes no positions")
    mapping = {Var(x): inst[x] for x in r.universals}
    principal = tuple(replace_terms(p, mapping) for p in r.principal)
    blocks: list[tuple[Formula, ...]] = []
    k = 0
    for block in r.blocks:
        local = dict(mapping)
        for y in block.eigens:
            local[Var(y)] = Var(eigens[k])
            k += 1
        blocks.append(tuple(replace_terms(a, local) for a in block.atoms))
    return principal, blocks


@dataclass(frozen=True)
class RuleInstance:
    conclusion: Sequent
    principal: tuple[Atom, ...]
    premises: tuple[Sequent, ...]
    eigens: tuple[str, ...]


def instantiate_rule(r: GeometricRule, inst: Mapping[str, Term], ctx: Sequent, fresh: Fresh,
                     *, atom: Optional[Formula] = None, positions: Sequence[int] = ()) -> RuleInstance:
    """
    Premises of r above the conclusion ctx.

    Principal atoms missing from the antecedent of ctx are added in front.
    Eigenvariables are drawn from `fresh`, which is told to avoid every
    name of ctx and of the instantiation first.
    """
    fresh.avoid_names(var_names(ctx))
    fresh.avoid_names(t.name for t in inst.values() if t.is_var)
    eigens = tuple(fresh.name() for _ in r.existentials)
    principal, blocks = instantiate_blocks(r, inst, eigens, atom, positions)

    ant = list(ctx.ant)
    missing: list[Formula] = []
    pool = list(ant)
    for p in principal:
        if p in pool:
            pool.remove(p)
        else:
            missing.append(p)
    conclusion = Sequent(tuple(missing) + ctx.ant, ctx.suc)
    premises = tuple(Sequent(tuple(block) + conclusion.ant, conclusion.suc) for block in blocks)
    return RuleInstance(conclusion, principal, premises, eigens)


# ---------------------------------------------------------------------------
# Built-in theories
# ---------------------------------------------------------------------------

def _rule(name: str, text: str) -> GeometricRule:
    return compile_axiom(axiom_from_formula(name, parse_formula(text)))


@lru_cache(maxsize=None)
def identity_rules() -> tuple[GeometricRule, GeometricRule]:
    ref = _rule("Ref", "forall x. x = x")
    x, y = Var("x"), Var("y")
    schematic = Atom(SCHEME_PREDICATE, ())
    repl = GeometricRule(
        "Repl", ("x", "y"), (Atom("=", (x, y)), schematic),
        (PremiseBlock((), (schematic,)),), True, REPLACEMENT_SCHEME, (),
    )
    return ref, repl


@lru_cache(maxsize=None)
def order_rules() -> tuple[GeometricRule, GeometricRule]:
    return (
        _rule("Irref", "forall x. !(x < x)"),
        _rule("Trans", "forall x. forall y. forall z. (x < y & y < z -> x < z)"),
    )


@lru_cache(maxsize=None)
def relational_table() -> tuple[GeometricRule, ...]:
    source = parse_theory((THEORIES_DIR / "relational_table.thy").read_text(encoding="utf-8"))
    return theory_from_source(source).rules


def builtin_theory(name: str) -> TheorySpec:
    if name == "G":
        return TheorySpec("G")
    if name == "G_eq":
        return TheorySpec("G_eq", identity_rules())
    if name == "SPO":
        return TheorySpec("SPO", identity_rules() + order_rules(), (("<", 2),))
    if name == "G_eq_axioms":
        return TheorySpec("G_eq_axioms", (), (), ("S1", "S2"))
    if name == "TABLE":
        return TheorySpec("TABLE", identity_rules() + relational_table(), (("R", 2),))
    if name.startswith("TABLE:"):
        row = name.split(":", 1)[1]
        for r in relational_table():
            if r.rule_id == row:
                return TheorySpec(name, identity_rules() + (r,), (("R", 2),))
    raise UnknownTheory(f"unknown theory '{name}'")


def theory_from_source(source: TheorySource) -> TheorySpec:
    rules: list[GeometricRule] = []
    predicates: list[tuple[str, int]] = list(source.predicates)
    initial: list[str] = []
    for included in source.includes:
        base = builtin_theory(included)
        rules.extend(base.rules)
        predicates.extend(p for p in base.predicates if p not in predicates)
        initial.extend(i for i in base.initial if i not in initial)
    for ax in source.axioms:
        try:
            rules.append(compile_axiom(axiom_from_formula(ax.name, ax.formula, source.predicates)))
        except MalformedAxiom as e:
            raise MalformedAxiom(f"line {ax.line}, column {ax.column}: {e}") from e
    try:
        return TheorySpec(source.name, tuple(rules), tuple(predicates), tuple(initial))
    except ValueError as e:
        raise MalformedAxiom(str(e)) from e


def load_theory(name_or_path: str) -> TheorySpec:
    """A built-in theory by name, otherwise a theory file."""
    try:
        return builtin_theory(name_or_path)
    except UnknownTheory:
        path = Path(name_or_path)
        if not path.is_file():
            raise
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise UnknownTheory(f"cannot read theory file {path}: {e}") from e
    return theory_from_source(parse_theory(text))


__all__ = [
    "RuleInstance", "axiom_from_formula", "builtin_theory", "compile_axiom",
    "identity_rules", "instantiate_blocks", "instantiate_rule", "is_singular", "load_theory",
    "order_rules", "relational_table", "replacement_atom", "theory_from_source",
]
