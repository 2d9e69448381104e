"""
Derivation Transformers
=======================

This module implements the admissible rules of the calculus as operations
on derivation trees:
1. weaken: add a formula to every node (height preserving)
2. contract: remove one of two copies (height never grows)
3. invert: height-preserving inversion of the invertible rules
4. subst_derivation: replace a term throughout (height preserving)
5. axiom_expansion: a derivation of A, G => D, A for arbitrary A

Every transformer that may need new variable names takes an optional
Fresh; when several results are combined into one tree the caller passes
the same instance to all of them so eigenvariables stay distinct.
"""

from __future__ import annotations

from dataclasses import replace
from typing import Iterable, Mapping, Optional, Sequence

from app.core.build import (
    init_atom, l_and, l_exists, l_forall, l_imp, l_or, r_and, r_exists, r_forall, r_imp, r_or,
)
from app.core.kernel import formula_at
from app.core.syntax import Fresh, instantiate, replace_terms, ter_of, var_names
from app.models.derivation import EIGEN_KINDS, Derivation, Occ, RuleKind, RuleTag, Side
from app.models.errors import ContractionBlocked, MalformedDerivation, MissingOccurrence
from app.models.syntax import (
    BOTTOM, TOP, And, Atom, Bottom, Exists, Forall, Formula, Imp, Or, Sequent, Term, Top, Var,
)

_INVERTIBLE = {
    (Side.LEFT, And): RuleKind.L_AND,
    (Side.RIGHT, And): RuleKind.R_AND,
    (Side.LEFT, Or): RuleKind.L_OR,
    (Side.RIGHT, Or): RuleKind.R_OR,
    (Side.LEFT, Imp): RuleKind.L_IMP,
    (Side.RIGHT, Imp): RuleKind.R_IMP,
    (Side.RIGHT, Forall): RuleKind.R_FORALL,
    (Side.LEFT, Exists): RuleKind.L_EXISTS,
}

_KEEPS_PRINCIPAL = frozenset({RuleKind.L_FORALL, RuleKind.R_EXISTS, RuleKind.GEO})


# ---------------------------------------------------------------------------
# Names
# ---------------------------------------------------------------------------

def derivation_names(d: Derivation) -> set[str]:
    """Every variable name used anywhere in d."""
    names: set[str] = set()
    for _, node in d.walk():
        names |= var_names(node.conclusion)
        names.update(node.tag.eigens)
        if node.tag.witness is not None and node.tag.witness.is_var:
            names.add(node.tag.witness.name)
        names.update(t.name for _, t in node.tag.inst if t.is_var)
    return names


def _fresh(fresh: Optional[Fresh], d: Optional[Derivation] = None, extra: Iterable[str] = ()) -> Fresh:
    if fresh is None:
        fresh = Fresh("_v")
    if d is not None:
        fresh.avoid_names(derivation_names(d))
    return fresh.avoid_names(extra)


def _side(s: Sequent, side: Side) -> tuple[Formula, ...]:
    return s.ant if side is Side.LEFT else s.suc


def map_terms(d: Derivation, mapping: Mapping[Term, Term]) -> Derivation:
    """
    Apply a term mapping to every sequent and every piece of tag data.

    Eigenvariables are renamed too; a mapping that sends an eigenvariable
    to a constant is rejected.
    """
    if not mapping:
        return d
    s = d.conclusion
    conclusion = Sequent(tuple(replace_terms(f, mapping) for f in s.ant),
                         tuple(replace_terms(f, mapping) for f in s.suc))
    tag = d.tag
    eigens = []
    for e in tag.eigens:
        target = mapping.get(Var(e), Var(e))
        if not target.is_var:
            raise MalformedDerivation(f"eigenvariable {e} cannot become the constant {target}")
        eigens.append(target.name)
    witness = mapping.get(tag.witness, tag.witness) if tag.witness is not None else None
    inst = tuple((v, mapping.get(t, t)) for v, t in tag.inst)
    new_tag = replace(tag, eigens=tuple(eigens), witness=witness, inst=inst)
    return Derivation(conclusion, new_tag, d.principal, tuple(map_terms(p, mapping) for p in d.premises))


def rename_eigens(d: Derivation, names: set[str], fresh: Fresh) -> Derivation:
    """Give every eigenvariable in `names` a fresh name, renamed in its own premises only."""
    tag, premises = d.tag, d.premises
    clashing = [e for e in tag.eigens if e in names]
    if clashing:
        mapping = {Var(e): fresh.var() for e in clashing}
        tag = replace(tag, eigens=tuple(mapping.get(Var(e), Var(e)).name for e in tag.eigens))
        premises = tuple(map_terms(p, mapping) for p in premises)
    return Derivation(d.conclusion, tag, d.principal,
                      tuple(rename_eigens(p, names, fresh) for p in premises))


# ---------------------------------------------------------------------------
# Weakening
# ---------------------------------------------------------------------------

def _append(d: Derivation, a: Formula, side: Side) -> Derivation:
    s = d.conclusion
    conclusion = Sequent(s.ant + (a,), s.suc) if side is Side.LEFT else Sequent(s.ant, s.suc + (a,))
    return Derivation(conclusion, d.tag, d.principal, tuple(_append(p, a, side) for p in d.premises))


def weaken(d: Derivation, a: Formula, side: Side, fresh: Optional[Fresh] = None) -> Derivation:
    """
    Derivation of the conclusion of d with a added on `side`.

    Eigenvariables of d that occur in a are renamed first so the
    eigenvariable condition survives.
    """
    names = var_names(a)
    fresh = _fresh(fresh, d, names)
    if any(e in names for _, node in d.walk() for e in node.tag.eigens):
        d = rename_eigens(d, names, fresh)
    return _append(d, a, side)


def weaken_all(d: Derivation, formulas: Sequence[Formula], side: Side,
               fresh: Optional[Fresh] = None) -> Derivation:
    for a in formulas:
        d = weaken(d, a, side, fresh)
    return d


# ---------------------------------------------------------------------------
# Inversion
# ---------------------------------------------------------------------------

def _components(f: Formula, side: Side, var: Optional[str]) -> list[tuple[tuple, tuple]]:
    """(antecedent additions, succedent additions) for each inverted derivation."""
    match side, f:
        case Side.LEFT, And(a, b):
            return [((a, b), ())]
        case Side.RIGHT, And(a, b):
            return [((), (a,)), ((), (b,))]
        case Side.LEFT, Or(a, b):
            return [((a,), ()), ((b,), ())]
        case Side.RIGHT, Or(a, b):
            return [((), (a, b))]
        case Side.LEFT, Imp(a, b):
            return [((), (a,)), ((b,), ())]
        case Side.RIGHT, Imp(a, b):
            return [((a,), (b,))]
        case Side.RIGHT, Forall():
            return [((), (instantiate(f, Var(var)),))]
        case Side.LEFT, Exists():
            return [((instantiate(f, Var(var)),), ())]
    raise MalformedDerivation(f"no inversion for {type(f).__name__} on the {side.name.lower()}")


def _drop_and_add(d: Derivation, side: Side, q: int, add_ant: tuple, add_suc: tuple,
                  premises: tuple[Derivation, ...]) -> Derivation:
    s = d.conclusion
    items = list(_side(s, side))
    del items[q]
    if side is Side.LEFT:
        conclusion = Sequent(tuple(items) + add_ant, s.suc + add_suc)
    else:
        conclusion = Sequent(s.ant + add_ant, tuple(items) + add_suc)
    principal = tuple(
        Occ(o.side, o.index - 1) if o.side is side and o.index > q else o for o in d.principal
    )
    return Derivation(conclusion, d.tag, principal, premises)


def _is_principal(d: Derivation, side: Side, f: Formula, kind: RuleKind) -> bool:
    return (d.kind is kind and len(d.principal) == 1 and d.principal[0].side is side
            and formula_at(d.conclusion, d.principal[0]) == f)


def _invert(d: Derivation, side: Side, f: Formula, kind: RuleKind, var: Optional[str],
            fresh: Fresh) -> list[Derivation]:
    if _is_principal(d, side, f, kind):
        premises = list(d.premises)
        if kind in EIGEN_KINDS and d.tag.eigen != var:
            premises = [subst_derivation(premises[0], Var(d.tag.eigen), Var(var), fresh)]
        return premises

    principal = {o.index for o in d.principal if o.side is side}
    candidates = [i for i, g in enumerate(_side(d.conclusion, side)) if g == f and i not in principal]
    if not candidates:
        raise MissingOccurrence(f"no context occurrence of the inverted formula at {d.kind.value}")
    q = candidates[0]
    comps = _components(f, side, var)
    inverted = [_invert(p, side, f, kind, var, fresh) for p in d.premises]
    return [
        _drop_and_add(d, side, q, add_ant, add_suc, tuple(results[i] for results in inverted))
        for i, (add_ant, add_suc) in enumerate(comps)
    ]


def invert(d: Derivation, side: Side, f: Formula, var: Optional[str] = None,
           fresh: Optional[Fresh] = None) -> list[Derivation]:
    """
    Height-preserving inversion of f on `side` of the conclusion of d.

    Returns one derivation per premise of the corresponding rule (two for
    RAnd, LOr and LImp). For RForall and LExists the instance uses `var`,
    or a fresh variable when none is given.
    """
    kind = _INVERTIBLE.get((side, type(f)))
    if kind is None:
        raise MalformedDerivation(f"{type(f).__name__} on the {side.name.lower()} is not invertible")
    if f not in _side(d.conclusion, side):
        raise MissingOccurrence("the formula to invert is not in the conclusion")
    fresh = _fresh(fresh, d, var_names(f))
    if kind in EIGEN_KINDS and var is None:
        var = fresh.name()
    return _invert(d, side, f, kind, var, fresh)


# ---------------------------------------------------------------------------
# Contraction
# ---------------------------------------------------------------------------

def _contract(d: Derivation, a: Formula, side: Side, fresh: Fresh) -> Derivation:
    copies = [i for i, g in enumerate(_side(d.conclusion, side)) if g == a]
    if len(copies) < 2:
        raise MissingOccurrence("contraction needs two copies of the formula")
    principal = {o.index for o in d.principal if o.side is side}
    free = [i for i in copies if i not in principal]

    if d.kind.is_leaf:
        if not free:
            raise ContractionBlocked("both copies are principal in an initial sequent")
        return _drop_and_add(d, side, free[-1], (), (), ())

    if len(free) >= 2 or (free and d.kind in _KEEPS_PRINCIPAL):
        premises = tuple(_contract(p, a, side, fresh) for p in d.premises)
        return _drop_and_add(d, side, free[-1], (), (), premises)

    if not free:
        raise ContractionBlocked(
            f"both copies are principal atoms of one instance of {d.tag.rule_id or d.kind.value}")

    var = d.tag.eigen if d.kind in EIGEN_KINDS else None
    comps = _components(a, side, var)
    premises = []
    for k, premise in enumerate(d.premises):
        inverted = invert(premise, side, a, var=var, fresh=fresh)
        result = inverted[k] if len(inverted) > 1 else inverted[0]
        add_ant, add_suc = comps[k] if len(comps) > 1 else comps[0]
        for c in add_ant:
            result = _contract(result, c, Side.LEFT, fresh)
        for c in add_suc:
            result = _contract(result, c, Side.RIGHT, fresh)
        premises.append(result)
    return _drop_and_add(d, side, free[0], (), (), tuple(premises))


def contract(d: Derivation, a: Formula, side: Side, fresh: Optional[Fresh] = None) -> Derivation:
    """
    Derivation of the conclusion of d with one of two copies of a removed.

    Raises MissingOccurrence when fewer than two copies exist and
    ContractionBlocked when the only copies are principal atoms of one
    geometric rule instance.
    """
    if sum(1 for g in _side(d.conclusion, side) if g == a) < 2:
        raise MissingOccurrence("contraction needs two copies of the formula")
    return _contract(d, a, side, _fresh(fresh, d))


# ---------------------------------------------------------------------------
# Substitution
# ---------------------------------------------------------------------------

def subst_derivation(d: Derivation, u: Term, t: Term, fresh: Optional[Fresh] = None) -> Derivation:
    """
    Derivation of the conclusion of d with u replaced by t.

    A constant u is first renamed to a fresh variable; eigenvariables equal
    to u or t are renamed before the replacement. Raises CaptureError when
    t would be bound at an occurrence of u.
    """
    if u == t or u not in ter_of(d.conclusion):
        return d
    fresh = _fresh(fresh, d, [t.name] if t.is_var else [])
    if not u.is_var:
        z = fresh.var()
        d = map_terms(d, {u: z})
        u = z
    names = {u.name} | ({t.name} if t.is_var else set())
    d = rename_eigens(d, names, fresh)
    return map_terms(d, {u: t})


# ---------------------------------------------------------------------------
# Identity axioms for arbitrary formulas
# ---------------------------------------------------------------------------

def axiom_expansion(a: Formula, ant: Sequence[Formula] = (), suc: Sequence[Formula] = (),
                    fresh: Optional[Fresh] = None) -> Derivation:
    """Derivation of a, ant => suc, a with atomic leaves."""
    ant, suc = tuple(ant), tuple(suc)
    fresh = _fresh(fresh, None, var_names((a,) + ant + suc))

    match a:
        case Atom():
            return init_atom(a, ant, suc)
        case Bottom():
            return Derivation(Sequent((BOTTOM,) + ant, suc + (BOTTOM,)), RuleTag(RuleKind.INIT_BOT),
                              (Occ(Side.LEFT, 0),))
        case Top():
            return Derivation(Sequent((TOP,) + ant, suc + (TOP,)), RuleTag(RuleKind.INIT_TOP),
                              (Occ(Side.RIGHT, len(suc)),))
        case And(x, y):
            d1 = axiom_expansion(x, (y,) + ant, suc, fresh)
            d2 = axiom_expansion(y, (x,) + ant, suc, fresh)
            return l_and(r_and(d1, d2, a), a)
        case Or(x, y):
            d1 = axiom_expansion(x, ant, suc + (y,), fresh)
            d2 = axiom_expansion(y, ant, suc + (x,), fresh)
            return r_or(l_or(d1, d2, a), a)
        case Imp(x, y):
            d1 = axiom_expansion(x, ant, suc + (y,), fresh)
            d2 = axiom_expansion(y, (x,) + ant, suc, fresh)
            return r_imp(l_imp(d1, d2, a), a)
        case Forall():
            y = fresh.name()
            inner = axiom_expansion(instantiate(a, Var(y)), (a,) + ant, suc, fresh)
            return r_forall(l_forall(inner, a, Var(y)), a, y)
        case Exists():
            y = fresh.name()
            inner = axiom_expansion(instantiate(a, Var(y)), ant, suc + (a,), fresh)
            return l_exists(r_exists(inner, a, Var(y)), a, y)
    raise TypeError(f"not a formula: {a!r}")
