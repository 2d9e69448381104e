"""
Rule Builders
=============

Constructors for derivation nodes that compute the conclusion from the
premises. Left rules put their principal formula first in the antecedent,
right rules put it last in the succedent; components are located in the
premises by equality, so any copy of an equal formula serves.

Batch builders expand the n-ary conjunctions and disjunctions of the
interpolation engine (left folded, as app.core.syntax.conj/disj build
them) into single binary steps.
"""

from __future__ import annotations

from collections import Counter
from typing import Mapping, Optional, Sequence

from app.core.geometric import instantiate_blocks
from app.core.syntax import instantiate
from app.models.derivation import L, R, Derivation, RuleKind, RuleTag
from app.models.errors import MalformedDerivation
from app.models.syntax import (
    BOTTOM, TOP, And, Atom, Exists, Forall, Formula, Imp, Or, Sequent, Term, Var,
)
from app.models.theory import GeometricRule


def remove_one(formulas: Sequence[Formula], f: Formula) -> tuple[Formula, ...]:
    items = list(formulas)
    try:
        items.remove(f)
    except ValueError:
        raise MalformedDerivation(f"expected formula missing from a premise: {f}") from None
    return tuple(items)


def _same(a: Sequence[Formula], b: Sequence[Formula]) -> bool:
    return Counter(a) == Counter(b)


def _require_same(d1: Sequent, d2: Sequent, rule: str):
    if not (_same(d1.ant, d2.ant) and _same(d1.suc, d2.suc)):
        raise MalformedDerivation(f"{rule}: premise contexts differ")


# ---------------------------------------------------------------------------
# Leaves
# ---------------------------------------------------------------------------

def init_atom(p: Atom, ant: Sequence[Formula] = (), suc: Sequence[Formula] = ()) -> Derivation:
    """p, ant => suc, p"""
    return Derivation(Sequent((p,) + tuple(ant), tuple(suc) + (p,)),
                      RuleTag(RuleKind.INIT_ATOM), (L(0), R(len(suc))))


def init_bot(ant: Sequence[Formula] = (), suc: Sequence[Formula] = ()) -> Derivation:
    return Derivation(Sequent((BOTTOM,) + tuple(ant), tuple(suc)), RuleTag(RuleKind.INIT_BOT), (L(0),))


def init_top(ant: Sequence[Formula] = (), suc: Sequence[Formula] = ()) -> Derivation:
    return Derivation(Sequent(tuple(ant), tuple(suc) + (TOP,)), RuleTag(RuleKind.INIT_TOP), (R(len(suc)),))


def leaf_for(s: Sequent, kind: RuleKind, p: Optional[Formula] = None) -> Derivation:
    """A leaf concluding exactly s; principal occurrences found by equality."""
    try:
        if kind is RuleKind.INIT_ATOM:
            return Derivation(s, RuleTag(kind), (L(s.ant.index(p)), R(s.suc.index(p))))
        if kind is RuleKind.INIT_BOT:
            return Derivation(s, RuleTag(kind), (L(s.ant.index(BOTTOM)),))
        if kind is RuleKind.INIT_TOP:
            return Derivation(s, RuleTag(kind), (R(s.suc.index(TOP)),))
    except ValueError:
        raise MalformedDerivation(f"{kind.value} does not fit the sequent") from None
    raise MalformedDerivation(f"{kind.value} is not an initial sequent")


# ---------------------------------------------------------------------------
# Logical rules
# ---------------------------------------------------------------------------

def l_and(d: Derivation, a: And) -> Derivation:
    s = d.conclusion
    ant = remove_one(remove_one(s.ant, a.left), a.right)
    return Derivation(Sequent((a,) + ant, s.suc), RuleTag(RuleKind.L_AND), (L(0),), (d,))


def r_and(d1: Derivation, d2: Derivation, a: And) -> Derivation:
    s1, s2 = d1.conclusion, d2.conclusion
    suc = remove_one(s1.suc, a.left)
    _require_same(Sequent(s1.ant, suc), Sequent(s2.ant, remove_one(s2.suc, a.right)), "RAnd")
    return Derivation(Sequent(s1.ant, suc + (a,)), RuleTag(RuleKind.R_AND), (R(len(suc)),), (d1, d2))


def l_or(d1: Derivation, d2: Derivation, a: Or) -> Derivation:
    s1, s2 = d1.conclusion, d2.conclusion
    ant = remove_one(s1.ant, a.left)
    _require_same(Sequent(ant, s1.suc), Sequent(remove_one(s2.ant, a.right), s2.suc), "LOr")
    return Derivation(Sequent((a,) + ant, s1.suc), RuleTag(RuleKind.L_OR), (L(0),), (d1, d2))


def r_or(d: Derivation, a: Or) -> Derivation:
    s = d.conclusion
    suc = remove_one(remove_one(s.suc, a.left), a.right)
    return Derivation(Sequent(s.ant, suc + (a,)), RuleTag(RuleKind.R_OR), (R(len(suc)),), (d,))


def l_imp(d1: Derivation, d2: Derivation, a: Imp) -> Derivation:
    s1, s2 = d1.conclusion, d2.conclusion
    suc = remove_one(s1.suc, a.left)
    _require_same(Sequent(s1.ant, suc), Sequent(remove_one(s2.ant, a.right), s2.suc), "LImp")
    return Derivation(Sequent((a,) + s1.ant, suc), RuleTag(RuleKind.L_IMP), (L(0),), (d1, d2))


def r_imp(d: Derivation, a: Imp) -> Derivation:
    s = d.conclusion
    ant = remove_one(s.ant, a.left)
    suc = remove_one(s.suc, a.right)
    return Derivation(Sequent(ant, suc + (a,)), RuleTag(RuleKind.R_IMP), (R(len(suc)),), (d,))


def l_forall(d: Derivation, a: Forall, t: Term) -> Derivation:
    """The premise keeps a copy of a next to its instance a(t)."""
    s = d.conclusion
    ant = remove_one(remove_one(s.ant, instantiate(a, t)), a)
    return Derivation(Sequent((a,) + ant, s.suc), RuleTag(RuleKind.L_FORALL, witness=t), (L(0),), (d,))


def r_forall(d: Derivation, a: Forall, eigen: str) -> Derivation:
    s = d.conclusion
    suc = remove_one(s.suc, instantiate(a, Var(eigen)))
    return Derivation(Sequent(s.ant, suc + (a,)), RuleTag(RuleKind.R_FORALL, eigens=(eigen,)),
                      (R(len(suc)),), (d,))


def l_exists(d: Derivation, a: Exists, eigen: str) -> Derivation:
    s = d.conclusion
    ant = remove_one(s.ant, instantiate(a, Var(eigen)))
    return Derivation(Sequent((a,) + ant, s.suc), RuleTag(RuleKind.L_EXISTS, eigens=(eigen,)), (L(0),), (d,))


def r_exists(d: Derivation, a: Exists, t: Term) -> Derivation:
    s = d.conclusion
    suc = remove_one(remove_one(s.suc, instantiate(a, t)), a)
    return Derivation(Sequent(s.ant, suc + (a,)), RuleTag(RuleKind.R_EXISTS, witness=t), (R(len(suc)),), (d,))


# ---------------------------------------------------------------------------
# Geometric rules
# ---------------------------------------------------------------------------

def geo_node(premises: Sequence[Derivation], rule: GeometricRule, inst: Mapping[str, Term],
             eigens: Sequence[str] = (), *, atom: Optional[Formula] = None,
             positions: Sequence[int] = ()) -> Derivation:
    """
    Apply a geometric rule below its premises.

    Premise k must contain the k-th block of the instance plus the
    principal atoms; the conclusion drops the block and lists the
    principal atoms first.
    """
    principal, blocks = instantiate_blocks(rule, inst, tuple(eigens), atom, positions)
    if len(premises) != len(blocks):
        raise MalformedDerivation(f"{rule.rule_id} has {len(blocks)} premises, got {len(premises)}")
    contexts = []
    for premise, block in zip(premises, blocks):
        ant = premise.conclusion.ant
        for b in block:
            ant = remove_one(ant, b)
        for p in principal:
            ant = remove_one(ant, p)
        contexts.append(Sequent(ant, premise.conclusion.suc))
    for other in contexts[1:]:
        _require_same(contexts[0], other, rule.rule_id)
    tag = RuleTag(RuleKind.GEO, rule_id=rule.rule_id, eigens=tuple(eigens),
                  inst=tuple(sorted(inst.items())), positions=tuple(positions))
    conclusion = Sequent(tuple(principal) + contexts[0].ant, contexts[0].suc)
    return Derivation(conclusion, tag, tuple(L(i) for i in range(len(principal))), tuple(premises))


def geo_data(node: Derivation, rule: GeometricRule) -> dict:
    """Keyword arguments that rebuild `node` with geo_node."""
    data = {"inst": node.tag.inst_map, "eigens": node.tag.eigens, "positions": node.tag.positions}
    if rule.is_scheme:
        data["atom"] = node.conclusion.ant[node.principal[1].index]
    return data


# ---------------------------------------------------------------------------
# Batches
# ---------------------------------------------------------------------------

def r_or_batch(d: Derivation, items: Sequence[Formula]) -> Derivation:
    """From ... => ..., C1, ..., Cm to ... => ..., disj(C1..Cm)."""
    acc = items[0]
    for item in items[1:]:
        acc = Or(acc, item)
        d = r_or(d, acc)
    return d


def l_or_batch(ds: Sequence[Derivation], items: Sequence[Formula]) -> Derivation:
    d, acc = ds[0], items[0]
    for other, item in zip(ds[1:], items[1:]):
        acc = Or(acc, item)
        d = l_or(d, other, acc)
    return d


def r_and_batch(ds: Sequence[Derivation], items: Sequence[Formula]) -> Derivation:
    d, acc = ds[0], items[0]
    for other, item in zip(ds[1:], items[1:]):
        acc = And(acc, item)
        d = r_and(d, other, acc)
    return d


def l_and_batch(d: Derivation, items: Sequence[Formula]) -> Derivation:
    acc = items[0]
    for item in items[1:]:
        acc = And(acc, item)
        d = l_and(d, acc)
    return d


__all__ = [
    "geo_data", "geo_node", "init_atom", "init_bot", "init_top", "l_and",
    "l_and_batch", "l_exists", "l_forall", "l_imp", "l_or", "l_or_batch", "leaf_for", "r_and",
    "r_and_batch", "r_exists", "r_forall", "r_imp", "r_or", "r_or_batch", "remove_one",
]
