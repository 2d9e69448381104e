"""
Maehara Oracle
==============

Interpolants of pure G derivations computed by the classical Maehara
construction, formula only and without witnesses. It shares nothing with
app.core.interpolate beyond the premise partitions, and serves as an
independent oracle: on a derivation without geometric rules both must
produce the same formula.
"""

from __future__ import annotations

from app.core.kernel import formula_at
from app.core.partition import Partition, premise_partitions, split
from app.core.syntax import Fresh, replace_terms, ter_of
from app.core.transform import derivation_names
from app.models.derivation import Derivation, RuleKind
from app.models.errors import MalformedDerivation
from app.models.syntax import BOTTOM, TOP, And, Exists, Forall, Formula, Imp, Or, Var


def maehara_interpolant(d: Derivation, p: Partition) -> Formula:
    p.validate(d.conclusion)
    return _interpolant(d, p, Fresh("_z", derivation_names(d)))


def _close(c: Formula, closing, other, binder, z: Fresh) -> Formula:
    shared = set(ter_of(closing)) & set(ter_of(other))
    outside = [t for t in ter_of(c) if t not in shared]
    if not outside:
        return c
    names = [z.name() for _ in outside]
    c = replace_terms(c, {t: Var(n) for t, n in zip(outside, names)})
    for n in reversed(names):
        c = binder(n, c)
    return c


def _interpolant(node: Derivation, p: Partition, z: Fresh) -> Formula:
    kind = node.kind
    if kind is RuleKind.GEO or kind is RuleKind.AXIOM:
        raise MalformedDerivation("the Maehara construction covers pure G derivations only")

    if kind is RuleKind.INIT_ATOM:
        i, j = node.principal
        atom = formula_at(node.conclusion, i)
        match (p.side_of(i), p.side_of(j)):
            case (1, 1):
                return BOTTOM
            case (2, 2):
                return TOP
            case (1, 2):
                return atom
            case _:
                return Imp(atom, BOTTOM)
    if kind in (RuleKind.INIT_BOT, RuleKind.INIT_TOP):
        return BOTTOM if p.side_of(node.principal[0]) == 1 else TOP

    side = p.side_of(node.principal[0])
    parts = premise_partitions(node, p)
    cs = [_interpolant(premise, q, z) for premise, q in zip(node.premises, parts)]
    if len(cs) == 2:
        return Or(*cs) if side == 1 else And(*cs)

    c = cs[0]
    if kind in (RuleKind.L_FORALL, RuleKind.R_EXISTS):
        one, two = split(node.conclusion, p)
        c = _close(c, one, two, Forall, z) if side == 1 else _close(c, two, one, Exists, z)
    return c
