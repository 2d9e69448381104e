"""
Text Printers
=============

Inverse of app.core.parser: formulas, sequents, partitions and
derivations are printed in the exact text that parses back to them.
`A -> bot` is always printed as `!A`, and a quantifier is parenthesised
whenever it is the operand of a connective (except to the right of `->`).
"""

from __future__ import annotations

from app.models.derivation import Derivation, RuleKind, RuleTag
from app.models.syntax import (
    And, Atom, Bottom, Exists, Forall, Formula, Imp, Or, Sequent, Term, Top,
)
from app.models.theory import SCHEME_PREDICATE, GeometricRule

# binding levels: quantifier 0, -> 1, | 2, & 3, unary 4
_QUANT, _IMP, _OR, _AND, _UNARY = range(5)


def format_term(t: Term) -> str:
    return str(t)


def format_formula(f: Formula, level: int = _QUANT) -> str:
    match f:
        case Atom(pred, args):
            if pred in ("=", "<") and len(args) == 2:
                return f"{args[0]} {pred} {args[1]}"
            if not args:
                return pred
            return f"{pred}({', '.join(str(t) for t in args)})"
        case Bottom():
            return "bot"
        case Top():
            return "top"
        case Imp(a, Bottom()):
            return "!" + format_formula(a, _UNARY)
        case Imp(a, b):
            text, own = f"{format_formula(a, _OR)} -> {format_formula(b, _QUANT)}", _IMP
        case Or(a, b):
            text, own = f"{format_formula(a, _OR)} | {format_formula(b, _AND)}", _OR
        case And(a, b):
            text, own = f"{format_formula(a, _AND)} & {format_formula(b, _UNARY)}", _AND
        case Forall(v, body):
            text, own = f"forall {v}. {format_formula(body, _QUANT)}", _QUANT
        case Exists(v, body):
            text, own = f"exists {v}. {format_formula(body, _QUANT)}", _QUANT
        case _:
            raise TypeError(f"not a formula: {f!r}")
    return f"({text})" if level > own else text


def format_sequent(s: Sequent) -> str:
    ant = ", ".join(format_formula(f) for f in s.ant)
    suc = ", ".join(format_formula(f) for f in s.suc)
    return f"{ant} => {suc}".strip()


def format_tag_data(tag: RuleTag) -> str:
    if tag.witness is not None:
        return str(tag.witness)
    if tag.kind in (RuleKind.R_FORALL, RuleKind.L_EXISTS):
        return tag.eigen
    if tag.kind in (RuleKind.GEO, RuleKind.AXIOM):
        parts = [tag.rule_id]
        if tag.inst:
            parts.append(", ".join(f"{v}:={t}" for v, t in tag.inst))
        if tag.eigens:
            parts.append("eig " + ",".join(tag.eigens))
        if tag.positions:
            parts.append("pos " + ",".join(str(p) for p in tag.positions))
        return "; ".join(parts)
    return ""


def format_node(d: Derivation, depth: int = 0) -> str:
    principal = ",".join(str(o) for o in d.principal) or "-"
    parts = ["  " * depth + d.tag.kind.value, f"@{principal}"]
    data = format_tag_data(d.tag)
    if data:
        parts.append(f"[{data}]")
    parts += ["|-", format_sequent(d.conclusion)]
    return " ".join(parts)


def format_derivation(d: Derivation) -> str:
    """One node per line, premises indented two spaces below their conclusion."""
    lines: list[str] = []

    def emit(node: Derivation, depth: int):
        lines.append(format_node(node, depth))
        for premise in node.premises:
            emit(premise, depth + 1)

    emit(d, 0)
    return "\n".join(lines) + "\n"


def format_rule(r: GeometricRule) -> str:
    """`id(xs): principal atoms ==> block | block`, each block with its eigenvariables."""
    head = f"{r.rule_id}({', '.join(r.universals)})"
    if r.is_scheme:
        return f"{head}: x = y, {SCHEME_PREDICATE}(..x..) ==> {SCHEME_PREDICATE}(..y..)  [{r.scheme} scheme]"
    blocks = []
    for block in r.blocks:
        atoms = ", ".join(format_formula(a) for a in block.atoms)
        blocks.append(f"exists {','.join(block.eigens)}. {atoms}" if block.eigens else atoms)
    principal = ", ".join(format_formula(a) for a in r.principal) or "top"
    return f"{head}: {principal} ==> {' | '.join(blocks)}"
