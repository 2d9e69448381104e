"""
Text Parsers
============

This module implements the readers for the three text formats:
1. Formulas and sequents (a lark LALR grammar)
2. Derivations, one node per line, children indented by two spaces
3. Theory files with `theory`, `pred` and `axiom` lines

Every failure is reported as ParseError carrying line and column.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from lark import Lark, Transformer, v_args
from lark.exceptions import LarkError, UnexpectedInput

from app.models.derivation import Derivation, Occ, RuleKind, RuleTag, Side
from app.models.errors import MalformedDerivation, ParseError
from app.models.syntax import (
    BOTTOM, TOP, And, Atom, Const, Exists, Forall, Formula, Imp, Or, Sequent, Term, Var,
)

GRAMMAR = r"""
sequent: [formula_list] "=>" [formula_list]
formula_list: formula ("," formula)*

?formula: imp
        | "forall" VAR "." formula -> forall_
        | "exists" VAR "." formula -> exists_

?imp: disj
    | disj "->" formula -> imp

?disj: conj
     | disj "|" conj -> or_

?conj: unary
     | conj "&" unary -> and_

?unary: "!" unary -> neg
      | primary

?primary: atom
        | "bot" -> bot
        | "top" -> top
        | "(" formula ")"

atom: PRED "(" term ("," term)* ")" -> app
    | PRED -> prop
    | term "=" term -> eq
    | term "<" term -> lt

term: VAR -> var
    | CONST -> const

PRED: /[A-Z][a-zA-Z0-9_]*/
VAR: /_?[a-z][a-zA-Z0-9_]*/
CONST: /#[a-zA-Z0-9_]+/

%import common.WS
%ignore WS
"""


@v_args(inline=True)
class _ToSyntax(Transformer):
    def var(self, token):
        return Var(str(token))

    def const(self, token):
        return Const(str(token)[1:])

    def app(self, pred, *terms):
        return Atom(str(pred), tuple(terms))

    def prop(self, pred):
        return Atom(str(pred), ())

    def eq(self, a, b):
        return Atom("=", (a, b))

    def lt(self, a, b):
        return Atom("<", (a, b))

    def bot(self):
        return BOTTOM

    def top(self):
        return TOP

    def neg(self, f):
        return Imp(f, BOTTOM)

    def and_(self, a, b):
        return And(a, b)

    def or_(self, a, b):
        return Or(a, b)

    def imp(self, a, b):
        return Imp(a, b)

    def forall_(self, v, body):
        return Forall(str(v), body)

    def exists_(self, v, body):
        return Exists(str(v), body)

    def formula_list(self, *formulas):
        return tuple(formulas)

    def sequent(self, ant, suc):
        return Sequent(ant or (), suc or ())


_parser = Lark(
    GRAMMAR,
    parser="lalr",
    start=["formula", "sequent"],
    maybe_placeholders=True,
    transformer=_ToSyntax(),
)


def _parse(text: str, start: str, line: Optional[int], offset: int):
    try:
        return _parser.parse(text, start=start)
    except UnexpectedInput as e:
        col = getattr(e, "column", None)
        col = (col + offset) if isinstance(col, int) and col > 0 else offset + 1
        err_line = line if line is not None else getattr(e, "line", None)
        raise ParseError(f"unexpected input in {start} '{text.strip()}'", err_line, col) from e
    except LarkError as e:
        raise ParseError(f"cannot parse {start} '{text.strip()}': {e}", line, offset + 1) from e


def parse_formula(text: str, *, line: Optional[int] = None, offset: int = 0) -> Formula:
    return _parse(text, "formula", line, offset)


def parse_sequent(text: str, *, line: Optional[int] = None, offset: int = 0) -> Sequent:
    return _parse(text, "sequent", line, offset)


_TERM_RE = re.compile(r"^(#[a-zA-Z0-9_]+|_?[a-z][a-zA-Z0-9_]*)$")
_VAR_RE = re.compile(r"^_?[a-z][a-zA-Z0-9_]*$")


def parse_term(text: str, *, line: Optional[int] = None) -> Term:
    text = text.strip()
    if not _TERM_RE.match(text) or text in ("forall", "exists", "bot", "top"):
        raise ParseError(f"not a term: '{text}'", line, 1)
    return Const(text[1:]) if text.startswith("#") else Var(text)


def _parse_var(text: str, line: int) -> str:
    text = text.strip()
    if not _VAR_RE.match(text):
        raise ParseError(f"not a variable: '{text}'", line, 1)
    return text


# ---------------------------------------------------------------------------
# Derivations
# ---------------------------------------------------------------------------

_NODE_RE = re.compile(
    r"^(?P<indent> *)(?P<tag>[A-Za-z]+) @(?P<principal>-|[LR]\d+(?:,[LR]\d+)*)"
    r"(?: \[(?P<data>[^\]]*)\])? \|-(?: (?P<sequent>.*))?$"
)

_TAGS = {kind.value: kind for kind in RuleKind}


def _parse_principal(text: str) -> tuple[Occ, ...]:
    if text == "-":
        return ()
    return tuple(Occ(Side(part[0]), int(part[1:])) for part in text.split(","))


def _int_list(text: str, line: int) -> tuple[int, ...]:
    try:
        return tuple(int(p) for p in text.split(",") if p.strip())
    except ValueError as e:
        raise ParseError(f"bad position list '{text}'", line, 1) from e


def _parse_tag(kind: RuleKind, data: Optional[str], line: int) -> RuleTag:
    if kind in (RuleKind.L_FORALL, RuleKind.R_EXISTS):
        if data is None:
            raise ParseError(f"{kind.value} needs a witness term", line, 1)
        return RuleTag(kind, witness=parse_term(data, line=line))
    if kind in (RuleKind.R_FORALL, RuleKind.L_EXISTS):
        if data is None:
            raise ParseError(f"{kind.value} needs an eigenvariable", line, 1)
        return RuleTag(kind, eigens=(_parse_var(data, line),))
    if kind in (RuleKind.GEO, RuleKind.AXIOM):
        if not data:
            raise ParseError(f"{kind.value} needs a rule name", line, 1)
        parts = [p.strip() for p in data.split(";")]
        rule_id, inst, eigens, positions = parts[0], [], (), ()
        for part in parts[1:]:
            if part.startswith("eig "):
                eigens = tuple(_parse_var(v, line) for v in part[4:].split(","))
            elif part.startswith("pos "):
                positions = _int_list(part[4:], line)
            elif part:
                for binding in part.split(","):
                    if ":=" not in binding:
                        raise ParseError(f"bad instantiation '{binding.strip()}'", line, 1)
                    var, term = binding.split(":=", 1)
                    inst.append((_parse_var(var, line), parse_term(term, line=line)))
        return RuleTag(kind, rule_id=rule_id, inst=tuple(inst), eigens=eigens, positions=positions)
    if data is not None:
        raise ParseError(f"{kind.value} takes no data", line, 1)
    return RuleTag(kind)


@dataclass
class _Node:
    depth: int
    conclusion: Sequent
    tag: RuleTag
    principal: tuple[Occ, ...]
    children: list = field(default_factory=list)

    def freeze(self) -> Derivation:
        return Derivation(self.conclusion, self.tag, self.principal, tuple(c.freeze() for c in self.children))


def parse_derivation(text: str) -> Derivation:
    """
    Parse the derivation text format.

    Each line is `<indent><Tag> @<principal> [<data>] |- <sequent>`; the
    premises of a node follow it, indented two more spaces. Blank lines
    and lines starting with `%` are ignored.
    """
    root: Optional[_Node] = None
    stack: list[_Node] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip() or raw.lstrip().startswith("%"):
            continue
        m = _NODE_RE.match(raw.rstrip("\n"))
        if not m:
            raise ParseError("not a derivation line", lineno, 1)
        indent = len(m.group("indent"))
        if indent % 2:
            raise ParseError("indentation must be a multiple of two spaces", lineno, 1)
        depth = indent // 2
        kind = _TAGS.get(m.group("tag"))
        if kind is None:
            raise ParseError(f"unknown rule tag '{m.group('tag')}'", lineno, indent + 1)
        try:
            tag = _parse_tag(kind, m.group("data"), lineno)
        except MalformedDerivation as e:
            raise ParseError(str(e), lineno, indent + 1) from e
        seq_text = m.group("sequent") or ""
        sequent = parse_sequent(seq_text, line=lineno, offset=m.start("sequent") if m.group("sequent") else 0)
        node = _Node(depth, sequent, tag, _parse_principal(m.group("principal")))
        if depth == 0:
            if root is not None:
                raise ParseError("a derivation has exactly one root", lineno, 1)
            root = node
            stack = [node]
            continue
        if root is None or depth > len(stack):
            raise ParseError("premise without a parent node", lineno, 1)
        del stack[depth:]
        stack[-1].children.append(node)
        stack.append(node)
    if root is None:
        raise ParseError("empty derivation", 1, 1)
    return root.freeze()


# ---------------------------------------------------------------------------
# Theory files
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AxiomSource:
    name: str
    formula: Formula
    line: int
    column: int


@dataclass(frozen=True)
class TheorySource:
    name: str
    predicates: tuple[tuple[str, int], ...]
    axioms: tuple[AxiomSource, ...]
    includes: tuple[str, ...] = ()


_THEORY_RE = re.compile(r"^theory\s+(?P<name>[A-Za-z_][A-Za-z0-9_:\-]*)\s*$")
_INCLUDE_RE = re.compile(r"^include\s+(?P<name>[A-Za-z_][A-Za-z0-9_:\-]*)\s*$")
_PRED_RE = re.compile(r"^pred\s+(?P<name>[^\s/]+)/(?P<arity>\d+)\s*$")
_AXIOM_RE = re.compile(r"^axiom\s+(?P<name>[A-Za-z_][A-Za-z0-9_\-]*)\s*:(?P<body>.*)$")


def parse_theory(text: str) -> TheorySource:
    name = None
    predicates: list[tuple[str, int]] = []
    axioms: list[AxiomSource] = []
    includes: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        if m := _THEORY_RE.match(line):
            if name is not None:
                raise ParseError("duplicate theory line", lineno, 1)
            name = m.group("name")
        elif m := _INCLUDE_RE.match(line):
            includes.append(m.group("name"))
        elif m := _PRED_RE.match(line):
            predicates.append((m.group("name"), int(m.group("arity"))))
        elif m := _AXIOM_RE.match(line):
            offset = raw.index(line) + m.start("body")
            formula = parse_formula(m.group("body"), line=lineno, offset=offset)
            axioms.append(AxiomSource(m.group("name"), formula, lineno, offset + 1))
        else:
            raise ParseError("expected a theory, include, pred or axiom line", lineno, 1)
    if name is None:
        raise ParseError("missing 'theory <name>' line", 1, 1)
    return TheorySource(name, tuple(predicates), tuple(axioms), tuple(includes))
