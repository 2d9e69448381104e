"""
Syntax Operations
=================

This module implements the operations on terms, formulas and sequents:
1. Free variables, constants, terms, predicates and languages
2. Simultaneous variable substitution and term-for-term substitution
3. Bound variables and alpha-equivalence
4. n-ary conjunction and disjunction helpers
5. The Fresh name supply used by every transformer

Substitution never renames bound variables silently: a substitution that
would capture raises CaptureError, and callers that need capture freedom
draw fresh names from an explicit Fresh instance.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence, Union

from app.models.errors import ArityError, CaptureError
from app.models.syntax import (
    IDENTITY, And, Atom, Bottom, Exists, Forall, Formula, Imp, Language, Or,
    Sequent, Term, Top, Var,
)

Syntax = Union[Formula, Sequent, Iterable[Formula]]


def _formulas(x: Syntax) -> tuple[Formula, ...]:
    if isinstance(x, Sequent):
        return x.formulas()
    if isinstance(x, (Atom, Bottom, Top, And, Or, Imp, Forall, Exists)):
        return (x,)
    return tuple(x)


def _sorted_terms(terms: Iterable[Term]) -> tuple[Term, ...]:
    return tuple(sorted(set(terms), key=Term.sort_key))


def _free_names(f: Formula) -> set[str]:
    match f:
        case Atom(args=args):
            return {t.name for t in args if t.is_var}
        case And(l, r) | Or(l, r) | Imp(l, r):
            return _free_names(l) | _free_names(r)
        case Forall(v, body) | Exists(v, body):
            return _free_names(body) - {v}
        case _:
            return set()


def _constant_terms(f: Formula) -> set[Term]:
    match f:
        case Atom(args=args):
            return {t for t in args if not t.is_var}
        case And(l, r) | Or(l, r) | Imp(l, r):
            return _constant_terms(l) | _constant_terms(r)
        case Forall(_, body) | Exists(_, body):
            return _constant_terms(body)
        case _:
            return set()


def _bound_names(f: Formula) -> set[str]:
    match f:
        case And(l, r) | Or(l, r) | Imp(l, r):
            return _bound_names(l) | _bound_names(r)
        case Forall(v, body) | Exists(v, body):
            return {v} | _bound_names(body)
        case _:
            return set()


def _predicates(f: Formula) -> set[tuple[str, int]]:
    match f:
        case Atom(pred=pred, args=args):
            return set() if pred == IDENTITY else {(pred, len(args))}
        case And(l, r) | Or(l, r) | Imp(l, r):
            return _predicates(l) | _predicates(r)
        case Forall(_, body) | Exists(_, body):
            return _predicates(body)
        case _:
            return set()


def free_var_names(x: Syntax) -> set[str]:
    names: set[str] = set()
    for f in _formulas(x):
        names |= _free_names(f)
    return names


def free_vars(x: Syntax) -> tuple[Term, ...]:
    """Free variables of a formula, sequent or formula collection."""
    return _sorted_terms(Var(n) for n in free_var_names(x))


def constants(x: Syntax) -> tuple[Term, ...]:
    terms: set[Term] = set()
    for f in _formulas(x):
        terms |= _constant_terms(f)
    return _sorted_terms(terms)


def ter_of(x: Syntax) -> tuple[Term, ...]:
    return _sorted_terms(free_vars(x) + constants(x))


def rel_of(x: Syntax) -> tuple[tuple[str, int], ...]:
    preds: set[tuple[str, int]] = set()
    for f in _formulas(x):
        preds |= _predicates(f)
    return tuple(sorted(preds))


def lang_of(x: Syntax) -> Language:
    return Language(ter_of(x), rel_of(x))


def bound_vars(x: Syntax) -> set[str]:
    names: set[str] = set()
    for f in _formulas(x):
        names |= _bound_names(f)
    return names


def var_names(x: Syntax) -> set[str]:
    """Every variable name occurring in x, free or bound."""
    return free_var_names(x) | bound_vars(x)


def atoms_of(f: Formula) -> tuple[Atom, ...]:
    match f:
        case Atom():
            return (f,)
        case And(l, r) | Or(l, r) | Imp(l, r):
            return atoms_of(l) + atoms_of(r)
        case Forall(_, body) | Exists(_, body):
            return atoms_of(body)
        case _:
            return ()


def _occurs(u: Term, f: Formula) -> bool:
    if u.is_var:
        return u.name in _free_names(f)
    return u in _constant_terms(f)


def replace_terms(f: Formula, mapping: Mapping[Term, Term]) -> Formula:
    """
    Simultaneously replace terms in f.

    Variable keys replace free occurrences only; constant keys replace
    every occurrence. Raises CaptureError when a replacement variable
    would be bound at a replaced occurrence.
    """
    if not mapping:
        return f
    match f:
        case Atom(pred, args):
            return Atom(pred, tuple(mapping.get(t, t) for t in args))
        case Bottom() | Top():
            return f
        case And(l, r):
            return And(replace_terms(l, mapping), replace_terms(r, mapping))
        case Or(l, r):
            return Or(replace_terms(l, mapping), replace_terms(r, mapping))
        case Imp(l, r):
            return Imp(replace_terms(l, mapping), replace_terms(r, mapping))
        case Forall(v, body) | Exists(v, body):
            inner = {u: t for u, t in mapping.items() if not (u.is_var and u.name == v)}
            for u, t in inner.items():
                if t.is_var and t.name == v and _occurs(u, body):
                    raise CaptureError(f"{t} would be captured by the binder {v} when replacing {u}")
            return type(f)(v, replace_terms(body, inner))
    raise TypeError(f"not a formula: {f!r}")


def subst_vars(f: Formula, xs: Sequence[Union[str, Term]], ts: Sequence[Term]) -> Formula:
    """f[xs := ts], simultaneous."""
    if len(xs) != len(ts):
        raise ArityError(f"{len(xs)} variables but {len(ts)} terms")
    keys = [x if isinstance(x, Term) else Var(x) for x in xs]
    for k in keys:
        if not k.is_var:
            raise ArityError(f"{k} is not a variable")
    return replace_terms(f, dict(zip(keys, ts)))


def subst_term(x: Union[Formula, Sequent], u: Term, t: Term) -> Union[Formula, Sequent]:
    """Replace the term u by t (free occurrences when u is a variable)."""
    if u == t:
        return x
    mapping = {u: t}
    if isinstance(x, Sequent):
        return Sequent(
            tuple(replace_terms(f, mapping) for f in x.ant),
            tuple(replace_terms(f, mapping) for f in x.suc),
        )
    return replace_terms(x, mapping)


def instantiate(f: Union[Forall, Exists], t: Term) -> Formula:
    """Body of a quantified formula with its bound variable replaced by t."""
    return replace_terms(f.body, {Var(f.var): t})


def alpha_equal(f: Formula, g: Formula) -> bool:
    """Equality up to renaming of bound variables."""
    return _alpha(f, g, {}, {}, 0)


def _alpha(f, g, env_f: dict, env_g: dict, depth: int) -> bool:
    match f, g:
        case Atom(p, a), Atom(q, b):
            if p != q or len(a) != len(b):
                return False
            for s, t in zip(a, b):
                s_key = ("b", env_f[s.name]) if s.is_var and s.name in env_f else ("f", s)
                t_key = ("b", env_g[t.name]) if t.is_var and t.name in env_g else ("f", t)
                if s_key != t_key:
                    return False
            return True
        case Bottom(), Bottom():
            return True
        case Top(), Top():
            return True
        case (And(a, b), And(c, d)) | (Or(a, b), Or(c, d)) | (Imp(a, b), Imp(c, d)):
            return type(f) is type(g) and _alpha(a, c, env_f, env_g, depth) and _alpha(b, d, env_f, env_g, depth)
        case (Forall(v, a), Forall(w, b)) | (Exists(v, a), Exists(w, b)):
            if type(f) is not type(g):
                return False
            return _alpha(a, b, {**env_f, v: depth}, {**env_g, w: depth}, depth + 1)
    return False


def conj(items: Sequence[Formula]) -> Formula:
    """Left-folded conjunction; a single item is returned as is."""
    if not items:
        raise ValueError("empty conjunction")
    result = items[0]
    for item in items[1:]:
        result = And(result, item)
    return result


def disj(items: Sequence[Formula]) -> Formula:
    if not items:
        raise ValueError("empty disjunction")
    result = items[0]
    for item in items[1:]:
        result = Or(result, item)
    return result


def is_pure(x: Syntax) -> bool:
    return not (free_var_names(x) & bound_vars(x))


class Fresh:
    """
    Monotone supply of fresh variable names: prefix0, prefix1, ...

    Names listed in `avoid` (and every name handed out) are skipped. One
    instance is created per operation and passed down explicitly.
    """

    def __init__(self, prefix: str = "_v", avoid: Iterable[str] = ()):
        self.prefix = prefix
        self.counter = 0
        self.avoid = set(avoid)

    def avoid_names(self, names: Iterable[str]) -> "Fresh":
        self.avoid.update(names)
        return self

    def name(self) -> str:
        while True:
            candidate = f"{self.prefix}{self.counter}"
            self.counter += 1
            if candidate not in self.avoid:
                self.avoid.add(candidate)
                return candidate

    def var(self) -> Term:
        return Var(self.name())
