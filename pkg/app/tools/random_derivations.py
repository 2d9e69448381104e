#!/usr/bin/env python3
"""
Random Derivations
==================

Seeded generator of checked derivations over G, G_eq and SPO, used by the
property tests and the selftest:
1. Leaves are initial sequents with small random contexts
2. Inner nodes are built from the rule builders; missing principal
   formulas and mismatched contexts are supplied by weakening
3. Quantifier rules generalise a term of a premise formula (LForall,
   RExists) or a term renamed to a fresh eigenvariable (RForall, LExists)
4. Geometric nodes weaken their premises with the block and principal
   atoms of a random rule instance

Language: the binary predicates of the theory, free variables u and v,
bound variables x and y, constants #a, #b, #c.
"""

from __future__ import annotations

import argparse
import random
from collections import Counter
from typing import Optional, Sequence

from app.core.build import (
    geo_node, init_atom, init_bot, init_top, l_and, l_exists, l_forall, l_imp, l_or, r_and, r_exists,
    r_forall, r_imp, r_or, remove_one,
)
from app.core.geometric import instantiate_blocks, load_theory
from app.core.kernel import check
from app.core.partition import Partition, all_partitions
from app.core.printer import format_derivation
from app.core.syntax import Fresh, replace_terms, ter_of, var_names
from app.core.transform import subst_derivation, weaken, weaken_all
from app.models.derivation import Derivation, Side
from app.models.errors import InvariantViolation
from app.models.syntax import (
    BOTTOM, TOP, And, Atom, Const, Exists, Forall, Formula, Imp, Or, Sequent, Var,
)
from app.models.theory import TheorySpec

FREE = ("u", "v")
BOUND = ("x", "y")
CONSTANTS = ("a", "b", "c")

LOGICAL = ("LAnd", "ROr", "RImp", "RAnd", "LOr", "LImp", "LForall", "RExists", "RForall", "LExists")


def theory_predicates(theory: TheorySpec) -> tuple[str, ...]:
    """Three binary predicates: = and < take the place of R and Q when the theory has rules for them."""
    names = ["P", "Q", "R"]
    if theory.rule("Repl") is not None:
        names[2] = "="
    if ("<", 2) in theory.predicates:
        names[1] = "<"
    return tuple(names)


def _missing(want: Sequence[Formula], have: Sequence[Formula]) -> list[Formula]:
    return list((Counter(want) - Counter(have)).elements())


class DerivationGenerator:
    def __init__(self, theory: TheorySpec, seed: int = 0, max_height: int = 4):
        self.theory = theory
        self.rng = random.Random(seed)
        self.max_height = max_height
        self.predicates = theory_predicates(theory)
        self.terms = tuple(Var(n) for n in FREE) + tuple(Const(c) for c in CONSTANTS)
        self.fresh = Fresh("_v", FREE + BOUND)
        self.choices = LOGICAL + (("Geo",) * 3 if theory.rules else ())

    # -- formulas -----------------------------------------------------------

    def term(self):
        return self.rng.choice(self.terms)

    def atom(self) -> Atom:
        return Atom(self.rng.choice(self.predicates), (self.term(), self.term()))

    def formula(self, depth: int = 1) -> Formula:
        roll = self.rng.random()
        if depth == 0 or roll < 0.5:
            return self.atom()
        if roll < 0.55:
            return BOTTOM
        if roll < 0.6:
            return TOP
        cls = self.rng.choice((And, Or, Imp))
        return cls(self.formula(depth - 1), self.formula(depth - 1))

    def context(self) -> tuple[Formula, ...]:
        return tuple(self.formula() for _ in range(self.rng.randint(0, 1)))

    # -- derivations --------------------------------------------------------

    def generate(self) -> Derivation:
        d = self.derivation(self.max_height)
        report = check(d, self.theory)
        if not report.ok:
            raise InvariantViolation(f"generated derivation does not check:\n{report}")
        return d

    def derivation(self, h: int) -> Derivation:
        if h <= 0 or self.rng.random() < 0.2:
            return self.leaf()
        choice = self.rng.choice(self.choices)
        d = getattr(self, f"_{choice.lower()}")(h)
        return d if d is not None else self.leaf()

    def leaf(self) -> Derivation:
        ant, suc = self.context(), self.context()
        roll = self.rng.random()
        if roll < 0.8:
            return init_atom(self.atom(), ant, suc)
        if roll < 0.9:
            return init_bot(ant, suc)
        return init_top(ant, suc)

    def _ensure(self, d: Derivation, side: Side, count: int) -> Derivation:
        while len(d.conclusion.ant if side is Side.LEFT else d.conclusion.suc) < count:
            d = weaken(d, self.formula(), side, self.fresh)
        return d

    def _pick(self, formulas: Sequence[Formula], count: int) -> list[Formula]:
        return [formulas[i] for i in self.rng.sample(range(len(formulas)), count)]

    def _bound_var(self, a: Formula) -> Optional[str]:
        names = [x for x in BOUND if x not in var_names(a)]
        return self.rng.choice(names) if names else None

    # one premise, principal components already present

    def _land(self, h):
        d = self._ensure(self.derivation(h - 1), Side.LEFT, 2)
        a, b = self._pick(d.conclusion.ant, 2)
        return l_and(d, And(a, b))

    def _ror(self, h):
        d = self._ensure(self.derivation(h - 1), Side.RIGHT, 2)
        a, b = self._pick(d.conclusion.suc, 2)
        return r_or(d, Or(a, b))

    def _rimp(self, h):
        d = self._ensure(self._ensure(self.derivation(h - 1), Side.LEFT, 1), Side.RIGHT, 1)
        return r_imp(d, Imp(self.rng.choice(d.conclusion.ant), self.rng.choice(d.conclusion.suc)))

    # two premises, contexts equalised by weakening

    def _align(self, d1: Derivation, f1: Formula, side1: Side, d2: Derivation, f2: Formula, side2: Side):
        def context(d, f, side):
            s = d.conclusion
            if side is Side.LEFT:
                return remove_one(s.ant, f), s.suc
            return s.ant, remove_one(s.suc, f)

        ant1, suc1 = context(d1, f1, side1)
        ant2, suc2 = context(d2, f2, side2)
        d1 = weaken_all(weaken_all(d1, _missing(ant2, ant1), Side.LEFT, self.fresh),
                        _missing(suc2, suc1), Side.RIGHT, self.fresh)
        d2 = weaken_all(weaken_all(d2, _missing(ant1, ant2), Side.LEFT, self.fresh),
                        _missing(suc1, suc2), Side.RIGHT, self.fresh)
        return d1, d2

    def _rand(self, h):
        d1 = self._ensure(self.derivation(h - 1), Side.RIGHT, 1)
        d2 = self._ensure(self.derivation(h - 1), Side.RIGHT, 1)
        a, b = self.rng.choice(d1.conclusion.suc), self.rng.choice(d2.conclusion.suc)
        d1, d2 = self._align(d1, a, Side.RIGHT, d2, b, Side.RIGHT)
        return r_and(d1, d2, And(a, b))

    def _lor(self, h):
        d1 = self._ensure(self.derivation(h - 1), Side.LEFT, 1)
        d2 = self._ensure(self.derivation(h - 1), Side.LEFT, 1)
        a, b = self.rng.choice(d1.conclusion.ant), self.rng.choice(d2.conclusion.ant)
        d1, d2 = self._align(d1, a, Side.LEFT, d2, b, Side.LEFT)
        return l_or(d1, d2, Or(a, b))

    def _limp(self, h):
        d1 = self._ensure(self.derivation(h - 1), Side.RIGHT, 1)
        d2 = self._ensure(self.derivation(h - 1), Side.LEFT, 1)
        a, b = self.rng.choice(d1.conclusion.suc), self.rng.choice(d2.conclusion.ant)
        d1, d2 = self._align(d1, a, Side.RIGHT, d2, b, Side.LEFT)
        return l_imp(d1, d2, Imp(a, b))

    # quantifiers

    def _generalise(self, d: Derivation, side: Side):
        formulas = d.conclusion.ant if side is Side.LEFT else d.conclusion.suc
        a = self.rng.choice(formulas)
        terms = ter_of(a)
        x = self._bound_var(a)
        if not terms or x is None:
            return None
        t = self.rng.choice(terms)
        return t, x, replace_terms(a, {t: Var(x)})

    def _lforall(self, h):
        d = self._ensure(self.derivation(h - 1), Side.LEFT, 1)
        found = self._generalise(d, Side.LEFT)
        if found is None:
            return None
        t, x, body = found
        b = Forall(x, body)
        return l_forall(weaken(d, b, Side.LEFT, self.fresh), b, t)

    def _rexists(self, h):
        d = self._ensure(self.derivation(h - 1), Side.RIGHT, 1)
        found = self._generalise(d, Side.RIGHT)
        if found is None:
            return None
        t, x, body = found
        b = Exists(x, body)
        return r_exists(weaken(d, b, Side.RIGHT, self.fresh), b, t)

    def _eigen_candidates(self, s: Sequent, side: Side) -> list[tuple[int, object]]:
        formulas = s.ant if side is Side.LEFT else s.suc
        result = []
        for i, a in enumerate(formulas):
            others = [f for j, f in enumerate(formulas) if j != i]
            others += list(s.suc if side is Side.LEFT else s.ant)
            elsewhere = set(ter_of(others))
            result.extend((i, t) for t in ter_of(a) if t not in elsewhere)
        return result

    def _rename_to_eigen(self, d: Derivation, side: Side):
        candidates = self._eigen_candidates(d.conclusion, side)
        if not candidates:
            return None
        i, t = self.rng.choice(candidates)
        e = self.fresh.var()
        d = subst_derivation(d, t, e, self.fresh)
        a = (d.conclusion.ant if side is Side.LEFT else d.conclusion.suc)[i]
        x = self._bound_var(a)
        if x is None:
            return None
        return d, e, x, replace_terms(a, {e: Var(x)})

    def _rforall(self, h):
        found = self._rename_to_eigen(self._ensure(self.derivation(h - 1), Side.RIGHT, 1), Side.RIGHT)
        if found is None:
            return None
        d, e, x, body = found
        return r_forall(d, Forall(x, body), e.name)

    def _lexists(self, h):
        found = self._rename_to_eigen(self._ensure(self.derivation(h - 1), Side.LEFT, 1), Side.LEFT)
        if found is None:
            return None
        d, e, x, body = found
        return l_exists(d, Exists(x, body), e.name)

    # geometric rules

    def _geo(self, h):
        rule = self.rng.choice(self.theory.rules)
        atom, positions, eigens = None, (), ()
        if rule.is_scheme:
            s, t = self.term(), self.term()
            args = [self.term(), self.term()]
            args[self.rng.randrange(2)] = s
            atom = Atom(self.rng.choice(self.predicates), tuple(args))
            where = [k for k, arg in enumerate(args) if arg == s]
            positions = tuple(sorted(self.rng.sample(where, self.rng.randint(1, len(where)))))
            inst = {"x": s, "y": t}
        else:
            inst = {x: self.term() for x in rule.universals}
            eigens = tuple(self.fresh.name() for _ in rule.existentials)
        principal, blocks = instantiate_blocks(rule, inst, eigens, atom, positions)

        premises, contexts = [], []
        for block in blocks:
            d = weaken_all(self.derivation(h - 1), list(block) + list(principal), Side.LEFT, self.fresh)
            ant = d.conclusion.ant
            for f in tuple(block) + tuple(principal):
                ant = remove_one(ant, f)
            premises.append(d)
            contexts.append((Counter(ant), Counter(d.conclusion.suc)))
        target_ant, target_suc = Counter(), Counter()
        for ant, suc in contexts:
            target_ant |= ant
            target_suc |= suc
        aligned = []
        for d, (ant, suc) in zip(premises, contexts):
            d = weaken_all(d, list((target_ant - ant).elements()), Side.LEFT, self.fresh)
            aligned.append(weaken_all(d, list((target_suc - suc).elements()), Side.RIGHT, self.fresh))
        return geo_node(aligned, rule, inst, eigens, atom=atom, positions=positions)


def sample_partitions(s: Sequent, count: int, rng: random.Random) -> list[Partition]:
    """All partitions of s when there are at most count of them, otherwise count seeded random ones."""
    n, m = len(s.ant), len(s.suc)
    if 2 ** (n + m) <= count:
        return all_partitions(s)
    result = []
    for _ in range(count):
        result.append(Partition(tuple(rng.choice((1, 2)) for _ in range(n)),
                                tuple(rng.choice((1, 2)) for _ in range(m))))
    return result


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(description="Print seeded random checked derivations")
    parser.add_argument("--theory", default="G")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--count", type=int, default=1)
    parser.add_argument("--max-height", type=int, default=4)
    args = parser.parse_args(argv)

    generator = DerivationGenerator(load_theory(args.theory), args.seed, args.max_height)
    for k in range(args.count):
        if k:
            print()
        print(format_derivation(generator.generate()), end="")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
