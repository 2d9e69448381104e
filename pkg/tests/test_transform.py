import pytest
from hypothesis import given, reject, settings
from hypothesis import strategies as st

from app.core.build import init_atom
from app.core.geometric import builtin_theory
from app.core.kernel import check, formula_at, height
from app.core.parser import parse_derivation, parse_formula, parse_sequent
from app.core.syntax import Fresh, ter_of
from app.core.transform import (
    axiom_expansion, contract, derivation_names, invert, subst_derivation, weaken, weaken_all,
)
from app.models.derivation import RuleKind, Side
from app.models.errors import ContractionBlocked, MissingOccurrence
from app.models.syntax import Atom, Const, Sequent, Var
from app.tools.random_derivations import DerivationGenerator

from tests.samples import DENSE, GENERALISE

P = Atom("P", ())
seeds = st.integers(min_value=0, max_value=2 ** 16)


def test_weaken_renames_clashing_eigenvariables(g):
    d = parse_derivation(GENERALISE)
    w = weaken(d, parse_formula("Q(z)"), Side.LEFT)
    assert w.conclusion == parse_sequent("forall x. P(x), Q(z) => forall y. P(y)")
    assert w.tag.eigen != "z"
    assert check(w, g).ok
    assert height(w) == height(d)


def test_weaken_all(g):
    d = init_atom(P)
    w = weaken_all(d, [parse_formula("Q"), parse_formula("R(u)")], Side.RIGHT)
    assert w.conclusion == parse_sequent("P => P, Q, R(u)")
    assert check(w, g).ok


def test_contract_leaf(g):
    d = init_atom(P, (P,))
    c = contract(d, P, Side.LEFT)
    assert c.conclusion == parse_sequent("P => P")
    assert check(c, g).ok


def test_contract_through_invertible_rule(g):
    a = parse_formula("P & Q")
    d = weaken(axiom_expansion(a), a, Side.LEFT)
    c = contract(d, a, Side.LEFT)
    assert c.conclusion == Sequent((a,), (a,))
    assert check(c, g).ok
    assert height(c) <= height(d)


def test_contract_needs_two_copies():
    with pytest.raises(MissingOccurrence):
        contract(init_atom(P), P, Side.LEFT)


def test_contract_blocked_by_one_rule_instance(spo):
    d = parse_derivation(
        "Geo @L0,L1 [Trans; x:=s, y:=s, z:=s] |- s < s, s < s => s < s\n"
        "  InitAtom @L0,R0 |- s < s, s < s, s < s => s < s\n"
    )
    assert check(d, spo).ok
    with pytest.raises(ContractionBlocked):
        contract(d, parse_formula("s < s"), Side.LEFT)


def test_invert_right_conjunction(g):
    a = parse_formula("P & Q")
    d = axiom_expansion(a)
    left, right = invert(d, Side.RIGHT, a)
    assert left.conclusion == parse_sequent("P & Q => P")
    assert right.conclusion == parse_sequent("P & Q => Q")
    for inverted in (left, right):
        assert check(inverted, g).ok
        assert height(inverted) <= height(d)


def test_invert_universal_with_given_variable(g):
    d = parse_derivation(GENERALISE)
    (inverted,) = invert(d, Side.RIGHT, parse_formula("forall y. P(y)"), var="w")
    assert inverted.conclusion == parse_sequent("forall x. P(x) => P(w)")
    assert check(inverted, g).ok


@pytest.mark.parametrize("text", [
    "P(u) & Q(u, #a)", "P | !P", "forall x. exists y. R(x, y)", "(exists x. P(x)) -> top", "bot -> bot",
])
def test_axiom_expansion(g, text):
    a = parse_formula(text)
    d = axiom_expansion(a, ant=(parse_formula("Q"),))
    assert d.conclusion == Sequent((a, parse_formula("Q")), (a,))
    assert check(d, g).ok


def test_subst_constant(spo, golden_text):
    d = parse_derivation(golden_text("trans.deriv"))
    s = subst_derivation(d, Var("s"), Const("c"))
    assert s.conclusion == parse_sequent("#c < t, t < u => #c < u")
    assert s.tag.inst_map["x"] == Const("c")
    assert check(s, spo).ok
    assert height(s) == height(d)


def test_subst_renames_eigenvariables():
    dense = builtin_theory("TABLE:dense")
    d = parse_derivation(DENSE)
    s = subst_derivation(d, Var("a"), Var("w"))
    assert s.conclusion == parse_sequent("R(w, b) => exists v. R(w, v) & R(v, b)")
    assert s.tag.eigens != ("w",)
    assert check(s, dense).ok
    assert height(s) == height(d)


def test_subst_absent_term_is_identity(g):
    d = parse_derivation(GENERALISE)
    assert subst_derivation(d, Var("q"), Var("r")) is d


@pytest.mark.parametrize("theory_name", ["G", "G_eq", "SPO"])
@given(seed=seeds)
@settings(max_examples=200, deadline=None)
def test_weaken_preserves_height(theory_name, seed):
    theory = builtin_theory(theory_name)
    gen = DerivationGenerator(theory, seed, max_height=5)
    d = gen.generate()
    side = Side.LEFT if seed % 2 else Side.RIGHT
    w = weaken(d, gen.formula(2), side, Fresh("_v", derivation_names(d)))
    assert height(w) == height(d)
    assert check(w, theory).ok


@pytest.mark.parametrize("theory_name", ["G", "G_eq", "SPO"])
@given(seed=seeds)
@settings(max_examples=200, deadline=None)
def test_subst_preserves_height(theory_name, seed):
    theory = builtin_theory(theory_name)
    gen = DerivationGenerator(theory, seed, max_height=5)
    d = gen.generate()
    terms = [t for t in (Var("u"), Var("v"), Const("a"), Const("b")) if t in ter_of(d.conclusion)]
    if not terms:
        return
    s = subst_derivation(d, terms[0], gen.term())
    assert height(s) == height(d)
    assert check(s, theory).ok


@pytest.mark.parametrize("theory_name", ["G", "G_eq"])
@given(seed=seeds)
@settings(max_examples=200, deadline=None)
def test_contract_never_grows(theory_name, seed):
    theory = builtin_theory(theory_name)
    d = DerivationGenerator(theory, seed, max_height=5).generate()
    side = Side.LEFT if d.conclusion.ant else Side.RIGHT
    formulas = d.conclusion.ant if side is Side.LEFT else d.conclusion.suc
    a = formulas[seed % len(formulas)]
    c = contract(weaken(d, a, side), a, side)
    assert c.conclusion == d.conclusion
    assert height(c) <= height(d)
    assert check(c, theory).ok


@pytest.mark.parametrize("theory_name", ["G", "G_eq", "SPO"])
@given(seed=seeds)
@settings(max_examples=200, deadline=None)
def test_contract_copy_of_principal_formula(theory_name, seed):
    # a duplicates the formula the last rule acts on
    theory = builtin_theory(theory_name)
    d = DerivationGenerator(theory, seed, max_height=5).generate()
    if not d.principal:
        reject()
    occ = d.principal[seed % len(d.principal)]
    a = formula_at(d.conclusion, occ)
    w = weaken(d, a, occ.side)
    try:
        c = contract(w, a, occ.side)
    except ContractionBlocked:
        reject()
    assert c.conclusion == d.conclusion
    assert height(c) <= height(w)
    assert check(c, theory).ok


def test_contract_principal_copy_of_invertible_rule(g):
    a = parse_formula("P & Q -> R")
    d = axiom_expansion(a)
    assert d.kind is RuleKind.R_IMP
    c = contract(weaken(d, a, Side.RIGHT), a, Side.RIGHT)
    assert c.conclusion == d.conclusion
    assert height(c) <= height(d)
    assert check(c, g).ok
