import pytest

from app.core.geometric import builtin_theory
from app.core.kernel import check, height
from app.core.parser import parse_formula, parse_sequent
from app.core.printer import format_derivation
from app.core.search import Budget, Verdict, derivable, match_atoms, prove
from app.models.errors import ExitCode, ImpureSequent, NotFoundWithinBudget
from app.models.syntax import Var

SYMMETRY = parse_sequent("s = t => t = s")


def test_symmetry_of_identity(g_eq):
    d = prove(SYMMETRY, g_eq, Budget(max_depth=6))
    assert d.conclusion == SYMMETRY
    assert check(d, g_eq).ok
    assert height(d) == 2


def test_symmetry_needs_height_two(g_eq):
    with pytest.raises(NotFoundWithinBudget) as info:
        prove(SYMMETRY, g_eq, Budget(max_depth=1))
    assert info.value.exit_code == ExitCode.BUDGET_EXHAUSTED


def test_initial_sequent_axioms_do_not_derive_symmetry():
    assert derivable(SYMMETRY, builtin_theory("G_eq_axioms"), Budget(max_depth=8)) is Verdict.UNKNOWN


def test_initial_sequent_axioms_close_their_own_instances():
    axioms = builtin_theory("G_eq_axioms")
    d = prove(parse_sequent("s = t, P(s) => P(t)"), axioms, Budget(max_depth=2))
    assert d.tag.rule_id == "S2"
    assert prove(parse_sequent("=> s = s"), axioms, Budget(max_depth=1)).tag.rule_id == "S1"


def test_transitivity_chain(spo):
    d = prove(parse_sequent("a < b, b < c, c < d => a < d"), spo, Budget(max_depth=3))
    assert check(d, spo).ok
    assert height(d) == 2
    assert d.tag.rule_id == "Trans"


def test_irreflexivity(spo):
    d = prove(parse_sequent("a < b, b < a =>"), spo, Budget(max_depth=3))
    assert check(d, spo).ok


def test_table_row():
    theory = builtin_theory("TABLE:symmetric")
    d = prove(parse_sequent("R(a, b) => R(b, a)"), theory, Budget(max_depth=2))
    assert check(d, theory).ok


def test_propositional_and_quantifier_rules(g):
    d = prove(parse_sequent("=> P | !P"), g, Budget(max_depth=4))
    assert height(d) == 2
    d = prove(parse_sequent("forall x. P(x) => exists y. P(y)"), g, Budget(max_depth=4))
    assert check(d, g).ok
    assert height(d) == 2


def test_failure_is_unknown(g):
    assert derivable(parse_sequent("=> bot"), g, Budget(max_depth=4)) is Verdict.UNKNOWN
    assert derivable(parse_sequent("P(a) => P(b)"), builtin_theory("G_eq"), Budget(max_depth=3)) is Verdict.UNKNOWN


def test_impure_goal(g):
    with pytest.raises(ImpureSequent):
        prove(parse_sequent("P(x), forall x. Q(x) =>"), g)


def test_search_is_deterministic(g_eq):
    first = prove(SYMMETRY, g_eq, Budget(max_depth=6))
    second = prove(SYMMETRY, g_eq, Budget(max_depth=6))
    assert format_derivation(first) == format_derivation(second)


def test_budget():
    with pytest.raises(ValueError):
        Budget(max_depth=0)
    with pytest.raises(ValueError):
        Budget(max_term_witnesses=0)
    assert Budget.from_config(max_depth=3) == Budget(max_depth=3)
    assert Budget.from_config(max_depth=None).max_depth == 8


def test_match_atoms():
    patterns = (parse_formula("x < y"), parse_formula("y < z"))
    atoms = list(enumerate([parse_formula("a < b"), parse_formula("b < c"), parse_formula("c < c")]))
    matches = list(match_atoms(patterns, atoms, {"x", "y", "z"}))
    bindings = [(b["x"], b["y"], b["z"], used) for b, used in matches]
    assert (Var("a"), Var("b"), Var("c"), (0, 1)) in bindings
    assert (Var("b"), Var("c"), Var("c"), (1, 2)) in bindings
    assert all(len(set(used)) == 2 for _, _, _, used in bindings)
