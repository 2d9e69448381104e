import pytest

from app.core.parser import parse_formula, parse_sequent
from app.core.syntax import (
    Fresh, alpha_equal, bound_vars, conj, constants, disj, free_vars, instantiate, is_pure,
    lang_of, rel_of, subst_term, subst_vars, ter_of, var_names,
)
from app.models.errors import ArityError, CaptureError
from app.models.syntax import (
    BOTTOM, And, Atom, Const, Imp, Language, Not, Or, Sequent, Var,
)

P = Atom("P", ())
Q = Atom("Q", ())


def test_free_vars_skip_bound_occurrences():
    f = parse_formula("forall x. P(x, y) & Q(#a)")
    assert free_vars(f) == (Var("y"),)
    assert constants(f) == (Const("a"),)
    assert bound_vars(f) == {"x"}
    assert var_names(f) == {"x", "y"}


def test_terms_sort_variables_before_constants():
    s = parse_sequent("R(#b, z) => P(a), Q(#a)")
    assert ter_of(s) == (Var("a"), Var("z"), Const("a"), Const("b"))


def test_identity_is_not_a_predicate():
    f = parse_formula("s = t & P(s) -> s < t")
    assert rel_of(f) == (("<", 2), ("P", 1))
    assert lang_of(f) == Language((Var("s"), Var("t")), (("<", 2), ("P", 1)))


def test_language_rejects_identity():
    with pytest.raises(ValueError):
        Language((), (("=", 2),))


def test_language_subset_and_intersection():
    one = Language((Var("s"), Var("t")), (("P", 1),))
    two = Language((Var("t"),), (("P", 1), ("Q", 1)))
    assert not one.issubset(two)
    assert one.intersection(two) == Language((Var("t"),), (("P", 1),))
    assert one.intersection(two).issubset(one)
    assert one.union(two).to_dict() == {"terms": ["s", "t"], "predicates": ["P/1", "Q/1"]}


def test_simultaneous_substitution():
    f = parse_formula("P(x, y)")
    assert subst_vars(f, ["x", "y"], [Var("y"), Var("x")]) == parse_formula("P(y, x)")


def test_substitution_leaves_bound_occurrences():
    f = parse_formula("P(x) & (forall x. Q(x))")
    assert subst_vars(f, ["x"], [Const("a")]) == parse_formula("P(#a) & (forall x. Q(x))")


def test_substitution_never_captures():
    with pytest.raises(CaptureError):
        subst_vars(parse_formula("forall x. P(x, y)"), ["y"], [Var("x")])


def test_substitution_arity():
    with pytest.raises(ArityError):
        subst_vars(parse_formula("P(x)"), ["x", "y"], [Var("z")])


def test_subst_term_replaces_constants_in_sequents():
    s = parse_sequent("P(#a) => Q(#a, u)")
    assert subst_term(s, Const("a"), Var("w")) == parse_sequent("P(w) => Q(w, u)")


def test_instantiate():
    assert instantiate(parse_formula("exists y. R(x, y)"), Const("c")) == parse_formula("R(x, #c)")


def test_alpha_equality():
    assert alpha_equal(parse_formula("forall x. P(x)"), parse_formula("forall y. P(y)"))
    assert alpha_equal(parse_formula("exists x. forall y. R(x, y)"), parse_formula("exists u. forall v. R(u, v)"))
    assert not alpha_equal(parse_formula("forall x. P(x)"), parse_formula("forall y. P(x)"))
    assert not alpha_equal(parse_formula("forall x. P(x)"), parse_formula("exists x. P(x)"))
    assert not alpha_equal(parse_formula("forall x. forall y. R(x, y)"), parse_formula("forall x. forall y. R(y, x)"))


def test_conj_and_disj_fold_left():
    assert conj([P, Q, P]) == And(And(P, Q), P)
    assert disj([P]) == P
    assert disj([P, Q]) == Or(P, Q)
    with pytest.raises(ValueError):
        conj([])


def test_negation_is_implication_into_bot():
    assert Not(P) == Imp(P, BOTTOM)
    assert parse_formula("!P") == Not(P)


def test_purity():
    assert is_pure(parse_sequent("P(x) => forall y. Q(y)"))
    assert not is_pure(parse_sequent("P(x), forall x. Q(x) =>"))


def test_sequents_are_multisets():
    assert Sequent((P, Q), ()) == Sequent((Q, P), ())
    assert Sequent((P, P, Q), ()) != Sequent((P, Q), ())
    assert hash(Sequent((P, Q), (Q,))) == hash(Sequent((Q, P), (Q,)))


def test_fresh_skips_avoided_names():
    fresh = Fresh("_v", {"_v0", "_v2"})
    assert [fresh.name(), fresh.name(), fresh.name()] == ["_v1", "_v3", "_v4"]
    assert fresh.avoid_names(["_v5"]).var() == Var("_v6")
