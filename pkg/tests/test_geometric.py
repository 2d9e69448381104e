from pathlib import Path

import pytest

from app.core.geometric import (
    axiom_from_formula, builtin_theory, compile_axiom, instantiate_rule, is_singular, load_theory,
    relational_table, replacement_atom, theory_from_source,
)
from app.core.parser import parse_formula, parse_sequent, parse_theory
from app.core.kernel import check
from app.core.search import Budget, prove
from app.core.syntax import Fresh, bound_vars
from app.models.errors import ExitCode, MalformedAxiom, MalformedDerivation, UnknownTheory
from app.models.syntax import BOTTOM, Atom, Forall, Sequent, Var

THEORIES_DIR = Path(__file__).parent.parent / "app" / "theories"

TABLE_ROWS = (
    "irreflexive", "transitive", "intransitive", "co_transitive", "symmetric", "asymmetric",
    "anti_symmetric", "euclidean", "left_unique", "right_unique", "connected", "nilpotent",
    "left_ideal", "right_ideal", "rectangular", "dense", "confluent",
)


def rule(name, text, predicates=None):
    return compile_axiom(axiom_from_formula(name, parse_formula(text), predicates))


def test_relational_table_is_singular():
    rules = relational_table()
    assert tuple(r.rule_id for r in rules) == TABLE_ROWS
    for r in rules:
        assert r.singular, f"{r.rule_id}: {r.diagnostics}"
    assert builtin_theory("TABLE").singular


@pytest.mark.parametrize("row", TABLE_ROWS)
def test_table_rows_load_one_by_one(row):
    theory = builtin_theory(f"TABLE:{row}")
    assert theory.rule_ids == ("Ref", "Repl", row)


def test_two_predicates_are_not_singular(two_preds):
    assert not two_preds.singular
    (r,) = two_preds.rules
    assert [d[:3] for d in r.diagnostics] == ["(a)", "(b)"]


def test_compiled_shapes():
    dense = rule("dense", "forall x. forall y. (R(x, y) -> exists z. R(x, z) & R(z, y))")
    assert dense.universals == ("x", "y")
    assert dense.principal == (Atom("R", (Var("x"), Var("y"))),)
    assert dense.existentials == ("z",)

    co = rule("co", "forall x. forall y. forall z. (R(x, y) -> R(x, z) | R(z, y))")
    assert len(co.blocks) == 2

    irref = rule("irref", "forall x. !R(x, x)")
    assert [b.atoms for b in irref.blocks] == [(BOTTOM,)]

    serial = rule("serial", "forall x. exists y. R(x, y)")
    assert serial.principal == ()
    assert not serial.singular


def test_unused_universals_are_dropped():
    r = rule("left_ideal", "forall x. forall y. forall z. (R(x, y) -> R(x, z))")
    assert r.universals == ("x", "y", "z")
    r = rule("vacuous", "forall x. forall w. (R(x, x) -> bot)")
    assert r.universals == ("x",)


def test_singularity_conditions():
    ok, diagnostics = is_singular(rule("anti", "forall x. forall y. (R(x, y) & R(y, x) -> x = y)"))
    assert ok and diagnostics == ()
    ok, diagnostics = is_singular(rule("mixed", "forall x. forall y. (R(x, y) -> S(x, y) | x = y)"))
    assert not ok
    assert len(diagnostics) == 2


@pytest.mark.parametrize("text", [
    "forall x. (P(x) | Q(x) -> R(x, x))",
    "forall x. (R(x, x) -> R(x, y))",
    "forall x. (R(x, x) -> exists x. R(x, x))",
    "forall x. (R(x, x) -> (R(x, x) -> R(x, x)))",
    "forall x. (R(x, #a) -> bot)",
])
def test_malformed_axioms(text):
    with pytest.raises(MalformedAxiom) as info:
        rule("bad", text)
    assert info.value.exit_code == ExitCode.PARSE_ERROR


def test_undeclared_predicate():
    with pytest.raises(MalformedAxiom):
        rule("sym", "forall x. forall y. (S(x, y) -> S(y, x))", predicates=[("R", 2)])
    assert rule("sym", "forall x. forall y. (R(x, y) -> R(y, x))", predicates=[("R", 2)]).singular


def test_instantiate_rule_adds_missing_principal_atoms(spo):
    ctx = parse_sequent("s < t => s < u")
    inst = instantiate_rule(spo.rule("Trans"), {"x": Var("s"), "y": Var("t"), "z": Var("u")}, ctx, Fresh())
    assert inst.conclusion == parse_sequent("t < u, s < t => s < u")
    assert inst.premises == (parse_sequent("s < u, t < u, s < t => s < u"),)
    assert inst.eigens == ()


def test_instantiate_rule_draws_fresh_eigenvariables():
    dense = builtin_theory("TABLE:dense").rule("dense")
    ctx = parse_sequent("R(a, b), P(_v0) =>")
    inst = instantiate_rule(dense, {"x": Var("a"), "y": Var("b")}, ctx, Fresh("_v"))
    assert inst.eigens == ("_v1",)
    assert inst.premises == (parse_sequent("R(a, _v1), R(_v1, b), R(a, b), P(_v0) =>"),)


def test_replacement_atom():
    s, t = Var("s"), Var("t")
    atom = Atom("R", (s, s))
    assert replacement_atom(atom, s, t, (1,)) == Atom("R", (s, t))
    assert replacement_atom(atom, s, t, (0, 1)) == Atom("R", (t, t))
    assert replacement_atom(atom, s, t, ()) == atom
    with pytest.raises(MalformedDerivation):
        replacement_atom(Atom("R", (t, s)), s, t, (0,))
    with pytest.raises(MalformedDerivation):
        replacement_atom(atom, s, t, (1, 0))


def test_theory_files_match_builtins(spo):
    from_file = load_theory(str(THEORIES_DIR / "spo.thy"))
    assert from_file.rule_ids == spo.rule_ids
    assert from_file.predicates == spo.predicates
    assert from_file.singular


def test_duplicate_rule_ids():
    with pytest.raises(MalformedAxiom):
        theory_from_source(parse_theory("theory twice\ninclude G_eq\naxiom Ref: forall x. x = x\n"))


def test_unknown_theory():
    with pytest.raises(UnknownTheory):
        load_theory("NoSuchTheory")
    with pytest.raises(UnknownTheory):
        builtin_theory("TABLE:no_such_row")


def test_initial_sequent_theory():
    axioms = builtin_theory("G_eq_axioms")
    assert axioms.rules == ()
    assert axioms.initial == ("S1", "S2")


def _matrix(f):
    while isinstance(f, Forall):
        f = f.body
    return f


TABLE_MATRICES = {
    ax.name: _matrix(ax.formula)
    for ax in parse_theory((THEORIES_DIR / "relational_table.thy").read_text(encoding="utf-8")).axioms
}
QUANTIFIER_FREE_ROWS = [name for name, f in TABLE_MATRICES.items() if not bound_vars(f)]


def test_quantifier_free_rows():
    assert len(QUANTIFIER_FREE_ROWS) == 15
    assert "dense" not in QUANTIFIER_FREE_ROWS and "confluent" not in QUANTIFIER_FREE_ROWS


@pytest.mark.parametrize("row", QUANTIFIER_FREE_ROWS)
def test_compiled_rule_derives_its_axiom(row):
    theory = builtin_theory(f"TABLE:{row}")
    goal = Sequent((), (TABLE_MATRICES[row],))
    d = prove(goal, theory, Budget(max_depth=5))
    assert d.conclusion == goal
    assert check(d, theory).ok
    assert any(node.tag.rule_id == row for _, node in d.walk())
