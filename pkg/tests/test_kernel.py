import pytest

from app.core.geometric import builtin_theory
from app.core.kernel import check, height, upward
from app.core.parser import parse_derivation, parse_sequent
from app.models.derivation import RuleKind

from tests.samples import DENSE, GENERALISE


def reasons(report):
    return [v.reason for v in report.violations]


@pytest.mark.parametrize("name, theory", [
    ("ref.deriv", "G_eq"), ("repl.deriv", "G_eq"), ("repl_shared.deriv", "G_eq"), ("repl_flipped.deriv", "G_eq"),
    ("irref.deriv", "SPO"), ("trans.deriv", "SPO"), ("footnote.deriv", "G"),
])
def test_golden_derivations_check(golden_text, name, theory):
    report = check(parse_derivation(golden_text(name)), builtin_theory(theory))
    assert report.ok, str(report)


def test_quantifier_rules(g):
    d = parse_derivation(GENERALISE)
    assert check(d, g).ok
    assert height(d) == 2


def test_existential_geometric_rule():
    d = parse_derivation(DENSE)
    assert check(d, builtin_theory("TABLE:dense")).ok
    assert height(d) == 3


def test_eigenvariable_free_in_conclusion(g):
    d = parse_derivation(
        "RForall @R0 [x] |- P(x) => forall y. P(y)\n"
        "  InitAtom @L0,R0 |- P(x) => P(x)\n"
    )
    report = check(d, g)
    assert not report.ok
    assert any("eigenvariable x occurs free" in r for r in reasons(report))


def test_geometric_eigenvariable_free_in_conclusion():
    d = parse_derivation(DENSE.replace("R(a, b) =>", "R(a, b), R(w, w) =>", 1))
    report = check(d, builtin_theory("TABLE:dense"))
    assert any("eigenvariable w occurs free" in r for r in reasons(report))


def test_premise_mismatch_is_reported_at_the_premise(g):
    d = parse_derivation("RImp @R0 |- => P -> Q\n  InitAtom @L0,R0 |- P => P\n")
    report = check(d, g)
    assert [v.path for v in report.violations] == ["root.0"]


def test_premise_count(g):
    report = check(parse_derivation("RImp @R0 |- => P -> P\n"), g)
    assert reasons(report) == ["RImp needs 1 premises, found 0"]


@pytest.mark.parametrize("text", [
    "InitBot @L3 |- bot =>\n",
    "InitAtom @L0,R0 |- P => Q\n",
    "InitTop @L0 |- top => top\n",
    "LAnd @L0 |- P | Q =>\n  InitBot @L0 |- bot =>\n",
])
def test_malformed_nodes_never_raise(g, text):
    assert not check(parse_derivation(text), g).ok


def test_geometric_rule_must_belong_to_the_theory(golden_text, g):
    report = check(parse_derivation(golden_text("repl.deriv")), g)
    assert any("Repl is not part of the theory" in r for r in reasons(report))


def test_geometric_principal_atoms_must_match(spo):
    d = parse_derivation(
        "Geo @L0,L1 [Trans; x:=s, y:=u, z:=t] |- s < t, t < u => s < u\n"
        "  InitAtom @L0,R0 |- s < t, s < t, t < u => s < u\n"
    )
    assert not check(d, spo).ok


def test_pure_variable_condition(g):
    d = parse_derivation(
        "LForall @L0 [x] |- forall x. P(x) => P(x)\n"
        "  InitAtom @L0,R0 |- P(x), forall x. P(x) => P(x)\n"
    )
    report = check(d, g)
    assert reasons(report) == ["variables both bound and free: x"]


def test_shared_eigenvariables(g):
    d = parse_derivation(
        "RAnd @R0 |- => (forall x. P(x) -> P(x)) & (forall y. Q(y) -> Q(y))\n"
        "  RForall @R0 [e] |- => forall x. P(x) -> P(x)\n"
        "    RImp @R0 |- => P(e) -> P(e)\n"
        "      InitAtom @L0,R0 |- P(e) => P(e)\n"
        "  RForall @R0 [e] |- => forall y. Q(y) -> Q(y)\n"
        "    RImp @R0 |- => Q(e) -> Q(e)\n"
        "      InitAtom @L0,R0 |- Q(e) => Q(e)\n"
    )
    report = check(d, g)
    assert any("eigenvariable e already used" in r for r in reasons(report))


def test_initial_sequent_axioms():
    axioms = builtin_theory("G_eq_axioms")
    s1 = parse_derivation("Axiom @R0 [S1] |- P => s = s\n")
    s2 = parse_derivation("Axiom @L0,L1,R0 [S2; pos 1] |- s = t, R(s, s) => R(s, t)\n")
    assert check(s1, axioms).ok
    assert check(s2, axioms).ok
    assert not check(s1, builtin_theory("G_eq")).ok
    bad = parse_derivation("Axiom @L0,L1,R0 [S2; pos 0] |- s = t, R(s, s) => R(s, t)\n")
    assert not check(bad, axioms).ok


def test_upward_labels_block_atoms(spo, golden_text):
    d = parse_derivation(golden_text("trans.deriv"))
    (premise,) = upward(d, spo)
    assert premise.sequent == parse_sequent("s < u, s < t, t < u => s < u")
    assert [o.kind.value for o in premise.ant_origins] == ["block", "principal", "principal"]


def test_leaf_height(g):
    d = parse_derivation("InitTop @R0 |- => top\n")
    assert d.kind is RuleKind.INIT_TOP
    assert height(d) == 0
