import random

import pytest

from app.core.geometric import builtin_theory
from app.core.interpolate import Interpolator
from app.core.maehara import maehara_interpolant
from app.core.parser import parse_derivation, parse_formula
from app.core.partition import Partition, all_partitions
from app.core.printer import format_formula
from app.models.errors import MalformedDerivation
from app.tools.random_derivations import DerivationGenerator, sample_partitions

from tests.samples import GENERALISE


def test_single_leaf_table():
    d = parse_derivation("InitAtom @L0,R0 |- P => P\n")
    table = {
        "L:1;R:1": "bot",
        "L:2;R:2": "top",
        "L:1;R:2": "P",
        "L:2;R:1": "!P",
    }
    for text, expected in table.items():
        assert maehara_interpolant(d, Partition.parse(text, d.conclusion)) == parse_formula(expected)


def test_quantifier_closure():
    d = parse_derivation(GENERALISE)
    # the LForall witness z only occurs on side 2
    c = maehara_interpolant(d, Partition.parse("L:1;R:2", d.conclusion))
    assert format_formula(c) == "forall _z0. P(_z0)"


def test_geometric_nodes_are_out_of_scope(golden_text):
    d = parse_derivation(golden_text("repl.deriv"))
    with pytest.raises(MalformedDerivation):
        maehara_interpolant(d, Partition.parse("L:1,1;R:2", d.conclusion))


def test_agrees_with_extraction_on_pure_derivations(g):
    generator = DerivationGenerator(g, seed=7, max_height=5)
    rng = random.Random(7)
    interpolator = Interpolator(g)
    compared = 0
    for _ in range(100):
        d = generator.generate()
        for p in sample_partitions(d.conclusion, 16, rng):
            expected = maehara_interpolant(d, p)
            assert interpolator.interpolate(d, p).interpolant == expected, f"{p}: {format_formula(expected)}"
            compared += 1
    assert compared >= 100


def test_agrees_on_hand_written_derivation(g):
    d = parse_derivation(GENERALISE)
    for p in all_partitions(d.conclusion):
        assert Interpolator(g).interpolate(d, p).interpolant == maehara_interpolant(d, p)
