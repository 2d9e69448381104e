import pytest

from app.core.parser import parse_derivation, parse_sequent
from app.core.partition import Partition, all_partitions, premise_partitions, split
from app.models.derivation import L, R
from app.models.errors import MalformedPartition

S = parse_sequent("A, B => C")


def test_parse_and_print():
    p = Partition.parse("L:1,2;R:2", S)
    assert p == Partition((1, 2), (2,))
    assert str(p) == "L:1,2;R:2"
    assert p.side_of(L(1)) == 2
    assert p.side_of(R(0)) == 2


def test_parse_tolerates_spaces_and_missing_sides():
    assert Partition.parse(" R: 1 , 2 ", parse_sequent("=> A, B")) == Partition((), (1, 2))
    assert Partition.parse("l:2; r:1", parse_sequent("A => B")) == Partition((2,), (1,))


@pytest.mark.parametrize("text", ["L:1,2;R:", "L:1,3;R:1", "L:1,2;X:1", "L:1,2;L:1,2;R:1", "L:1,two;R:1", "L1,2;R:1"])
def test_malformed(text):
    with pytest.raises(MalformedPartition):
        Partition.parse(text, S)


def test_split():
    one, two = split(S, Partition((1, 2), (2,)))
    assert one == parse_sequent("A =>")
    assert two == parse_sequent("B => C")


def test_all_partitions():
    ps = all_partitions(S)
    assert len(ps) == 8
    assert ps[0] == Partition((1, 1), (1,))
    assert ps[1] == Partition((1, 1), (2,))
    assert ps[-1] == Partition((2, 2), (2,))
    assert len(all_partitions(S, cap=3)) == 3
    assert all_partitions(parse_sequent("=>")) == [Partition((), ())]


def test_logical_premises_inherit_sides():
    d = parse_derivation("RImp @R0 |- Q => P -> P\n  InitAtom @L0,R0 |- P, Q => P\n")
    (q,) = premise_partitions(d, Partition((1,), (2,)))
    assert q == Partition((2, 1), (2,))


def test_geometric_premises_take_the_geometric_side(spo, golden_text):
    d = parse_derivation(golden_text("trans.deriv"))
    p = Partition.parse("L:1,2;R:2", d.conclusion)
    (q,) = premise_partitions(d, p, spo, geo_side=1)
    assert q == Partition((1, 1, 1), (2,))
    with pytest.raises(MalformedPartition):
        premise_partitions(d, p, spo)
