"""
Partitions
==========

A partition assigns every formula occurrence of a sequent to side 1 or
side 2. The text form used by the CLI is `L:1,2,2;R:2`: one side number per
occurrence, left to right, antecedent after `L:` and succedent after `R:`.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Optional

from app.core.kernel import OriginKind, upward
from app.models.derivation import Derivation, Occ, RuleKind, Side
from app.models.errors import MalformedPartition
from app.models.syntax import Formula, Sequent
from app.models.theory import TheorySpec


@dataclass(frozen=True)
class Partition:
    ant: tuple[int, ...]
    suc: tuple[int, ...]

    def __post_init__(self):
        if any(side not in (1, 2) for side in self.ant + self.suc):
            raise MalformedPartition("sides are 1 or 2")

    @classmethod
    def parse(cls, text: str, s: Sequent) -> "Partition":
        sides = {"L": None, "R": None}
        for part in (p.strip() for p in text.strip().split(";")):
            if not part:
                continue
            key, sep, rest = part.partition(":")
            key = key.strip().upper()
            if not sep or key not in sides:
                raise MalformedPartition(f"expected L:<sides> or R:<sides>, got '{part}'")
            if sides[key] is not None:
                raise MalformedPartition(f"side list {key} given twice")
            try:
                sides[key] = tuple(int(x) for x in rest.split(",") if x.strip())
            except ValueError:
                raise MalformedPartition(f"not a side list: '{rest.strip()}'") from None
        partition = cls(sides["L"] or (), sides["R"] or ())
        partition.validate(s)
        return partition

    def validate(self, s: Sequent):
        if len(self.ant) != len(s.ant) or len(self.suc) != len(s.suc):
            raise MalformedPartition(
                f"partition {self} does not fit a sequent with {len(s.ant)} antecedent "
                f"and {len(s.suc)} succedent formulas")

    def side_of(self, occ: Occ) -> int:
        return (self.ant if occ.side is Side.LEFT else self.suc)[occ.index]

    def __str__(self):
        return f"L:{','.join(map(str, self.ant))};R:{','.join(map(str, self.suc))}"


def split(s: Sequent, p: Partition) -> tuple[Sequent, Sequent]:
    """(side 1, side 2) of s under p."""
    p.validate(s)
    one = Sequent(tuple(f for f, k in zip(s.ant, p.ant) if k == 1),
                  tuple(f for f, k in zip(s.suc, p.suc) if k == 1))
    two = Sequent(tuple(f for f, k in zip(s.ant, p.ant) if k == 2),
                  tuple(f for f, k in zip(s.suc, p.suc) if k == 2))
    return one, two


def all_partitions(s: Sequent, cap: Optional[int] = None) -> list[Partition]:
    """Every partition of s in binary counting order (side 1 before side 2), at most cap of them."""
    n, m = len(s.ant), len(s.suc)
    result = []
    for bits in product((1, 2), repeat=n + m):
        result.append(Partition(tuple(bits[:n]), tuple(bits[n:])))
        if cap is not None and len(result) >= cap:
            break
    return result


def _align(actual: tuple[Formula, ...], expected: tuple[Formula, ...], sides: list[int]) -> tuple[int, ...]:
    used = [False] * len(expected)
    result = []
    for f in actual:
        for i, g in enumerate(expected):
            if not used[i] and g == f:
                used[i] = True
                result.append(sides[i])
                break
        else:
            raise MalformedPartition("premise does not match its rule")
    return tuple(result)


def premise_partitions(node: Derivation, p: Partition, theory: Optional[TheorySpec] = None,
                       geo_side: Optional[int] = None) -> list[Partition]:
    """
    Partitions of the premises of node induced by p.

    Context formulas keep their side and components of a logical principal
    formula take its side. At a geometric node the principal atoms and the
    block atoms all go to `geo_side`.
    """
    is_geo = node.kind is RuleKind.GEO
    if is_geo and geo_side is None:
        raise MalformedPartition("a geometric node needs the side of its principal atoms")

    def side(origin) -> int:
        if origin.kind is OriginKind.BLOCK or (is_geo and origin.kind is OriginKind.PRINCIPAL):
            return geo_side
        return p.side_of(origin.occ)

    result = []
    for expected, premise in zip(upward(node, theory), node.premises):
        ant_sides = [side(o) for o in expected.ant_origins]
        suc_sides = [side(o) for o in expected.suc_origins]
        actual = premise.conclusion
        result.append(Partition(_align(actual.ant, expected.sequent.ant, ant_sides),
                                _align(actual.suc, expected.sequent.suc, suc_sides)))
    return result
