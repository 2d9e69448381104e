# app/services/selftest.py

"""
Selftest Service
================

This module runs the built-in checks behind `singint selftest`:
1. Golden interpolants from app/golden (derivation, theory, partition,
   expected formula), each result verified
2. The symmetry of identity found by search over G_eq
3. The negative regression: no derivation of the same sequent when the
   identity axioms are initial sequents
4. A seeded random smoke test of extraction over G, G_eq and SPO

Key Components:
- CaseResult: outcome of one named check
- SelftestReport: all outcomes, with a printable summary
- Selftest: the runner, configured from the `selftest` section
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import yaml

from app.core.geometric import load_theory
from app.core.interpolate import Interpolator, verify
from app.core.parser import parse_derivation, parse_formula, parse_sequent
from app.core.partition import Partition
from app.core.printer import format_formula, format_sequent
from app.core.search import Budget, Verdict, derivable, prove
from app.core.syntax import alpha_equal
from app.models.errors import ProofError
from app.tools.random_derivations import DerivationGenerator, sample_partitions
from app.utils.config import Config
from app.utils.logger import Logger

GOLDEN_DIR = Path(__file__).parent.parent / "golden"
SYMMETRY = "s = t => t = s"
RANDOM_THEORIES = ("G", "G_eq", "SPO")


@dataclass(frozen=True)
class CaseResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class SelftestReport:
    cases: list[CaseResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.cases)

    def summary(self) -> str:
        lines = []
        for c in self.cases:
            status = "ok" if c.passed else "FAIL"
            lines.append(f"{status:4} {c.name}" + (f": {c.detail}" if c.detail else ""))
        passed = sum(c.passed for c in self.cases)
        lines.append(f"{passed}/{len(self.cases)} checks passed")
        return "\n".join(lines) + "\n"


def load_golden(directory: Path = GOLDEN_DIR) -> dict:
    with open(directory / "expected.yaml", 'r', encoding='utf-8') as file:
        return yaml.safe_load(file)


class Selftest:
    def __init__(self, seed: Optional[int] = None, random_derivations: Optional[int] = None,
                 max_height: Optional[int] = None, golden_dir: Path = GOLDEN_DIR):
        config = Config()
        self.logger = Logger()
        self.seed = seed if seed is not None else config.get("selftest", "seed", 0)
        self.random_derivations = (random_derivations if random_derivations is not None
                                   else config.get("selftest", "random_derivations", 25))
        self.max_height = max_height if max_height is not None else config.get("selftest", "max_height", 4)
        self.partition_cap = config.get("interpolation", "partition_cap", 64)
        self.golden_dir = golden_dir

    def run(self) -> SelftestReport:
        report = SelftestReport()
        report.cases.extend(self.golden_cases())
        report.cases.append(self.symmetry_case())
        report.cases.append(self.negative_regression_case())
        report.cases.extend(self.random_cases())
        self.logger.info(f"Selftest: {sum(c.passed for c in report.cases)}/{len(report.cases)} checks passed")
        return report

    def golden_case(self, name: str, entry: dict) -> CaseResult:
        try:
            text = (self.golden_dir / entry["derivation"]).read_text(encoding='utf-8')
            d = parse_derivation(text)
            theory = load_theory(entry["theory"])
            p = Partition.parse(entry["partition"], d.conclusion)
            result = Interpolator(theory).interpolate(d, p)
            self.logger.log_interpolation(format_sequent(d.conclusion), str(p), result)
            checked = verify(result, d.conclusion, p, theory)
        except ProofError as e:
            return CaseResult(f"golden {name}", False, str(e))
        if not checked.ok:
            return CaseResult(f"golden {name}", False, f"verification failed: {checked}")
        expected = parse_formula(entry["interpolant"])
        if not alpha_equal(expected, result.interpolant):
            return CaseResult(f"golden {name}", False,
                              f"expected {format_formula(expected)}, got {format_formula(result.interpolant)}")
        return CaseResult(f"golden {name}", True, format_formula(result.interpolant))

    def golden_cases(self) -> list[CaseResult]:
        return [self.golden_case(name, entry) for name, entry in load_golden(self.golden_dir).items()]

    def symmetry_case(self) -> CaseResult:
        goal = parse_sequent(SYMMETRY)
        try:
            d = prove(goal, load_theory("G_eq"), Budget.from_config(max_depth=6))
        except ProofError as e:
            return CaseResult("symmetry of identity", False, str(e))
        return CaseResult("symmetry of identity", True, f"derived over G_eq, root {d.tag.rule_id}")

    def negative_regression_case(self) -> CaseResult:
        verdict = derivable(parse_sequent(SYMMETRY), load_theory("G_eq_axioms"), Budget.from_config(max_depth=8))
        return CaseResult("no symmetry from initial sequents", verdict is Verdict.UNKNOWN, verdict.value)

    def random_cases(self) -> list[CaseResult]:
        results = []
        for offset, name in enumerate(RANDOM_THEORIES):
            theory = load_theory(name)
            generator = DerivationGenerator(theory, self.seed + offset, self.max_height)
            rng = random.Random(self.seed + offset)
            interpolator = Interpolator(theory)
            extractions, failures = 0, []
            for _ in range(self.random_derivations):
                d = generator.generate()
                for p in sample_partitions(d.conclusion, self.partition_cap, rng):
                    extractions += 1
                    try:
                        checked = verify(interpolator.interpolate(d, p), d.conclusion, p, theory)
                    except ProofError as e:
                        failures.append(f"{format_sequent(d.conclusion)} [{p}]: {e}")
                        continue
                    if not checked.ok:
                        failures.append(f"{format_sequent(d.conclusion)} [{p}]: {checked}")
            for failure in failures:
                self.logger.error(f"Selftest random {name}: {failure}", exc_info=False)
            detail = f"{extractions - len(failures)}/{extractions} extractions verified"
            results.append(CaseResult(f"random {name}", not failures, detail))
        return results
