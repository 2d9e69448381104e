import json
import logging
from pathlib import Path

import pytest

from app.core.geometric import builtin_theory
from app.core.kernel import check
from app.core.parser import parse_derivation, parse_sequent
from app.main import run
from app.services.selftest import GOLDEN_DIR
from app.utils.logger import Logger

THEORIES_DIR = Path(__file__).parent.parent / "app" / "theories"


def golden(name):
    return str(GOLDEN_DIR / name)


def test_check(capsys):
    assert run(["check", golden("repl.deriv"), "--theory", "G_eq"]) == 0
    assert capsys.readouterr().out == "ok\n"


def test_check_failure(capsys):
    assert run(["check", golden("repl.deriv"), "--theory", "G"]) == 1
    assert "Repl is not part of the theory" in capsys.readouterr().out


def test_prove_symmetry(capsys):
    assert run(["prove", "s=t => t=s", "--theory", "G_eq", "--depth", "6"]) == 0
    d = parse_derivation(capsys.readouterr().out)
    assert d.conclusion == parse_sequent("s = t => t = s")
    assert check(d, builtin_theory("G_eq")).ok


def test_prove_emit(tmp_path, capsys):
    target = tmp_path / "sym.deriv"
    assert run(["prove", "s = t => t = s", "--theory", "G_eq", "--emit", str(target)]) == 0
    assert "derivation written to" in capsys.readouterr().out
    assert check(parse_derivation(target.read_text(encoding="utf-8")), builtin_theory("G_eq")).ok


@pytest.mark.parametrize("argv, code", [
    (["prove", "=> bot", "--depth", "2"], 4),
    (["prove", "=> =>"], 3),
    (["prove", "s = t => t = s", "--theory", "G_eq_axioms", "--depth", "3"], 4),
    (["prove", "=> P", "--theory", "NoSuchTheory"], 1),
    (["frobnicate"], 3),
    (["check", "/no/such/file.deriv"], 1),
])
def test_exit_codes(argv, code, capsys):
    assert run(argv) == code


def test_help_exits_cleanly(capsys):
    assert run(["--help"]) == 0
    assert "interp" in capsys.readouterr().out


def test_interp_verify(capsys):
    argv = ["interp", golden("repl.deriv"), "--partition", "L:1,1;R:2", "--theory", "G_eq", "--verify"]
    assert run(argv) == 0
    assert capsys.readouterr().out == "P(t)\n"


def test_interp_identity_on_the_other_side(capsys):
    argv = ["interp", golden("repl_flipped.deriv"), "--partition", "L:1,2;R:2", "--theory", "G_eq", "--verify"]
    assert run(argv) == 0
    assert capsys.readouterr().out == "forall _z0. s = _z0 -> P(_z0)\n"


def test_interp_report(capsys):
    argv = ["interp", golden("trans.deriv"), "--partition", "L:1,2;R:2", "--theory", "SPO", "--verify", "--report"]
    assert run(argv) == 0
    first, rest = capsys.readouterr().out.split("\n", 1)
    assert first == "forall _z0. t < _z0 -> s < _z0"
    report = json.loads(rest)
    assert report["verified"] is True
    assert report["partition"] == "L:1,2;R:2"
    assert report["language"]["within_side_one"] and report["language"]["within_side_two"]
    assert report["trace"][0] == {"path": "root", "case": "Geo Trans case 3.3"}


def test_interp_conjunctive_form(capsys):
    argv = ["interp", golden("trans.deriv"), "--partition", "L:1,2;R:2", "--theory", "SPO",
            "--case33-form", "conjunctive"]
    assert run(argv) == 0
    assert capsys.readouterr().out == "s < t & top\n"


def test_interp_all_partitions(capsys):
    assert run(["interp", golden("footnote.deriv"), "--all-partitions", "--verify"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 16
    assert lines[0] == "L:1,1;R:1,1\tbot"
    assert run(["interp", golden("footnote.deriv"), "--all-partitions", "--cap", "5"]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 5


def test_interp_emit_witnesses(tmp_path, capsys):
    argv = ["interp", golden("repl.deriv"), "--partition", "L:2,1;R:2", "--theory", "G_eq",
            "--emit-witnesses", str(tmp_path / "out")]
    assert run(argv) == 0
    theory = builtin_theory("G_eq")
    for name in ("witness_one.deriv", "witness_two.deriv"):
        d = parse_derivation((tmp_path / "out" / name).read_text(encoding="utf-8"))
        assert check(d, theory).ok


@pytest.mark.parametrize("argv, code", [
    (["interp", golden("repl.deriv"), "--theory", "G_eq"], 3),
    (["interp", golden("repl.deriv"), "--partition", "L:1;R:2", "--theory", "G_eq"], 3),
    (["interp", golden("footnote.deriv"), "--partition", "L:1,2;R:1,2",
      "--theory", str(THEORIES_DIR / "two_preds.thy")], 2),
    (["interp", golden("repl.deriv"), "--partition", "L:1,1;R:2", "--theory", "G"], 1),
])
def test_interp_exit_codes(argv, code, capsys):
    assert run(argv) == code


def test_theory_compile(capsys):
    assert run(["theory", "compile", str(THEORIES_DIR / "spo.thy")]) == 0
    out = capsys.readouterr().out
    assert "theory spo" in out
    assert "Trans(x, y, z): x < y, y < z ==> x < z  [singular]" in out


def test_theory_compile_non_singular(capsys):
    assert run(["theory", "compile", str(THEORIES_DIR / "two_preds.thy")]) == 2
    out = capsys.readouterr().out
    assert "[NOT singular]" in out
    assert "(a) more than one non-logical predicate" in out


def test_theory_compile_malformed(tmp_path, capsys):
    bad = tmp_path / "bad.thy"
    bad.write_text("theory bad\npred R/2\naxiom a: forall x. (R(x, x) -> R(x, y))\n", encoding="utf-8")
    assert run(["theory", "compile", str(bad)]) == 3
    assert "line 3" in capsys.readouterr().err


def test_selftest(capsys):
    assert run(["selftest", "--seed", "3", "--random", "1"]) == 0
    out = capsys.readouterr().out
    assert out.rstrip().endswith("checks passed")
    assert "FAIL" not in out


class _Records(logging.Handler):
    def __init__(self):
        super().__init__(logging.DEBUG)
        self.records = []

    def emit(self, record):
        self.records.append(record)


def test_handled_errors_are_reported_once(capsys):
    records = _Records()
    logger = Logger().logger
    logger.addHandler(records)
    try:
        assert run(["prove", "=> bot", "--depth", "2"]) == 4
    finally:
        logger.removeHandler(records)
    assert capsys.readouterr().err.count("no derivation of => bot") == 1
    assert [r for r in records.records if r.levelno >= logging.WARNING] == []
    assert any("no derivation of => bot" in r.getMessage() and r.levelno == logging.DEBUG
               for r in records.records)
