"""
singint command line
====================

Subcommands:
1. check <derivation-file> --theory T: kernel check, exit 0 or 1
2. prove "<sequent>" --theory T --depth N [--emit FILE]: bounded search
3. interp <derivation-file> --partition SIDES --theory T [--verify]
   [--emit-witnesses DIR] [--all-partitions] [--report]: split interpolants
4. theory compile <axioms-file>: compile and report singularity, exit 2
   when a rule is not singular
5. selftest [--seed N]: golden examples, search regressions, random smoke test

Exit codes: 0 ok, 1 check or verify failure, 2 non-singular theory,
3 parse error, 4 search budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

import jsonschema

from app.core.geometric import load_theory, theory_from_source
from app.core.interpolate import InterpolationResult, Interpolator, verify
from app.core.kernel import check
from app.core.parser import parse_derivation, parse_sequent, parse_theory
from app.core.partition import Partition, all_partitions
from app.core.printer import format_derivation, format_formula, format_rule, format_sequent
from app.core.search import Budget, prove
from app.models.derivation import Derivation
from app.models.errors import ExitCode, ProofError
from app.services.selftest import Selftest
from app.utils.config import Config
from app.utils.logger import Logger

SCHEMA_DIR = Path(__file__).parent.parent / "schemas"


def _read(path: str) -> str:
    with open(path, 'r', encoding='utf-8') as file:
        return file.read()


def _write(path: Path, text: str):
    with open(path, 'w', encoding='utf-8') as file:
        file.write(text)


def report_schema() -> dict:
    with open(SCHEMA_DIR / "report_schema.json", 'r', encoding='utf-8') as file:
        return json.load(file)["schema"]


def build_report(d: Derivation, p: Partition, result: InterpolationResult, verified: Optional[bool]) -> dict:
    """The --report document; validated against schemas/report_schema.json."""
    report = {
        "conclusion": format_sequent(d.conclusion),
        "partition": str(p),
        "interpolant": format_formula(result.interpolant),
        "language": result.report.to_dict(),
        "trace": [{"path": path, "case": case} for path, case in result.trace],
        "verified": verified,
    }
    jsonschema.validate(report, report_schema())
    return report


def cmd_check(args) -> int:
    d = parse_derivation(_read(args.derivation))
    report = check(d, load_theory(args.theory))
    print(report)
    return ExitCode.OK if report.ok else ExitCode.FAILURE


def cmd_prove(args) -> int:
    goal = parse_sequent(args.sequent)
    d = prove(goal, load_theory(args.theory), Budget.from_config(max_depth=args.depth))
    text = format_derivation(d)
    if args.emit:
        _write(Path(args.emit), text)
        print(f"derivation written to {args.emit}")
    else:
        print(text, end="")
    return ExitCode.OK


def _interpolate_one(args, d: Derivation, p: Partition, interpolator: Interpolator, suffix: str = "") -> int:
    logger = Logger()
    result = interpolator.interpolate(d, p)
    logger.log_interpolation(format_sequent(d.conclusion), str(p), result)
    print(f"{p}\t{format_formula(result.interpolant)}" if args.all_partitions else format_formula(result.interpolant))

    verified = None
    if args.verify:
        checked = verify(result, d.conclusion, p, interpolator.theory)
        verified = checked.ok
        if not checked.ok:
            print(f"verification failed for {p}:\n{checked}", file=sys.stderr)
    if args.emit_witnesses:
        out = Path(args.emit_witnesses)
        out.mkdir(parents=True, exist_ok=True)
        _write(out / f"witness_one{suffix}.deriv", format_derivation(result.witness_one))
        _write(out / f"witness_two{suffix}.deriv", format_derivation(result.witness_two))
    if args.report:
        print(json.dumps(build_report(d, p, result, verified), indent=2))
    return ExitCode.FAILURE if verified is False else ExitCode.OK


def cmd_interp(args) -> int:
    d = parse_derivation(_read(args.derivation))
    interpolator = Interpolator(load_theory(args.theory), case33_form=args.case33_form)
    if args.all_partitions:
        cap = args.cap or Config().get("interpolation", "partition_cap", 64)
        code = ExitCode.OK
        for k, p in enumerate(all_partitions(d.conclusion, cap)):
            code = max(code, _interpolate_one(args, d, p, interpolator, suffix=f"_{k}"))
        return code
    if not args.partition:
        print("error: --partition or --all-partitions is required", file=sys.stderr)
        return ExitCode.PARSE_ERROR
    return _interpolate_one(args, d, Partition.parse(args.partition, d.conclusion), interpolator)


def cmd_theory_compile(args) -> int:
    theory = theory_from_source(parse_theory(_read(args.axioms)))
    print(f"theory {theory.name}")
    for r in theory.rules:
        status = "singular" if r.singular else "NOT singular"
        print(f"  {format_rule(r)}  [{status}]")
        for diagnostic in r.diagnostics:
            print(f"    {diagnostic}")
    return ExitCode.OK if theory.singular else ExitCode.NON_SINGULAR


def cmd_selftest(args) -> int:
    report = Selftest(seed=args.seed, random_derivations=args.random).run()
    print(report.summary(), end="")
    return ExitCode.OK if report.ok else ExitCode.FAILURE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="singint", description="Split interpolation for G3c with geometric rules")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="check a derivation file")
    p.add_argument("derivation")
    p.add_argument("--theory", default="G")
    p.set_defaults(handler=cmd_check)

    p = sub.add_parser("prove", help="search for a derivation")
    p.add_argument("sequent")
    p.add_argument("--theory", default="G")
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--emit", help="write the derivation to this file")
    p.set_defaults(handler=cmd_prove)

    p = sub.add_parser("interp", help="extract a split interpolant")
    p.add_argument("derivation")
    p.add_argument("--partition", help="sides by occurrence, e.g. L:1,2;R:2")
    p.add_argument("--theory", default="G")
    p.add_argument("--verify", action="store_true")
    p.add_argument("--emit-witnesses", metavar="DIR")
    p.add_argument("--all-partitions", action="store_true")
    p.add_argument("--cap", type=int, help="partition limit for --all-partitions")
    p.add_argument("--report", action="store_true", help="print the language report as JSON")
    p.add_argument("--case33-form", choices=("implicative", "conjunctive"))
    p.set_defaults(handler=cmd_interp)

    p = sub.add_parser("theory", help="theory files")
    theory_sub = p.add_subparsers(dest="theory_command", required=True)
    c = theory_sub.add_parser("compile", help="compile axioms and report singularity")
    c.add_argument("axioms")
    c.set_defaults(handler=cmd_theory_compile)

    p = sub.add_parser("selftest", help="run the built-in checks")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--random", type=int, default=None, help="random derivations per theory")
    p.set_defaults(handler=cmd_selftest)
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return ExitCode.OK if e.code in (0, None) else ExitCode.PARSE_ERROR

    try:
        return int(args.handler(args))
    except ProofError as e:
        print(f"error: {e}", file=sys.stderr)
        Logger().debug(f"{args.command}: {e}")
        return int(e.exit_code)
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return ExitCode.FAILURE
    except Exception as e:
        # the console handler reports it on stderr
        Logger().error(f"Unexpected error in {args.command}: {e}")
        return ExitCode.FAILURE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
