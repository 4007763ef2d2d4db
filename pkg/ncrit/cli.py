"""``ncrit`` command line: test, hitset, eval and corpus.

Every run prints one JSON object on stdout. Exit codes:

    0  completed (a NONZERO verdict is still a success)
    2  usage error
    3  formula syntax error
    4  infeasible parameters
    5  I/O or JSON error
    6  certification failure
"""

import argparse
import json
import logging
import sys
from typing import Any, Dict, List, Optional

from ncrit.exceptions import CertificationError, FormulaSyntaxError, InfeasibleParametersError
from ncrit.formula import NotDefined, corpus, parse
from ncrit.ncrit import IdentityTester
from ncrit.utils import NCRIT_LOG_LEVEL, DeskParams, dumps, field_from_name, matrix_to_json, point_from_json, warn_print_only

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_SYNTAX = 3
EXIT_INFEASIBLE = 4
EXIT_IO = 5
EXIT_CERTIFICATION = 6


def _desk_overrides(pairs: List[str]) -> Dict[str, int]:
    out = {}
    for pair in pairs or ():
        key, sep, value = pair.partition("=")
        if not sep:
            raise argparse.ArgumentTypeError(f"--desk expects KEY=VALUE, got {pair!r}")
        out[key.strip()] = int(value)
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ncrit", description="Identity testing for noncommutative rational formulas.")
    parser.add_argument("--log-level", default=NCRIT_LOG_LEVEL, help="logging level (default %(default)s)")
    parser.add_argument("--trace", action="store_true", help="record OpenTelemetry spans as JSON lines")
    parser.add_argument("--desk", action="append", metavar="KEY=VALUE", help="override a desk parameter")
    commands = parser.add_subparsers(dest="command", required=True)

    test = commands.add_parser("test", help="decide whether a formula is a rational identity")
    test.add_argument("--formula", required=True, help="file holding the formula")
    test.add_argument("--n", type=int)
    test.add_argument("--s", type=int)
    test.add_argument("--height", type=int, choices=(0, 1, 2))
    test.add_argument("--mode", choices=("hitset", "random", "both"), default="both")
    test.add_argument("--seed", type=int, default=0)
    test.add_argument("--max-dim", type=int, default=4)
    test.add_argument("--trials", type=int, default=50)

    hitset = commands.add_parser("hitset", help="generate a hitting set or print its parameter schedule")
    hitset.add_argument("--n", type=int, required=True)
    hitset.add_argument("--s", type=int, required=True)
    hitset.add_argument("--height", type=int, choices=(0, 1, 2), required=True)
    hitset.add_argument("--mode", choices=("desk", "paper-faithful-print"), default="desk")
    hitset.add_argument("--out", help="write the hitting-set file here")

    ev = commands.add_parser("eval", help="evaluate a formula at a point")
    ev.add_argument("--formula", required=True)
    ev.add_argument("--point", required=True, help="JSON list of matrices, or {'point': [...], 'field': ...}")

    corpus = commands.add_parser("corpus", help="list or run the identity corpus")
    corpus.add_argument("--run", action="store_true")
    corpus.add_argument("--seed", type=int, default=0)
    return parser


def _read_formula(path: str):
    with open(path, encoding="utf-8") as handle:
        return parse(handle.read().strip())


def _read_point(path: str):
    try:
        with open(path, encoding="utf-8") as handle:
            data = json.load(handle)
        if isinstance(data, dict):
            return point_from_json(data, field_from_name(data.get("field", "Q"), data.get("ell")))
        return point_from_json(data)
    except ValueError as exc:
        raise OSError(f"{path}: {exc}") from exc


def run_test(args, tester: IdentityTester) -> Dict[str, Any]:
    formula = _read_formula(args.formula)
    verdicts = tester.test(
        formula,
        n=args.n,
        s=args.s,
        height=args.height,
        mode=args.mode,
        seed=args.seed,
        max_dim=args.max_dim,
        trials=args.trials,
    )
    summary = " / ".join(f"{v.status} ({k})" for k, v in verdicts.items())
    return {
        "command": "test",
        "formula": str(formula),
        "summary": summary,
        "verdicts": {k: v.to_report() for k, v in verdicts.items()},
    }


def run_hitset(args, tester: IdentityTester) -> Dict[str, Any]:
    if args.mode == "paper-faithful-print":
        record = tester.hitsets.full_schedule(args.n, args.s, args.height)
        warn_print_only(f"kappa={record['kappa']} ell=2^{record['L']}")
        return {"command": "hitset", "mode": args.mode, "schedule": record}
    hs = tester.hitset(args.n, args.s, args.height)
    if args.out:
        tester.hitsets.write(hs, args.out)
    header = hs.to_dict()["header"]
    return {"command": "hitset", "mode": args.mode, "out": args.out, "header": header}


def run_eval(args, tester: IdentityTester) -> Dict[str, Any]:
    formula = _read_formula(args.formula)
    result = tester.evaluate(formula, _read_point(args.point))
    if isinstance(result, NotDefined):
        return {"command": "eval", "result": "NOT_DEFINED", "path": result.path}
    return {"command": "eval", "result": "VALUE", "matrix": matrix_to_json(result)}


def run_corpus(args, tester: IdentityTester) -> Dict[str, Any]:
    if not args.run:
        return {
            "command": "corpus",
            "entries": [{"name": e.name, "formula": str(e.formula), "expected": e.expected} for e in corpus()],
        }
    rows = tester.corpus(seed=args.seed)
    return {"command": "corpus", "rows": rows, "passed": all(row["passed"] for row in rows)}


COMMANDS = {"test": run_test, "hitset": run_hitset, "eval": run_eval, "corpus": run_corpus}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=args.log_level.upper(), format="%(levelname)s %(name)s: %(message)s")
    try:
        desk = DeskParams.from_env(**_desk_overrides(args.desk))
    except (argparse.ArgumentTypeError, TypeError, ValueError) as exc:
        print(f"ncrit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    tester = IdentityTester(desk, enable_tracing=args.trace)
    try:
        report = COMMANDS[args.command](args, tester)
    except FormulaSyntaxError as exc:
        print(f"ncrit: syntax error: {exc}", file=sys.stderr)
        return EXIT_SYNTAX
    except InfeasibleParametersError as exc:
        print(f"ncrit: infeasible parameters: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except CertificationError as exc:
        print(f"ncrit: certification failed: {exc}", file=sys.stderr)
        return EXIT_CERTIFICATION
    except OSError as exc:
        print(f"ncrit: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"ncrit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        if tester.tracer_provider is not None:
            tester.tracer_provider.shutdown()
    print(dumps(report))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
