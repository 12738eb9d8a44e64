"""Command-line interface.

Exit codes: 0 when every check passes, 1 when a property is violated or the
system is not conditional-expectation preserving, 2 for unreadable or
malformed input.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from .config import CheckSpec, ConfigError, parse_config
from .report import (
    EXIT_INPUT,
    EXIT_OK,
    random_campaign,
    run_checks,
    to_json,
    to_table,
    trace_cesaro,
)

SUBCOMMAND_CHECKS = {
    "validate": (),
    "ergodic": ("birkhoff", "ergodic", "projections", "product"),
    "mixing": ("mixing",),
    "independence": ("independence",),
}


def _rational(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from None
    if value <= 0:
        raise argparse.ArgumentTypeError("epsilon must be positive")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="riesz-ergodic",
        description="Check ergodicity, mixing and independence of finite "
                    "conditional expectation preserving systems, exactly.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, formats=("json", "table"), default="json"):
        p.add_argument("--format", choices=formats, default=default)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--timing", action="store_true",
                       help="include wall-clock timings (reports stop being byte-identical)")

    for name in ("validate", "ergodic", "mixing", "independence", "run"):
        p = sub.add_parser(name, help=f"run the {name} checks on a system file"
                           if name != "run" else "run the checks listed in the system file")
        p.add_argument("--config", required=True, metavar="PATH")
        p.add_argument("--exhaustive", action="store_true",
                       help="validate over all 2^n band projections instead of atom indicators")
        common(p)
        if name in ("ergodic", "run"):
            p.add_argument("--epsilon", type=_rational, metavar="P/Q",
                           help="also run the iterative average to this tolerance")
        if name in ("independence", "run"):
            p.add_argument("--horizon", type=int, metavar="N")

    p = sub.add_parser("trace", help="Cesàro means S_n f for n = 1..N as CSV")
    p.add_argument("--config", required=True, metavar="PATH")
    p.add_argument("--f", help="comma-separated rationals, one per atom (default: first atom indicator)")
    p.add_argument("--steps", "-N", type=int, help="number of means (default: the period)")
    p.add_argument("--horizon", type=int, metavar="N", help="alias for --steps")
    common(p, formats=("csv", "json"), default="csv")

    p = sub.add_parser("campaign", help="seeded random systems through the cross-checker suite")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--max-atoms", type=int, default=8)
    p.add_argument("--adversarial", action="store_true",
                   help="also generate arbitrary maps to exercise the validator")
    common(p)
    return parser


def _load(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(path, f"cannot read file: {exc.strerror}") from None
    return parse_config(text)


def _emit(report: dict, fmt: str):
    sys.stdout.write(to_table(report) if fmt == "table" else to_json(report))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "campaign":
        if args.count < 0 or args.max_atoms < 1:
            print("error: --count must be >= 0 and --max-atoms >= 1", file=sys.stderr)
            return EXIT_INPUT
        report, code = random_campaign(args.seed, args.count, args.max_atoms,
                                       args.adversarial, args.timing)
        _emit(report, args.format)
        return code

    try:
        config = _load(args.config)
        if args.command == "trace":
            system = config.to_system()
            if not system.is_valid():
                report, code = run_checks(config, checks=(), seed=args.seed)
                _emit(report, "json")
                return code
            f = config.element(args.f.split(",")) if args.f else system.space.atom_indicators()[0]
            steps = args.steps if args.steps is not None else args.horizon
            steps = system.period if steps is None else steps
            if steps < 0:
                raise ConfigError("--steps", "must be nonnegative")
            if args.format == "csv":
                sys.stdout.write(trace_cesaro(config, f, steps))
                return EXIT_OK
            report, code = run_checks(
                config, checks=(CheckSpec("trace", {"f": [str(c) for c in f], "steps": steps}),),
                seed=args.seed)
            _emit(report, "json")
            return code

        if args.command == "run":
            checks = None
        else:
            params = {"horizon": args.horizon} if getattr(args, "horizon", None) else {}
            checks = [CheckSpec(c, params) for c in SUBCOMMAND_CHECKS[args.command]]
        if getattr(args, "epsilon", None) is not None:
            checks = list(checks if checks is not None
                          else config.checks or [CheckSpec(c) for c in SUBCOMMAND_CHECKS["ergodic"]])
            checks.append(CheckSpec("iterative", {"epsilon": str(args.epsilon)}))
        report, code = run_checks(config, checks=checks, exhaustive=args.exhaustive,
                                  seed=args.seed, timing=args.timing)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _emit(report, args.format)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
