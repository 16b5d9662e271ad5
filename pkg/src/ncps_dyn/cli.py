"""``ncps-dyn`` command line entry point.

Exit codes: 0 success, 2 invalid configuration, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .config import KINDS, parse_scenario, read_config, validate
from .errors import DomainError, NumericalError, ValidationError
from .runners import run_scenario

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3

HELP = {
    "uniform": "free fall of one body in a uniform field",
    "kepler": "one body in a Kepler-type field",
    "wep": "compare free fall of several bodies",
    "brackets": "verify the single-particle bracket algebra",
    "average": "ground-state averages of the tensors and of the Hamiltonian remainder",
    "composite": "center-of-mass algebra and mass conditions of composite bodies",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ncps-dyn", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for kind in KINDS:
        cmd = sub.add_parser(kind, help=HELP[kind])
        cmd.add_argument("--config", type=Path, required=True, help="scenario YAML file")
        cmd.add_argument("--out-dir", type=Path, default=None,
                         help="output directory (default: $NCPS_OUT_DIR or ./ncps_out)")
        cmd.add_argument("--seed", type=int, default=None, help="override the config seed")
        cmd.add_argument("--validate-only", action="store_true",
                         help="check the config and exit without running")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        raw = read_config(args.config)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if args.seed is not None and isinstance(raw, dict):
        raw["seed"] = args.seed

    problems = validate(raw, args.command)
    if problems:
        for p in problems:
            print(f"invalid: {p}", file=sys.stderr)
        return EXIT_INVALID
    if args.validate_only:
        print(f"{args.config}: ok")
        return EXIT_OK

    cfg = parse_scenario(raw, args.command)
    out_dir = args.out_dir or Path(os.environ.get("NCPS_OUT_DIR", "ncps_out"))
    try:
        written = run_scenario(cfg, out_dir)
    except ValidationError as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (NumericalError, DomainError) as exc:
        where = f" at t={exc.t!r}" if getattr(exc, "t", None) is not None else ""
        print(f"numerical failure{where}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    for path in written:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
