"""``gaugelens`` command line entry point.

Exit codes: 0 success, 2 invalid config or input, 3 invariance violation,
4 numerical failure.
"""
from __future__ import annotations

import argparse
import logging
import sys

from .config import RunConfig, read_config_file
from .errors import (ConfigError, ConvergenceError, DegenerateError, DomainError,
                     InvarianceViolation, NotPSDError, ShapeError, SymmetryError,
                     TrainingDivergedError)
from .experiments import COMMANDS

EXIT_OK, EXIT_CONFIG, EXIT_INVARIANCE, EXIT_NUMERIC = 0, 2, 3, 4


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gaugelens",
        description="Measure how hidden-layer gauge transforms distort representation geometry.",
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="flat 'key = value' config file")
    parser.add_argument("-v", "--verbose", action="store_true")
    for key in RunConfig.keys():
        flags = [f"--{key}"]
        if "_" in key:
            flags.append(f"--{key.replace('_', '-')}")
        parser.add_argument(*flags, dest=key, default=None, metavar=key.upper())
    return parser


def resolve_config(args) -> RunConfig:
    values = read_config_file(args.config) if args.config else {}
    values.update({k: getattr(args, k) for k in RunConfig.keys() if getattr(args, k) is not None})
    return RunConfig().updated(values)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        COMMANDS[args.command](cfg)
    except (ConfigError, DomainError, ShapeError, SymmetryError) as exc:
        print(f"gaugelens: invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvarianceViolation as exc:
        print(f"gaugelens: invariance violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANCE
    except (ConvergenceError, TrainingDivergedError, NotPSDError, DegenerateError,
            FloatingPointError) as exc:
        print(f"gaugelens: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
