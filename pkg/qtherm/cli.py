"""
Command-line entry point.

Usage:
  qtherm analyze <problem.json> [-o out.json]
  qtherm sweep-p <sweep.json> -o out.csv
  qtherm bloch-scan <sweep.json> -o out.csv
  qtherm verify [--seed N] [--trials-scale X] [-o out.json]

Exit codes: 0 success, 1 failed verification or analysis error, 2 invalid input.
"""

import argparse

from . import COMMAND_CLASS_MAPPINGS, COMMAND_DISPLAY_NAME_MAPPINGS, __version__
from .py.console import fail, set_quiet
from .py.errors import QThermError, ValidationError

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INVALID = 2


def build_parser():
    parser = argparse.ArgumentParser(
        prog="qtherm",
        description="Thermodynamic cost of quantum operations on signal ensembles",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--quiet", action="store_true", help="Only print warnings and failures")
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="command")

    for name, command_class in COMMAND_CLASS_MAPPINGS.items():
        sub = subparsers.add_parser(
            name,
            help=COMMAND_DISPLAY_NAME_MAPPINGS.get(name, name),
            description=command_class.DESCRIPTION,
        )
        for flags, options in command_class.ARGUMENTS:
            sub.add_argument(*flags, **options)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    set_quiet(args.quiet)

    command = COMMAND_CLASS_MAPPINGS[args.command]()
    kwargs = {k: v for k, v in vars(args).items() if k not in ("command", "quiet")}
    try:
        return getattr(command, command.FUNCTION)(**kwargs)
    except ValidationError as e:
        fail("QTherm", f"Error: {e}")
        return EXIT_INVALID
    except QThermError as e:
        fail("QTherm", f"Error: {e}")
        return EXIT_FAILED


if __name__ == "__main__":
    raise SystemExit(main())
