# edibnet/cli/__init__.py
"""
Command-line entry point.

Exit codes: 0 success, 1 usage or configuration error, 2 data or shape
error, 3 numeric error.
"""
from typing import List, Optional
import argparse
import logging
import sys

from ..errors import ConfigError, DataError, EdibnetError, NumericError, ShapeError, TapeError
from .commands import Command, make_command

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


class UsageError(ConfigError):
    """Bad command-line syntax."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    from ..core import __version__

    parser = _Parser(prog="edibnet", description="Depth-guided wavelet-domain image deblurring.")
    parser.add_argument("--version", action="version", version=f"edibnet {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True
    for command in Command:
        module = make_command(command.value)
        child = sub.add_parser(command.value, help=module.HELP, description=module.HELP)
        module.add_arguments(child)
        child.set_defaults(handler=module.run)
    return parser


def exit_code(error: Exception) -> int:
    if isinstance(error, (NumericError, TapeError)):
        return EXIT_NUMERIC
    if isinstance(error, (DataError, ShapeError)):
        return EXIT_DATA
    return EXIT_USAGE


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")


def cli_main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:  # --help / --version
        return int(e.code or 0)
    _configure_logging(args.verbose)
    try:
        args.handler(args)
    except EdibnetError as e:
        code = exit_code(e)
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return code
    return EXIT_OK


def main() -> None:
    sys.exit(cli_main())
