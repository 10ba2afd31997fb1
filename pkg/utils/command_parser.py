"""
Command line parser utilities
"""

import argparse
import shlex
from typing import List, Sequence, Tuple, Union

COMMANDS = ("frame", "lk", "classify", "mesh")

COMMAND_HELP = {
    "frame": "integrate the Frenet frame and report its drift",
    "lk": "evaluate L1N and L2N numerically and by closed form",
    "classify": "run the Gauss-map classification suite",
    "mesh": "write fixed-s tube slices as OBJ plus a scalar table",
}


class UsageError(ValueError):
    """Malformed command line"""


class _RaisingParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


class CommandParser:
    """Parse tubelab command lines into a command name and its options"""

    def __init__(self):
        self.parser = self._build()

    def _build(self) -> argparse.ArgumentParser:
        parser = _RaisingParser(prog="tubelab",
                                description="Gauss-map operators of tubular hypersurfaces in E4_1")
        sub = parser.add_subparsers(dest="command", metavar="{" + ",".join(COMMANDS) + "}",
                                    parser_class=_RaisingParser)
        for name in COMMANDS:
            cmd = sub.add_parser(name, help=COMMAND_HELP[name])
            cmd.add_argument("--config", metavar="PATH", default=None,
                             help="JSON run configuration (defaults apply when omitted)")
            cmd.add_argument("--out", metavar="DIR", default=None,
                             help="output directory, overrides output_dir")
            cmd.add_argument("--threads", metavar="N", type=int, default=None,
                             help="worker threads for grid evaluation")
            cmd.add_argument("--verbose", action="store_true",
                             help="debug logging on stderr")
        return parser

    def format_help(self) -> str:
        return self.parser.format_help()

    def parse(self, command_line: Union[str, Sequence[str]]) -> Tuple[str, argparse.Namespace]:
        """
        Parse a command line into command and options

        Args:
            command_line: argv list (without the program name) or a string

        Returns:
            Tuple of (command, options namespace)

        Raises:
            UsageError: If the command line cannot be parsed
        """
        if isinstance(command_line, str):
            try:
                argv: List[str] = shlex.split(command_line.strip())
            except ValueError as e:
                raise UsageError(f"Invalid command syntax: {e}")
        else:
            argv = list(command_line)

        if not argv:
            raise UsageError("no command given; expected one of " + ", ".join(COMMANDS))

        options = self.parser.parse_args(argv)
        if options.command is None:
            raise UsageError("no command given; expected one of " + ", ".join(COMMANDS))
        if options.threads is not None and options.threads < 1:
            raise UsageError("--threads must be at least 1")
        return options.command, options
