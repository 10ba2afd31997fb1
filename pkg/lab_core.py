"""
Lab Core - Command dispatch and exit-code mapping
"""

import dataclasses
import logging
import sys
from typing import Callable, Dict, Optional, Sequence, TextIO, Union

from commands import CommandResult
from commands.frame_commands import FrameCommands
from commands.gauss_commands import GaussCommands
from commands.mesh_commands import MeshCommands
from geometry.errors import GeometryError
from utils.colors import Colors, setup_logging
from utils.command_parser import CommandParser, UsageError
from utils.config import ConfigError, RunConfig, load_config

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


class TubeLab:
    """Main class that wires the parser, the configuration and the command handlers"""

    def __init__(self, stdout: Optional[TextIO] = None, stderr: Optional[TextIO] = None):
        self.stdout = stdout if stdout is not None else sys.stdout
        self.stderr = stderr if stderr is not None else sys.stderr
        self.command_parser = CommandParser()

        self.frame_commands = FrameCommands()
        self.gauss_commands = GaussCommands()
        self.mesh_commands = MeshCommands()

        self.commands = self._register_commands()

    def _register_commands(self) -> Dict[str, Callable[[RunConfig], CommandResult]]:
        """Register all available commands"""
        return {
            'frame': self.frame_commands.cmd_frame,
            'lk': self.gauss_commands.cmd_lk,
            'classify': self.gauss_commands.cmd_classify,
            'mesh': self.mesh_commands.cmd_mesh,
        }

    def _print(self, text: str, err: bool = False):
        stream = self.stderr if err else self.stdout
        if not (hasattr(stream, "isatty") and stream.isatty()):
            text = Colors.strip_colors(text)
        print(text, file=stream)

    def load(self, options) -> RunConfig:
        """Config file plus command-line overrides"""
        config = load_config(options.config)
        overrides = {"verbose": options.verbose}
        if options.out is not None:
            overrides["output_dir"] = options.out
        if options.threads is not None:
            overrides["threads"] = options.threads
        return dataclasses.replace(config, **overrides)

    def execute(self, argv: Union[str, Sequence[str]]) -> int:
        """Run one command line and return its exit code"""
        try:
            cmd, options = self.command_parser.parse(argv)
        except UsageError as e:
            self._print(Colors.error(f"Usage error: {e}"), err=True)
            self._print(self.command_parser.format_help(), err=True)
            return EXIT_USAGE

        setup_logging(options.verbose, self.stderr)
        try:
            config = self.load(options)
        except ConfigError as e:
            self._print(Colors.error(f"Config error: {e}"), err=True)
            return EXIT_USAGE
        except OSError as e:
            self._print(Colors.error(f"Cannot read config: {e}"), err=True)
            return EXIT_USAGE

        try:
            result = self.commands[cmd](config)
        except (GeometryError, ValueError) as e:
            logger.debug("%s failed", cmd, exc_info=True)
            self._print(Colors.error(f"Error executing {cmd}: {e}"), err=True)
            return EXIT_FAILURE
        except OSError as e:
            self._print(Colors.error(f"Cannot write output for {cmd}: {e}"), err=True)
            return EXIT_FAILURE

        if result.output:
            self._print(result.output)
        return result.exit_code
