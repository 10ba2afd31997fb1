"""
Command handlers for the tubelab command line
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import List


@dataclass
class CommandResult:
    """Console text, exit code and the files a command wrote"""

    output: str
    exit_code: int = 0
    files: List[Path] = field(default_factory=list)
