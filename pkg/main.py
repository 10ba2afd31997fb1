#!/usr/bin/env python3
"""
tubelab - Main Entry Point
Gauss-map operators of tubular hypersurfaces in Minkowski 4-space
"""

import sys
from pathlib import Path

# Add the current directory to Python path for imports
sys.path.insert(0, str(Path(__file__).parent))

from lab_core import TubeLab
from utils.colors import Colors


def print_banner():
    """Print the banner on an interactive terminal"""
    banner = f"""
{Colors.CYAN}╔══════════════════════════════════════════════════════════╗
║                 TUBELAB  L_k GAUSS MAPS                  ║
║                                                          ║
║  {Colors.GREEN}tubelab <frame|lk|classify|mesh> [--config PATH]{Colors.CYAN}        ║
╚══════════════════════════════════════════════════════════╝{Colors.RESET}
    """
    print(banner, file=sys.stderr)


def main(argv=None) -> int:
    """Main entry point"""
    argv = sys.argv[1:] if argv is None else argv
    if sys.stderr.isatty() and not argv:
        print_banner()

    lab = TubeLab()
    try:
        return lab.execute(argv)
    except KeyboardInterrupt:
        print(Colors.warning("Interrupted by user"), file=sys.stderr)
        return 130


if __name__ == "__main__":
    sys.exit(main())
