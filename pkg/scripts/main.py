"""
Ring photon emission - Main
Launcher that makes the repository importable and hands over to the CLI
"""

import os
import sys

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from ringphoton.cli import main  # noqa: E402


if __name__ == "__main__":
    sys.exit(main())
