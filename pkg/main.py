"""
QWalk Lattice - discrete-time quantum walk simulator
Entry point for the qwalk command line
"""

import sys

from qwalk.cli.commands import main

if __name__ == "__main__":
    sys.exit(main())
