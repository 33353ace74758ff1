"""
Command-line entry point for the DTBAS simulator.

Usage: python cli.py [--seed N] [--out report.json] {metrics-table,simulate,attack,game} ...
"""

import sys

from src.cli import main

if __name__ == "__main__":
    sys.exit(main())
