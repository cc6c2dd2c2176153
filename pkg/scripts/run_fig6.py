"""Run the fig6 experiment and write its CSV outputs.

Usage: python scripts/run_fig6.py [--config cfg.json] [--seed N] [--out DIR]
"""

import sys

from phireg.cli import main

if __name__ == "__main__":
    sys.exit(main(["experiment", "fig6", *sys.argv[1:]]))
