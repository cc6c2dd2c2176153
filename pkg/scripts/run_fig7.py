"""Run the fig7 experiment and write its CSV outputs.

Usage: python scripts/run_fig7.py [--config cfg.json] [--seed N] [--out DIR]
"""

import sys

from phireg.cli import main

if __name__ == "__main__":
    sys.exit(main(["experiment", "fig7", *sys.argv[1:]]))
