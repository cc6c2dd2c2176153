"""Run the fig5b experiment and write its CSV outputs.

Usage: python scripts/run_fig5b.py [--config cfg.json] [--seed N] [--out DIR]
"""

import sys

from phireg.cli import main

if __name__ == "__main__":
    sys.exit(main(["experiment", "fig5b", *sys.argv[1:]]))
