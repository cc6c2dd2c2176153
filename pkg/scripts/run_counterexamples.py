"""Run the counterexamples experiment and write its CSV outputs.

Usage: python scripts/run_counterexamples.py [--config cfg.json] [--seed N] [--out DIR]
"""

import sys

from phireg.cli import main

if __name__ == "__main__":
    sys.exit(main(["experiment", "counterexamples", *sys.argv[1:]]))
