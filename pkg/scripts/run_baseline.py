#!/usr/bin/env python3
"""Run the shipped baseline scenario and write reports/baseline.csv.

Thin wrapper around `simcare run` with the scenario's own run
configuration (60 warm-up years, 1 reporting year, 20 runs). Pass extra
`simcare run` flags through, e.g.:

    python3 scripts/run_baseline.py --runs 5 --threads 5
"""

import sys
from pathlib import Path

from simcare.cli import main

ROOT = Path(__file__).resolve().parent.parent

if __name__ == "__main__":
    (ROOT / "reports").mkdir(exist_ok=True)
    argv = ["run",
            "--scenario", str(ROOT / "scenarios" / "baseline.json"),
            "--out", str(ROOT / "reports" / "baseline.csv"),
            *sys.argv[1:]]
    sys.exit(main(argv))
