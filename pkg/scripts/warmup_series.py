#!/usr/bin/env python3
"""Track every indicator year by year to judge the warm-up length.

Simulates the baseline for 70 years with per-year reporting and no
warm-up gate, writing reports/warmup_series.csv (year, indicator, value).
Plot access times or waiting times over the years to see when the system
reaches its steady state. Extra `simcare run` flags pass through:

    python3 scripts/warmup_series.py --runs 1
"""

import sys
from pathlib import Path

from simcare.cli import main

ROOT = Path(__file__).resolve().parent.parent

if __name__ == "__main__":
    (ROOT / "reports").mkdir(exist_ok=True)
    argv = ["run",
            "--scenario", str(ROOT / "scenarios" / "baseline.json"),
            "--runs", "1",
            "--warmup-years", "0",
            "--horizon-years", "70",
            "--per-year", str(ROOT / "reports" / "warmup_series.csv"),
            "--out", str(ROOT / "reports" / "warmup_full_horizon.csv"),
            *sys.argv[1:]]
    sys.exit(main(argv))
