#!/usr/bin/env python3
"""Derive and run the what-if variants of the shipped baseline.

Six variants: physician retirement waves (2023: -4 practices, 2027: -7),
an older patient population (2023 and 2027 age mixes), and both effects
combined. Scenario files land in scenarios/, reports in reports/, plus a
comparison table against the baseline report.

The baseline report must exist first (scripts/run_baseline.py). Extra
`simcare run` flags are passed through to every run, e.g.:

    python3 scripts/run_what_ifs.py --runs 5 --threads 5
"""

import json
import sys
from pathlib import Path

from simcare.cli import main

ROOT = Path(__file__).resolve().parent.parent
SCENARIOS = ROOT / "scenarios"
REPORTS = ROOT / "reports"


def check(code: int) -> None:
    if code != 0:
        sys.exit(code)


def derive(name: str, *flags: str) -> None:
    check(main(["whatif",
                "--scenario", str(SCENARIOS / "baseline.json"),
                "--out", str(SCENARIOS / f"{name}.json"), *flags]))


if __name__ == "__main__":
    extra = sys.argv[1:]
    REPORTS.mkdir(exist_ok=True)
    meta = json.loads((SCENARIOS / "baseline.json").read_text())["meta"]
    retire_short = ",".join(meta["retired_by_2023"])
    retire_medium = ",".join(meta["retired_by_2027"])
    ages_short = json.dumps(meta["age_distribution_2023"])
    ages_medium = json.dumps(meta["age_distribution_2027"])

    derive("decline_short", "--remove-physicians", retire_short)
    derive("decline_medium", "--remove-physicians", retire_medium)
    derive("aging_short", "--age-distribution", ages_short)
    derive("aging_medium", "--age-distribution", ages_medium)
    derive("combined_short", "--remove-physicians", retire_short,
           "--age-distribution", ages_short)
    derive("combined_medium", "--remove-physicians", retire_medium,
           "--age-distribution", ages_medium)

    names = ["decline_short", "decline_medium", "aging_short",
             "aging_medium", "combined_short", "combined_medium"]
    for name in names:
        check(main(["run", "--scenario", str(SCENARIOS / f"{name}.json"),
                    "--out", str(REPORTS / f"{name}.csv"), *extra]))

    check(main(["compare",
                str(REPORTS / "baseline.csv"),
                *[str(REPORTS / f"{n}.csv") for n in names],
                "--names", ",".join(["baseline", *names]),
                "--out", str(REPORTS / "what_if_comparison.csv")]))
    print(f"wrote {REPORTS / 'what_if_comparison.csv'}")
