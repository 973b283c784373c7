"""Command line entry points.

simcare run       simulate a scenario, write the indicator report
simcare generate  materialise a generator-form scenario into patient lists
simcare whatif    derive a modified scenario (remove physicians, re-age)
simcare compare   tabulate indicator deltas between run reports

Exit codes: 0 on success, 1 on system failures (unreadable files and the
like), 2 on invalid inputs or arguments.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .engine import Prepared, run_many, simulate_run
from .generate import reage_population, remove_physicians
from .metrics import aggregate, compare_reports, per_year_csv, report_csv, report_json
from .scenario import ScenarioError, load_scenario, parse_scenario, save_scenario


def _cmd_run(args) -> int:
    sc = load_scenario(args.scenario)
    rc = sc.run_config
    runs = rc.runs if args.runs is None else args.runs
    seed = rc.base_seed if args.seed is None else args.seed
    warmup = rc.warmup_years if args.warmup_years is None else args.warmup_years
    horizon = rc.horizon_years if args.horizon_years is None else args.horizon_years
    if runs < 1:
        raise ScenarioError("--runs must be at least 1")
    if warmup < 0 or horizon <= 0:
        raise ScenarioError("--warmup-years must be >= 0 and --horizon-years > 0")

    pre = Prepared(sc)
    per_year = args.per_year is not None
    kw = dict(base_seed=seed, warmup_years=warmup, horizon_years=horizon,
              per_year=per_year, debug=args.debug)
    if args.trace is not None:
        results = []
        for i in range(runs):
            path = args.trace if runs == 1 else f"{args.trace}.run{i}"
            with open(path, "w") as fh:
                results.append(simulate_run(
                    pre, i, trace=lambda line: fh.write(line + "\n"), **kw))
    else:
        results = run_many(pre, runs, args.threads, **kw)

    rows = aggregate([r["indicators"] for r in results])
    if args.format == "json":
        meta = {
            "scenario": sc.meta.get("name", Path(args.scenario).stem),
            "runs": runs, "base_seed": seed,
            "warmup_years": warmup, "horizon_years": horizon,
        }
        per_run = [{"run": r["run"], "seed": r["seed"],
                    "indicators": r["indicators"], "audit": r["audit"]}
                   for r in results]
        text = report_json(rows, per_run, meta)
    else:
        text = report_csv(rows)
    if args.out is not None:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if per_year:
        Path(args.per_year).write_text(per_year_csv([r["yearly"] for r in results]))
    return 0


def _cmd_generate(args) -> int:
    raw = _read_json(args.scenario)
    if args.seed is not None:
        if not (isinstance(raw.get("patients"), dict) and "generator" in raw["patients"]):
            raise ScenarioError("--seed needs a generator-form patients section")
        raw["patients"]["generator"]["seed"] = args.seed
    sc = parse_scenario(raw, source=args.scenario)
    sc.patients_raw = None  # force explicit patient serialisation
    save_scenario(sc, args.out)
    print(f"wrote {len(sc.patients)} patients to {args.out}", file=sys.stderr)
    return 0


def _cmd_whatif(args) -> int:
    raw = _read_json(args.scenario)
    changed = False
    if args.remove_physicians:
        ids = [s.strip() for s in args.remove_physicians.split(",") if s.strip()]
        raw = remove_physicians(raw, ids)
        changed = True
    if args.age_distribution:
        raw = reage_population(raw, json.loads(args.age_distribution))
        changed = True
    if not changed:
        raise ScenarioError("nothing to change: pass --remove-physicians or --age-distribution")
    parse_scenario(raw, source=args.scenario)  # reject invalid derivatives early
    Path(args.out).write_text(json.dumps(raw, indent=2) + "\n")
    return 0


def _cmd_compare(args) -> int:
    texts = [Path(p).read_text() for p in args.reports]
    if args.names:
        names = [s.strip() for s in args.names.split(",")]
        if len(names) != len(texts):
            raise ScenarioError(f"--names lists {len(names)} names for {len(texts)} reports")
    else:
        names = [Path(p).stem for p in args.reports]
    text = compare_reports(texts, names)
    if args.out is not None:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="simcare",
                                     description="Primary care system simulator.")
    parser.add_argument("--version", action="version", version=f"simcare {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate a scenario and report indicators")
    run.add_argument("--scenario", required=True, help="scenario JSON file")
    run.add_argument("--runs", type=int, default=None,
                     help="replications (default: scenario run_config)")
    run.add_argument("--seed", type=int, default=None,
                     help="base seed; run i uses seed+i (default: scenario run_config)")
    run.add_argument("--warmup-years", type=float, default=None,
                     help="years simulated before indicators count")
    run.add_argument("--horizon-years", type=float, default=None,
                     help="years over which indicators are collected")
    run.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                     help="worker processes (default: all cores); results do not depend on this")
    run.add_argument("--out", default=None, help="report file (default: stdout)")
    run.add_argument("--format", choices=("csv", "json"), default="csv")
    run.add_argument("--per-year", default=None, metavar="PATH",
                     help="also write a year-by-year indicator CSV (warm-up included)")
    run.add_argument("--trace", default=None, metavar="PATH",
                     help="write an event trace; forces sequential runs, "
                          "multi-run traces get a .runN suffix")
    run.add_argument("--debug", action="store_true",
                     help="enable internal consistency checks")
    run.set_defaults(func=_cmd_run)

    gen = sub.add_parser("generate",
                         help="materialise the population of a generator-form scenario")
    gen.add_argument("--scenario", required=True, help="generator-form scenario JSON")
    gen.add_argument("--out", required=True, help="explicit-form scenario to write")
    gen.add_argument("--seed", type=int, default=None, help="override the generator seed")
    gen.set_defaults(func=_cmd_generate)

    wif = sub.add_parser("whatif", help="derive a modified scenario")
    wif.add_argument("--scenario", required=True, help="base scenario JSON")
    wif.add_argument("--out", required=True, help="derived scenario to write")
    wif.add_argument("--remove-physicians", default=None, metavar="ID[,ID...]",
                     help="drop these physicians")
    wif.add_argument("--age-distribution", default=None, metavar="JSON",
                     help='replace the generator age mix, e.g. \'{"16-24": 0.1, ...}\'')
    wif.set_defaults(func=_cmd_whatif)

    cmp_ = sub.add_parser("compare", help="tabulate deltas between run reports")
    cmp_.add_argument("reports", nargs="+", help="report CSVs; first one is the baseline")
    cmp_.add_argument("--names", default=None, help="comma-separated column labels")
    cmp_.add_argument("--out", default=None, help="comparison CSV (default: stdout)")
    cmp_.set_defaults(func=_cmd_compare)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
