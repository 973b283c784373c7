"""Run indicators: accumulation, per-run finalisation, cross-run aggregation.

Counts accumulate only while the KPI window is open (after warm-up, before
the horizon end); session utilisation and overtime attribute by the day the
session started. Across runs each indicator is reported as mean with a 95%
Student-t confidence interval. Report files are deterministic byte for byte:
floats are written with repr (shortest round-trip form) and row order is
fixed.
"""

from __future__ import annotations

import json
import math

from scipy.stats import t as student_t

# (key, unit) in report row order.
INDICATORS = (
    ("treatments_per_physician", "1/physician"),
    ("walkins_per_physician", "1/physician"),
    ("standard_appointments_per_physician", "1/physician"),
    ("regular_appointments_per_physician", "1/physician"),
    ("utilization_pct", "%"),
    ("daily_overtime_min", "min"),
    ("rejected_walkins_per_physician", "1/physician"),
    ("access_time_standard_days", "days"),
    ("access_time_regular_days", "days"),
    ("access_distance_km", "km"),
    ("waiting_time_appointment_min", "min"),
    ("waiting_time_walkin_min", "min"),
    ("ontime_appointment_arrivals_pct", "%"),
    ("acute_illnesses", "1"),
    ("chronic_patients", "1"),
    ("capacity_hours", "h"),
)

UNITS = dict(INDICATORS)


class RunAccumulator:
    """Raw KPI counters for one run (or one year slice of one run)."""

    __slots__ = (
        "warmup_day",
        "n_treat_walk", "n_treat_appt", "n_treat_reg",
        "util_sum", "n_sessions", "ot_days", "op_days", "_last_ot_day",
        "n_rej_walk", "n_rej_appt",
        "access_std_sum", "access_std_n", "access_reg_sum", "access_reg_n",
        "dist_sum", "dist_n",
        "wait_appt_sum", "wait_walk_sum",
        "ontime_n", "appt_arrivals",
        "n_illness",
    )

    def __init__(self, n_phys: int, warmup_day: int = 0):
        self.warmup_day = warmup_day
        self.n_treat_walk = 0
        self.n_treat_appt = 0
        self.n_treat_reg = 0
        self.util_sum = 0.0
        self.n_sessions = 0
        self.ot_days = 0.0
        self.op_days = 0
        self._last_ot_day = [-1] * n_phys
        self.n_rej_walk = 0
        self.n_rej_appt = 0
        self.access_std_sum = 0.0
        self.access_std_n = 0
        self.access_reg_sum = 0.0
        self.access_reg_n = 0
        self.dist_sum = 0.0
        self.dist_n = 0
        self.wait_appt_sum = 0.0
        self.wait_walk_sum = 0.0
        self.ontime_n = 0
        self.appt_arrivals = 0
        self.n_illness = 0

    def add_session(self, phys_idx: int, day: int, util: float, overtime_days: float) -> None:
        if day < self.warmup_day:
            return
        self.util_sum += util
        self.n_sessions += 1
        self.ot_days += overtime_days
        if self._last_ot_day[phys_idx] != day:
            self._last_ot_day[phys_idx] = day
            self.op_days += 1


def finalize(acc: RunAccumulator, n_phys: int, chronic_patients: int,
             capacity_hours: float) -> dict:
    """Indicator values for one accumulator; empty denominators give 0."""

    def ratio(num: float, den: float) -> float:
        return num / den if den else 0.0

    treatments = acc.n_treat_walk + acc.n_treat_appt + acc.n_treat_reg
    return {
        "treatments_per_physician": treatments / n_phys,
        "walkins_per_physician": acc.n_treat_walk / n_phys,
        "standard_appointments_per_physician": acc.n_treat_appt / n_phys,
        "regular_appointments_per_physician": acc.n_treat_reg / n_phys,
        "utilization_pct": 100.0 * ratio(acc.util_sum, acc.n_sessions),
        "daily_overtime_min": 1440.0 * ratio(acc.ot_days, acc.op_days),
        "rejected_walkins_per_physician": acc.n_rej_walk / n_phys,
        "access_time_standard_days": ratio(acc.access_std_sum, acc.access_std_n),
        "access_time_regular_days": ratio(acc.access_reg_sum, acc.access_reg_n),
        "access_distance_km": ratio(acc.dist_sum, acc.dist_n),
        "waiting_time_appointment_min": 1440.0 * ratio(acc.wait_appt_sum, acc.n_treat_appt + acc.n_treat_reg),
        "waiting_time_walkin_min": 1440.0 * ratio(acc.wait_walk_sum, acc.n_treat_walk),
        "ontime_appointment_arrivals_pct": 100.0 * ratio(acc.ontime_n, acc.appt_arrivals),
        "acute_illnesses": float(acc.n_illness),
        "chronic_patients": float(chronic_patients),
        "capacity_hours": capacity_hours,
    }


def aggregate(per_run: list[dict]) -> list[tuple]:
    """Rows (key, mean, ci_low, ci_high, unit); CI bounds None for one run."""
    n = len(per_run)
    rows = []
    for key, unit in INDICATORS:
        values = [r[key] for r in per_run]
        mean = math.fsum(values) / n
        if n > 1:
            var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
            half = float(student_t.ppf(0.975, n - 1)) * math.sqrt(var / n)
            rows.append((key, mean, mean - half, mean + half, unit))
        else:
            rows.append((key, mean, None, None, unit))
    return rows


def report_csv(rows: list[tuple]) -> str:
    lines = ["indicator,mean,ci_low,ci_high,unit"]
    for key, mean, lo, hi, unit in rows:
        lo_s = "" if lo is None else repr(lo)
        hi_s = "" if hi is None else repr(hi)
        lines.append(f"{key},{repr(mean)},{lo_s},{hi_s},{unit}")
    return "\n".join(lines) + "\n"


def report_json(rows: list[tuple], per_run: list[dict], meta: dict) -> str:
    doc = {
        "meta": meta,
        "indicators": {
            key: {"mean": mean, "ci_low": lo, "ci_high": hi, "unit": unit}
            for key, mean, lo, hi, unit in rows
        },
        "runs": per_run,
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def per_year_csv(yearly_per_run: list[list[dict]]) -> str:
    """Rows year,indicator,value; values averaged across runs per year."""
    n_years = max(len(y) for y in yearly_per_run)
    lines = ["year,indicator,value"]
    for year in range(n_years):
        slices = [y[year] for y in yearly_per_run if year < len(y)]
        for key, _unit in INDICATORS:
            value = math.fsum(s[key] for s in slices) / len(slices)
            lines.append(f"{year},{key},{repr(value)}")
    return "\n".join(lines) + "\n"


def parse_report_csv(text: str) -> list[tuple]:
    rows = []
    lines = text.strip().split("\n")
    if not lines or lines[0] != "indicator,mean,ci_low,ci_high,unit":
        raise ValueError("not a simcare report (unexpected header)")
    for line in lines[1:]:
        key, mean, lo, hi, unit = line.split(",")
        rows.append((key, float(mean), float(lo) if lo else None,
                     float(hi) if hi else None, unit))
    return rows


def compare_reports(texts: list[str], names: list[str]) -> str:
    """Indicator-by-indicator deltas of later reports against the first.

    Raises ValueError when the reports do not cover the same indicators in
    the same order.
    """
    parsed = [parse_report_csv(t) for t in texts]
    base = parsed[0]
    base_keys = [r[0] for r in base]
    for name, rows in zip(names[1:], parsed[1:]):
        if [r[0] for r in rows] != base_keys:
            raise ValueError(f"report {name} covers different indicators than {names[0]}")
    header = ["indicator", f"{names[0]}_mean"]
    for name in names[1:]:
        header += [f"{name}_mean", f"{name}_delta"]
    lines = [",".join(header)]
    for i, key in enumerate(base_keys):
        cells = [key, repr(base[i][1])]
        for rows in parsed[1:]:
            cells += [repr(rows[i][1]), repr(rows[i][1] - base[i][1])]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
