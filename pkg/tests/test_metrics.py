import json
import math

import pytest

from simcare.metrics import (
    INDICATORS,
    RunAccumulator,
    aggregate,
    compare_reports,
    finalize,
    parse_report_csv,
    per_year_csv,
    report_csv,
    report_json,
)


def _runs(values):
    """One per-run dict per value, every indicator carrying that value."""
    return [{key: float(v) for key, _ in INDICATORS} for v in values]


def test_indicator_table():
    keys = [k for k, _ in INDICATORS]
    assert len(keys) == 16
    assert len(set(keys)) == 16
    assert keys[0] == "treatments_per_physician"
    assert keys[-1] == "capacity_hours"


def test_aggregate_frozen_interval():
    rows = aggregate(_runs([1, 2, 3, 4, 5]))
    for key, mean, lo, hi, unit in rows:
        assert mean == 3.0
        # sample sd sqrt(2.5), 97.5% t quantile at 4 dof 2.7764451052:
        # half-width 2.7764451052 * sqrt(2.5 / 5) = 1.9632431615
        assert lo == pytest.approx(1.03675684, abs=1e-7)
        assert hi == pytest.approx(4.96324316, abs=1e-7)
        assert hi - mean == pytest.approx(mean - lo, abs=1e-12)


def test_aggregate_single_run_has_no_interval():
    rows = aggregate(_runs([7]))
    for key, mean, lo, hi, unit in rows:
        assert mean == 7.0
        assert lo is None and hi is None


def test_aggregate_row_order_and_units():
    rows = aggregate(_runs([1, 2]))
    assert [(r[0], r[4]) for r in rows] == list(INDICATORS)


def test_finalize_formulas():
    acc = RunAccumulator(n_phys=2)
    acc.n_treat_walk = 10
    acc.n_treat_appt = 6
    acc.n_treat_reg = 4
    acc.util_sum = 1.5
    acc.n_sessions = 2
    acc.ot_days = 0.05
    acc.op_days = 4
    acc.n_rej_walk = 3
    acc.access_std_sum = 9.0
    acc.access_std_n = 6
    acc.access_reg_sum = 40.0
    acc.access_reg_n = 4
    acc.dist_sum = 55.0
    acc.dist_n = 20
    acc.wait_appt_sum = 0.02
    acc.wait_walk_sum = 0.05
    acc.ontime_n = 9
    acc.appt_arrivals = 12
    acc.n_illness = 17
    out = finalize(acc, n_phys=2, chronic_patients=5, capacity_hours=260.0)
    assert out["treatments_per_physician"] == 10.0
    assert out["walkins_per_physician"] == 5.0
    assert out["standard_appointments_per_physician"] == 3.0
    assert out["regular_appointments_per_physician"] == 2.0
    assert out["utilization_pct"] == pytest.approx(75.0)
    assert out["daily_overtime_min"] == pytest.approx(18.0)  # 0.05 days over 4
    assert out["rejected_walkins_per_physician"] == 1.5
    assert out["access_time_standard_days"] == 1.5
    assert out["access_time_regular_days"] == 10.0
    assert out["access_distance_km"] == 2.75
    assert out["waiting_time_appointment_min"] == pytest.approx(0.02 * 1440 / 10)
    assert out["waiting_time_walkin_min"] == pytest.approx(0.05 * 1440 / 10)
    assert out["ontime_appointment_arrivals_pct"] == 75.0
    assert out["acute_illnesses"] == 17.0
    assert out["chronic_patients"] == 5.0
    assert out["capacity_hours"] == 260.0


def test_finalize_empty_denominators():
    out = finalize(RunAccumulator(n_phys=3), 3, 0, 100.0)
    for key, _ in INDICATORS:
        if key == "capacity_hours":
            assert out[key] == 100.0
        else:
            assert out[key] == 0.0


def test_add_session_warmup_gate():
    acc = RunAccumulator(n_phys=1, warmup_day=10)
    acc.add_session(0, 9, util=1.0, overtime_days=0.5)
    assert acc.n_sessions == 0 and acc.op_days == 0
    acc.add_session(0, 10, util=0.5, overtime_days=0.01)
    assert acc.n_sessions == 1 and acc.util_sum == 0.5


def test_add_session_counts_operated_days_once():
    acc = RunAccumulator(n_phys=2)
    acc.add_session(0, 3, 0.5, 0.0)
    acc.add_session(0, 3, 0.5, 0.0)  # afternoon of the same day
    acc.add_session(1, 3, 0.5, 0.0)  # other physician, same day
    acc.add_session(0, 4, 0.5, 0.0)
    assert acc.n_sessions == 4
    assert acc.op_days == 3


def test_report_csv_round_trip():
    rows = aggregate(_runs([0.1, 0.2, 0.7]))
    text = report_csv(rows)
    lines = text.split("\n")
    assert lines[0] == "indicator,mean,ci_low,ci_high,unit"
    assert text.endswith("\n")
    assert parse_report_csv(text) == rows
    # shortest round-trip float form is used verbatim
    mean = rows[0][1]
    assert f",{repr(mean)}," in lines[1]


def test_report_csv_single_run_blank_interval():
    text = report_csv(aggregate(_runs([2])))
    assert ",2.0,,," in text.split("\n")[1]
    parsed = parse_report_csv(text)
    assert parsed[0][2] is None and parsed[0][3] is None


def test_parse_report_rejects_foreign_text():
    with pytest.raises(ValueError):
        parse_report_csv("name,value\nx,1\n")


def test_report_json_document():
    rows = aggregate(_runs([1, 3]))
    per_run = _runs([1, 3])
    text = report_json(rows, per_run, {"scenario": "demo", "runs": 2})
    doc = json.loads(text)
    assert set(doc) == {"meta", "indicators", "runs"}
    assert doc["meta"]["scenario"] == "demo"
    assert doc["runs"] == per_run
    ind = doc["indicators"]["treatments_per_physician"]
    assert ind["mean"] == 2.0
    assert ind["unit"] == "1/physician"
    assert text.endswith("\n")
    # stable key order: serialising twice gives identical bytes
    assert text == report_json(rows, per_run, {"runs": 2, "scenario": "demo"})


def test_per_year_csv_averages_available_runs():
    run_a = _runs([10, 20])       # two years
    run_b = _runs([30, 40, 50])   # three years
    text = per_year_csv([run_a, run_b])
    lines = text.strip().split("\n")
    assert lines[0] == "year,indicator,value"
    assert len(lines) == 1 + 3 * len(INDICATORS)
    table = {}
    for line in lines[1:]:
        year, key, value = line.split(",")
        table[(int(year), key)] = float(value)
    assert table[(0, "capacity_hours")] == 20.0   # mean of 10 and 30
    assert table[(1, "capacity_hours")] == 30.0   # mean of 20 and 40
    assert table[(2, "capacity_hours")] == 50.0   # only the longer run


def test_compare_reports_deltas():
    base = report_csv([("a", 1.0, None, None, "1"), ("b", 2.0, None, None, "min")])
    variant = report_csv([("a", 1.5, None, None, "1"), ("b", 1.0, None, None, "min")])
    text = compare_reports([base, variant], ["base", "whatif"])
    lines = text.strip().split("\n")
    assert lines[0] == "indicator,base_mean,whatif_mean,whatif_delta"
    assert lines[1] == "a,1.0,1.5,0.5"
    assert lines[2] == "b,2.0,1.0,-1.0"


def test_compare_reports_three_way():
    texts = [report_csv([("a", float(v), None, None, "1")]) for v in (1, 2, 3)]
    out = compare_reports(texts, ["x", "y", "z"])
    assert out.splitlines()[0] == "indicator,x_mean,y_mean,y_delta,z_mean,z_delta"
    assert out.splitlines()[1] == "a,1.0,2.0,1.0,3.0,2.0"


def test_compare_reports_mismatch():
    base = report_csv([("a", 1.0, None, None, "1")])
    other = report_csv([("b", 1.0, None, None, "1")])
    with pytest.raises(ValueError):
        compare_reports([base, other], ["base", "other"])
