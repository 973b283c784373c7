#!/usr/bin/env python3
"""Construct the shipped baseline scenario.

The baseline models the primary care system of three rural municipalities
in the Eifel region (Roetgen, Simmerath, Monschau): roughly 35500
inhabitants on a hectare grid of 2754 population cells, served by 20
primary care practices. Municipal totals, under-16 counts, and practice
counts follow the published census and public-health figures; the exact
hectare raster and practice addresses are not redistributable, so this
script lays out a synthetic settlement geometry that reproduces the
municipal totals exactly and approximates the real settlement structure
(compact village cores, scattered hamlets).

Outputs:
    data/cells.csv               population cells (id, municipality, lat, lon, size, population)
    data/municipalities.csv      municipal under-16 totals
    data/physicians.csv          practice roster with schedules and birth years
    data/generation_params.json  demographic tables used by the generator
    scenarios/baseline.json      the generator-form scenario

Everything is deterministic; re-running the script reproduces identical
files.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
M_PER_DEG_LAT = 111320.0
CELL_M = 100.0

# Municipality -> (cells, population, under 16, settlements).
# Settlement tuples: (name, lat, lon, weight). Weights apportion both the
# cells and the population of the municipality.
MUNICIPALITIES = {
    "roetgen": {
        "cells": 534, "population": 8288, "under16": 1390,
        "settlements": [
            ("roetgen", 50.650, 6.182, 0.62),
            ("rott", 50.664, 6.152, 0.28),
            ("mulartshuette", 50.685, 6.195, 0.10),
        ],
    },
    "simmerath": {
        "cells": 1220, "population": 15000, "under16": 2383,
        "settlements": [
            ("simmerath", 50.608, 6.303, 0.30),
            ("lammersdorf", 50.625, 6.270, 0.16),
            ("kesternich", 50.590, 6.335, 0.13),
            ("eicherscheid", 50.585, 6.275, 0.10),
            ("steckenborn", 50.574, 6.310, 0.10),
            ("rurberg", 50.595, 6.385, 0.09),
            ("strauch", 50.613, 6.345, 0.08),
            ("einruhr", 50.573, 6.395, 0.04),
        ],
    },
    "monschau": {
        "cells": 1000, "population": 12254, "under16": 1794,
        "settlements": [
            ("monschau", 50.555, 6.242, 0.22),
            ("imgenbroich", 50.568, 6.250, 0.16),
            ("konzen", 50.582, 6.230, 0.14),
            ("kalterherberg", 50.520, 6.200, 0.14),
            ("muetzenich", 50.560, 6.205, 0.12),
            ("hoefen", 50.535, 6.255, 0.12),
            ("rohren", 50.545, 6.285, 0.10),
        ],
    },
}

# Weekly schedules. Values are (session, open, close) triples; every session
# implies one extra buffer hour for capacity purposes.
SCHEDULES = {
    "T33a": [("mon_am", "08:00", "12:00"), ("tue_am", "08:00", "12:00"),
             ("wed_am", "08:00", "12:00"), ("thu_am", "08:00", "12:00"),
             ("fri_am", "08:00", "12:00"), ("mon_pm", "14:00", "17:00"),
             ("thu_pm", "14:00", "17:00")],
    "T33b": [("mon_am", "08:30", "12:30"), ("tue_am", "08:30", "12:30"),
             ("wed_am", "08:30", "12:30"), ("thu_am", "08:30", "12:30"),
             ("fri_am", "08:30", "12:30"), ("tue_pm", "15:00", "18:00"),
             ("thu_pm", "15:00", "18:00")],
    "T33c": [("mon_am", "08:00", "12:00"), ("tue_am", "08:00", "12:00"),
             ("wed_am", "08:00", "12:00"), ("thu_am", "08:00", "12:00"),
             ("fri_am", "08:00", "12:00"), ("tue_pm", "14:30", "17:30"),
             ("wed_pm", "14:30", "17:30")],
    "T32h": [("mon_am", "08:00", "12:00"), ("tue_am", "08:00", "12:00"),
             ("wed_am", "08:00", "12:00"), ("thu_am", "08:00", "12:00"),
             ("fri_am", "08:00", "12:00"), ("tue_pm", "14:00", "17:00"),
             ("thu_pm", "14:00", "16:30")],
    "T32q": [("mon_am", "08:00", "12:00"), ("tue_am", "08:00", "12:00"),
             ("wed_am", "08:00", "12:00"), ("thu_am", "08:00", "12:00"),
             ("fri_am", "08:00", "12:00"), ("tue_pm", "14:00", "17:00"),
             ("thu_pm", "14:00", "16:15")],
    "T30":  [("mon_am", "08:00", "12:00"), ("tue_am", "08:00", "12:00"),
             ("wed_am", "08:00", "12:00"), ("thu_am", "08:00", "12:00"),
             ("fri_am", "08:00", "12:00"), ("tue_pm", "14:00", "15:30"),
             ("thu_pm", "14:00", "15:30")],
    "T29h": [("mon_am", "08:00", "11:30"), ("tue_am", "08:00", "11:30"),
             ("wed_am", "08:00", "11:30"), ("thu_am", "08:00", "11:30"),
             ("fri_am", "08:00", "11:30"), ("mon_pm", "14:00", "17:00"),
             ("thu_pm", "14:00", "16:00")],
    "T29":  [("mon_am", "08:00", "12:00"), ("tue_am", "08:00", "12:00"),
             ("wed_am", "08:00", "12:00"), ("thu_am", "08:00", "12:00"),
             ("fri_am", "08:00", "12:00"), ("tue_pm", "14:00", "17:00")],
    "T28":  [("mon_am", "08:00", "12:00"), ("tue_am", "08:00", "12:00"),
             ("wed_am", "08:00", "12:00"), ("thu_am", "08:00", "12:00"),
             ("fri_am", "08:00", "12:00"), ("thu_pm", "14:00", "16:00")],
    "T27h": [("mon_am", "08:15", "12:00"), ("tue_am", "08:15", "12:00"),
             ("wed_am", "08:15", "12:00"), ("thu_am", "08:15", "12:00"),
             ("fri_am", "08:15", "12:00"), ("tue_pm", "14:00", "16:45")],
}

# Roster: id, municipality, settlement anchor, offsets in meters, birth
# year, schedule. Practices born 1958 or earlier retire by 2023; born 1962
# or earlier by 2027.
PHYSICIANS = [
    ("pcp-01", "roetgen", "roetgen", 120, -80, 1971, "T33a"),
    ("pcp-02", "roetgen", "roetgen", -150, 210, 1966, "T33b"),
    ("pcp-03", "roetgen", "rott", 60, 40, 1957, "T30"),
    ("pcp-04", "roetgen", "roetgen", 310, 120, 1978, "T32h"),
    ("pcp-05", "roetgen", "rott", -90, -130, 1961, "T28"),
    ("pcp-06", "simmerath", "simmerath", 80, 60, 1969, "T33a"),
    ("pcp-07", "simmerath", "simmerath", -140, -90, 1975, "T33c"),
    ("pcp-08", "simmerath", "lammersdorf", 50, 110, 1956, "T30"),
    ("pcp-09", "simmerath", "kesternich", -70, 30, 1973, "T33b"),
    ("pcp-10", "simmerath", "simmerath", 230, -180, 1983, "T32q"),
    ("pcp-11", "simmerath", "eicherscheid", 90, -50, 1958, "T29h"),
    ("pcp-12", "simmerath", "rurberg", -60, 80, 1968, "T33a"),
    ("pcp-13", "simmerath", "steckenborn", 40, -110, 1960, "T27h"),
    ("pcp-14", "monschau", "monschau", 110, 70, 1972, "T33c"),
    ("pcp-15", "monschau", "imgenbroich", -80, 140, 1980, "T32q"),
    ("pcp-16", "monschau", "konzen", 60, -90, 1967, "T33b"),
    ("pcp-17", "monschau", "kalterherberg", -120, 50, 1955, "T29"),
    ("pcp-18", "monschau", "muetzenich", 70, 100, 1976, "T32q"),
    ("pcp-19", "monschau", "hoefen", -50, -70, 1962, "T27h"),
    ("pcp-20", "monschau", "imgenbroich", 180, -40, 1970, "T32h"),
]

AGE_CLASSES = [
    {"id": "16-24",
     "annual_illness_fn": {"slope": 6.0, "intercept": 0.0},
     "duration_factor": 0.8, "willingness_factor": 1.2,
     "cancel_probability": 0.95},
    {"id": "25-65",
     "annual_illness_fn": {"slope": 7.0, "intercept": 1.0},
     "duration_factor": 1.0, "willingness_factor": 1.0,
     "cancel_probability": 0.8},
    {"id": ">65",
     "annual_illness_fn": {"slope": 9.0, "intercept": 1.0},
     "duration_factor": 1.2, "willingness_factor": 0.8,
     "cancel_probability": 0.7},
]

ILLNESS_FAMILIES = [
    {"id": "I10-hypertension", "chronic": True,
     "willingness_fn": {"slope": -10.0, "intercept": 20.0},
     "duration_fn": None,
     "followup_fn": {"slope": -20.0, "intercept": 100.0}},
    {"id": "E11-diabetes", "chronic": True,
     "willingness_fn": {"slope": -4.0, "intercept": 14.0},
     "duration_fn": None,
     "followup_fn": {"slope": -10.0, "intercept": 90.0}},
    {"id": "I25-heart-disease", "chronic": True,
     "willingness_fn": {"slope": -4.0, "intercept": 10.0},
     "duration_fn": None,
     "followup_fn": {"slope": -30.0, "intercept": 100.0}},
    {"id": "E78-cholesterol", "chronic": False,
     "willingness_fn": {"slope": -5.0, "intercept": 8.0},
     "duration_fn": {"slope": 4.0, "intercept": 8.0},
     "followup_fn": {"slope": -2.0, "intercept": 11.0}},
    {"id": "M54-back-pain", "chronic": False,
     "willingness_fn": {"slope": -3.0, "intercept": 4.0},
     "duration_fn": {"slope": 9.0, "intercept": 5.0},
     "followup_fn": {"slope": -4.0, "intercept": 11.0}},
    {"id": "Z25-vaccination", "chronic": False,
     "willingness_fn": {"slope": 0.0, "intercept": 40.0},
     "duration_fn": None,
     "followup_fn": None},
    {"id": "J06-cold", "chronic": False,
     "willingness_fn": {"slope": -2.0, "intercept": 2.0},
     "duration_fn": {"slope": 5.0, "intercept": 4.0},
     "followup_fn": {"slope": -1.0, "intercept": 6.0}},
]

ACUTE_MIX = {
    "16-24": {"E78-cholesterol": 0.02, "M54-back-pain": 0.32,
              "Z25-vaccination": 0.14, "J06-cold": 0.52},
    "25-65": {"E78-cholesterol": 0.24, "M54-back-pain": 0.38,
              "Z25-vaccination": 0.14, "J06-cold": 0.24},
    ">65":   {"E78-cholesterol": 0.36, "M54-back-pain": 0.28,
              "Z25-vaccination": 0.27, "J06-cold": 0.09},
}

CHRONIC_MIX = {
    "16-24": {"I10-hypertension": 0.17, "E11-diabetes": 0.33,
              "I25-heart-disease": 0.50},
    "25-65": {"I10-hypertension": 0.65, "E11-diabetes": 0.16,
              "I25-heart-disease": 0.19},
    ">65":   {"I10-hypertension": 0.61, "E11-diabetes": 0.20,
              "I25-heart-disease": 0.19},
}

GENERATION_PARAMS = {
    "age_distribution": {"16-24": 0.1196, "25-65": 0.6318, ">65": 0.2486},
    "availability_probability": {"16-24": 0.85, "25-65": 0.55, ">65": 0.95},
    "chronic_probability": {"16-24": 0.12, "25-65": 0.33, ">65": 0.52},
    "seed": 2011,
}


def apportion(total: int, weights: list[float], minimum: int = 0) -> list[int]:
    """Split an integer total by weights (largest remainder), respecting a
    per-part minimum."""
    base = total - minimum * len(weights)
    if base < 0:
        raise ValueError("total too small for the per-part minimum")
    wsum = sum(weights)
    raw = [base * w / wsum for w in weights]
    parts = [int(x) for x in raw]
    rest = base - sum(parts)
    order = sorted(range(len(weights)), key=lambda i: raw[i] - parts[i], reverse=True)
    for i in order[:rest]:
        parts[i] += 1
    return [p + minimum for p in parts]


def spiral_offsets(n: int):
    """First n positions of a square spiral on the integer grid."""
    out = [(0, 0)]
    ring = 1
    while len(out) < n:
        cells = []
        for j in range(-ring, ring + 1):
            cells.append((ring, j))
            cells.append((-ring, j))
        for i in range(-ring + 1, ring):
            cells.append((i, ring))
            cells.append((i, -ring))
        cells.sort(key=lambda ij: (math.atan2(ij[1], ij[0]), ij))
        out.extend(cells)
        ring += 1
    return out[:n]


def build_cells():
    """Lay out all population cells; returns rows for cells.csv."""
    rows = []
    for muni, info in MUNICIPALITIES.items():
        weights = [s[3] for s in info["settlements"]]
        cell_counts = apportion(info["cells"], weights, minimum=1)
        # Population decays from each settlement core outwards.
        cell_weights = []
        placed = []
        for (name, lat, lon, w), n_cells in zip(info["settlements"], cell_counts):
            for k, (i, j) in enumerate(spiral_offsets(n_cells)):
                ring = max(abs(i), abs(j))
                clat = lat + i * CELL_M / M_PER_DEG_LAT
                clon = lon + j * CELL_M / (M_PER_DEG_LAT * math.cos(math.radians(lat)))
                placed.append((f"{muni[:3]}-{name}-{k:04d}", muni, clat, clon))
                cell_weights.append(w * math.exp(-ring / 4.0))
        pops = apportion(info["population"], cell_weights, minimum=1)
        for (cid, m, clat, clon), pop in zip(placed, pops):
            rows.append((cid, m, round(clat, 6), round(clon, 6), int(CELL_M), pop))
    return rows


def build_physicians():
    """Practice roster; returns rows for physicians.csv."""
    anchors = {s[0]: (s[1], s[2])
               for info in MUNICIPALITIES.values() for s in info["settlements"]}
    rows = []
    for pid, muni, settlement, dx, dy, born, sched in PHYSICIANS:
        lat0, lon0 = anchors[settlement]
        lat = round(lat0 + dy / M_PER_DEG_LAT, 6)
        lon = round(lon0 + dx / (M_PER_DEG_LAT * math.cos(math.radians(lat0))), 6)
        rows.append((pid, muni, settlement, lat, lon, born, sched))
    return rows


def weekly_hours(sched: str) -> float:
    """Open hours per week including the one-hour post-session buffers."""
    def hhmm(s):
        h, m = s.split(":")
        return int(h) + int(m) / 60.0
    return sum(hhmm(c) - hhmm(o) + 1.0 for _, o, c in SCHEDULES[sched])


def main() -> None:
    (ROOT / "data").mkdir(exist_ok=True)
    (ROOT / "scenarios").mkdir(exist_ok=True)

    cells = build_cells()
    docs = build_physicians()

    # Sanity: exact totals per municipality.
    for muni, info in MUNICIPALITIES.items():
        got_cells = sum(1 for c in cells if c[1] == muni)
        got_pop = sum(c[5] for c in cells if c[1] == muni)
        assert got_cells == info["cells"], (muni, got_cells)
        assert got_pop == info["population"], (muni, got_pop)
        assert info["under16"] <= got_pop - got_cells
    assert len(cells) == 2754
    assert sum(c[5] for c in cells) == 35542
    assert sum(c[5] for c in cells) - sum(i["under16"] for i in MUNICIPALITIES.values()) == 29975

    # Sanity: weekly capacity incl. buffers, and the retirement waves.
    total = sum(weekly_hours(s) for *_, s in PHYSICIANS)
    assert abs(total - 627.25) < 1e-9, total
    retire_2023 = [p[0] for p in PHYSICIANS if p[5] <= 1958]
    retire_2027 = [p[0] for p in PHYSICIANS if p[5] <= 1962]
    assert len(retire_2023) == 4 and len(retire_2027) == 7
    lost_short = sum(weekly_hours(p[6]) for p in PHYSICIANS if p[0] in retire_2023)
    lost_medium = sum(weekly_hours(p[6]) for p in PHYSICIANS if p[0] in retire_2027)
    assert abs(lost_short - 118.5) < 1e-9, lost_short
    assert abs(lost_medium - 201.5) < 1e-9, lost_medium

    with open(ROOT / "data" / "cells.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["cell_id", "municipality", "lat", "lon", "size_m", "population"])
        w.writerows(cells)

    with open(ROOT / "data" / "municipalities.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["municipality", "under16"])
        for muni, info in MUNICIPALITIES.items():
            w.writerow([muni, info["under16"]])

    with open(ROOT / "data" / "physicians.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["id", "municipality", "settlement", "lat", "lon",
                    "birth_year", "schedule"])
        w.writerows(docs)

    with open(ROOT / "data" / "generation_params.json", "w") as fh:
        json.dump(GENERATION_PARAMS, fh, indent=2)
        fh.write("\n")

    scenario = {
        "meta": {
            "name": "baseline",
            "epoch_weekday": 0,
            "region": "Roetgen / Simmerath / Monschau",
            "retired_by_2023": retire_2023,
            "retired_by_2027": retire_2027,
            "age_distribution_2023": {"16-24": 0.1051, "25-65": 0.6283, ">65": 0.2666},
            "age_distribution_2027": {"16-24": 0.1025, "25-65": 0.6033, ">65": 0.2942},
        },
        "age_classes": AGE_CLASSES,
        "illness_families": ILLNESS_FAMILIES,
        "distributions": {"acute": ACUTE_MIX, "chronic": CHRONIC_MIX},
        "physicians": [
            {"id": pid, "location": {"lat": lat, "lon": lon},
             "opening_hours": {ses: [o, c] for ses, o, c in SCHEDULES[sched]}}
            for pid, _muni, _set, lat, lon, _born, sched in docs
        ],
        "patients": {
            "generator": {
                "cells": [list(c) for c in cells],
                "municipalities": {m: {"under16": i["under16"]}
                                   for m, i in MUNICIPALITIES.items()},
                **GENERATION_PARAMS,
            }
        },
        "run_config": {"warmup_years": 60, "horizon_years": 1,
                       "runs": 20, "base_seed": 1},
    }
    out = ROOT / "scenarios" / "baseline.json"
    out.write_text(json.dumps(scenario, indent=2) + "\n")

    hours = {p[0]: weekly_hours(p[6]) for p in PHYSICIANS}
    print(f"{len(cells)} cells, {sum(c[5] for c in cells)} inhabitants, "
          f"{len(docs)} practices, {total:.2f} weekly hours incl. buffers")
    print(f"retiring by 2023: {retire_2023} ({lost_short:.1f} h)")
    print(f"retiring by 2027: {retire_2027} ({lost_medium:.1f} h)")
    print(f"wrote {out}")
    assert hours  # silence linters about the unused summary dict


if __name__ == "__main__":
    main()
