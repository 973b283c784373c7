"""Population synthesis from census-style cell data, plus what-if edits.

A generator block inside a scenario's patients section describes a region as
grid cells (location, edge length, resident count) grouped into
municipalities with a known under-16 head count. Materialisation removes the
under-16 residents, then synthesises one adult patient per remaining slot.

The generator runs on its own PCG64 stream seeded from the block, entirely
separate from simulation seeding, so the same scenario file always yields
the same population no matter how many runs are simulated.

Per-adult draw order (fixed, do not reorder): latitude offset, longitude
offset, health (Beta(25, 25)), age class, 14 availability indicators in
named session order, chronic indicator, then for chronic patients the
family and the seriousness (triangular between 0 and 1 with mode at the
health value).
"""

from __future__ import annotations

import copy
import math

import numpy as np

from .scenario import ChronicCondition, PatientSpec, ScenarioError
from .timebase import SESSION_KEYS

M_PER_DEG_LAT = 111320.0


def _prob_table(obj: dict, age_ids: list[str], path: str) -> dict:
    out = {}
    for aid in age_ids:
        if aid not in obj:
            raise ScenarioError(f"{path}: missing entry for age class {aid!r}")
        p = float(obj[aid])
        if not 0.0 <= p <= 1.0:
            raise ScenarioError(f"{path}.{aid}: {p} outside [0, 1]")
        out[aid] = p
    return out


def materialize_population(gen: dict, ages, families, chronic_mix: dict,
                           remap: list[int]) -> list[PatientSpec]:
    """Turn a generator block into an explicit patient list."""
    age_ids = [a.id for a in ages]
    dist = gen["age_distribution"]
    missing = set(age_ids) - set(dist)
    if missing:
        raise ScenarioError(f"patients.generator.age_distribution: missing {sorted(missing)}")
    extra = set(dist) - set(age_ids)
    if extra:
        raise ScenarioError(f"patients.generator.age_distribution: unknown {sorted(extra)}")
    total = sum(dist.values())
    if abs(total - 1.0) > 1e-9:
        raise ScenarioError(f"patients.generator.age_distribution: sums to {total}, expected 1")
    age_cum = []
    acc = 0.0
    for aid in age_ids:
        acc += float(dist[aid])
        age_cum.append(acc)

    avail_p = _prob_table(gen["availability_probability"], age_ids,
                          "patients.generator.availability_probability")
    chronic_p = _prob_table(gen["chronic_probability"], age_ids,
                            "patients.generator.chronic_probability")

    chronic_fams = [f for f in families if f.chronic]
    chronic_cum = {}
    for aid in age_ids:
        row = chronic_mix.get(aid, {})
        cum = []
        acc = 0.0
        for f in chronic_fams:
            acc += row.get(f.id, 0.0)
            cum.append(acc)
        chronic_cum[aid] = cum
        if chronic_p[aid] > 0.0 and (not cum or cum[-1] <= 0.0):
            raise ScenarioError(
                f"patients.generator.chronic_probability.{aid}: positive but no chronic "
                f"families are distributed to this age class")

    cells = gen["cells"]
    munis = gen["municipalities"]
    seen_ids = set()
    by_muni: dict = {}
    for i, cell in enumerate(cells):
        cid, muni, lat, lon, size_m, pop = cell
        path = f"patients.generator.cells[{i}]"
        if cid in seen_ids:
            raise ScenarioError(f"{path}: duplicate cell id {cid!r}")
        seen_ids.add(cid)
        if muni not in munis:
            raise ScenarioError(f"{path}: unknown municipality {muni!r}")
        if int(pop) < 1:
            raise ScenarioError(f"{path}: population must be at least 1")
        if float(size_m) <= 0.0:
            raise ScenarioError(f"{path}: cell size must be positive")
        by_muni.setdefault(muni, []).append(i)

    rng = np.random.Generator(np.random.PCG64(int(gen["seed"])))

    # Under-16 removal: every cell keeps one adult, the rest of the slots
    # form the removal pool of their municipality.
    adult_count = [int(c[5]) for c in cells]
    for muni, cell_idx in by_muni.items():
        under16 = int(munis[muni]["under16"])
        if under16 < 0:
            raise ScenarioError(f"patients.generator.municipalities.{muni}: negative under16")
        if under16 == 0:
            continue
        pool = np.repeat(np.asarray(cell_idx), [adult_count[i] - 1 for i in cell_idx])
        if under16 > len(pool):
            raise ScenarioError(
                f"patients.generator.municipalities.{muni}: under16 {under16} exceeds the "
                f"{len(pool)} removable residents")
        removed = rng.choice(pool, size=under16, replace=False)
        for i, n in zip(*np.unique(removed, return_counts=True)):
            adult_count[i] -= int(n)

    patients = []
    for i, cell in enumerate(cells):
        cid, _, lat, lon, size_m, _ = cell
        lat = float(lat)
        lon = float(lon)
        dlat = float(size_m) / M_PER_DEG_LAT
        dlon = float(size_m) / (M_PER_DEG_LAT * math.cos(math.radians(lat)))
        for k in range(adult_count[i]):
            plat = lat + (rng.random() - 0.5) * dlat
            plon = lon + (rng.random() - 0.5) * dlon
            health = float(rng.beta(25.0, 25.0))
            u = rng.random()
            age = 0
            while age < len(age_cum) - 1 and u >= age_cum[age]:
                age += 1
            aid = age_ids[age]
            mask = 0
            pa = avail_p[aid]
            for named_idx in range(len(SESSION_KEYS)):
                if rng.random() < pa:
                    mask |= 1 << remap[named_idx]
            chronic = None
            if rng.random() < chronic_p[aid]:
                cum = chronic_cum[aid]
                u = rng.random() * cum[-1]
                fi = 0
                while fi < len(cum) - 1 and u >= cum[fi]:
                    fi += 1
                fam = chronic_fams[fi]
                s = float(rng.triangular(0.0, health, 1.0))
                chronic = ChronicCondition(
                    family=fam.id,
                    seriousness=s,
                    willingness_days=fam.willingness_fn(s),
                    followup_days=fam.followup_fn(s) if fam.followup_fn else 0.0,
                )
                if chronic.followup_days <= 0.0:
                    raise ScenarioError(
                        f"patients.generator: family {fam.id!r} yields a non-positive "
                        f"follow-up interval at seriousness {s}")
            patients.append(PatientSpec(
                id=f"{cid}-{k}",
                lat=plat,
                lon=plon,
                health=health,
                age_class=aid,
                availability_mask=mask,
                chronic=chronic,
            ))
    return patients


# ---------------------------------------------------------------------------
# What-if transformations on raw scenario dictionaries


def remove_physicians(raw: dict, ids: list[str]) -> dict:
    """Scenario copy with the given physicians removed."""
    out = copy.deepcopy(raw)
    known = {str(ph["id"]) for ph in out["physicians"]}
    unknown = [i for i in ids if i not in known]
    if unknown:
        raise ScenarioError(f"physicians to remove not found: {unknown}")
    out["physicians"] = [ph for ph in out["physicians"] if str(ph["id"]) not in set(ids)]
    if not out["physicians"]:
        raise ScenarioError("cannot remove every physician")
    return out


def reage_population(raw: dict, age_distribution: dict) -> dict:
    """Scenario copy with the generator's age distribution replaced."""
    patients = raw.get("patients")
    if not isinstance(patients, dict) or "generator" not in patients:
        raise ScenarioError("reage_population requires a generator-form patients section")
    out = copy.deepcopy(raw)
    out["patients"]["generator"]["age_distribution"] = dict(age_distribution)
    return out
