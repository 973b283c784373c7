"""Scenario files: the single JSON input describing a simulated region.

A scenario bundles age classes, illness families, illness-family mixes,
physicians, patients, and run defaults. Patients come either as an explicit
list or as an inline population generator reference that is materialised
deterministically from its own seed at load time. Serialisation writes the
original patients section back verbatim, so load -> save round-trips.

All family coefficients are affine functions of illness seriousness s in
[0, 1], encoded as {"slope": a, "intercept": b}; fields that do not apply to
a family (duration of chronic conditions, follow-up of one-off visits like
vaccinations) are explicit nulls.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema

from . import strategies
from .timebase import SESSION_KEYS, HOUR, parse_hhmm


class ScenarioError(ValueError):
    """Malformed or inconsistent scenario input; message carries the path."""


@dataclass(slots=True, frozen=True)
class AffineFn:
    slope: float
    intercept: float

    def __call__(self, s: float) -> float:
        return self.slope * s + self.intercept

    def to_json(self) -> dict:
        return {"slope": self.slope, "intercept": self.intercept}


@dataclass(slots=True, frozen=True)
class AgeClass:
    id: str
    annual_illness_fn: AffineFn   # acute illnesses per year as fn of health
    duration_factor: float
    willingness_factor: float
    cancel_probability: float     # chance to cancel a stale acute appointment


@dataclass(slots=True, frozen=True)
class IllnessFamily:
    id: str
    chronic: bool
    willingness_fn: AffineFn
    duration_fn: AffineFn | None
    followup_fn: AffineFn | None


@dataclass(slots=True, frozen=True)
class ChronicCondition:
    family: str
    seriousness: float
    willingness_days: float   # waiting tolerance for regular appointments
    followup_days: float      # regular check-up interval


@dataclass(slots=True, frozen=True)
class PatientSpec:
    id: str
    lat: float
    lon: float
    health: float
    age_class: str
    availability_mask: int    # bit i = available in weekly session class i
    chronic: ChronicCondition | None


@dataclass(slots=True, frozen=True)
class PhysicianSpec:
    id: str
    lat: float
    lon: float
    opening: tuple  # 14 entries of (open_frac, close_frac) or None
    appointment_strategy: str
    admission_strategy: str
    treatment_strategy: str
    strategy_params: dict = field(default_factory=dict)


@dataclass(slots=True, frozen=True)
class RunConfig:
    warmup_years: float
    horizon_years: float
    runs: int
    base_seed: int


@dataclass(slots=True)
class Scenario:
    meta: dict
    age_classes: list[AgeClass]
    families: list[IllnessFamily]
    acute_mix: dict        # age id -> {family id: probability}
    chronic_mix: dict      # age id -> {family id: probability}
    physicians: list[PhysicianSpec]
    patients: list[PatientSpec]
    run_config: RunConfig
    patients_raw: object = None  # original JSON section, kept for round-trip

    def age_class_by_id(self, cid: str) -> AgeClass:
        for a in self.age_classes:
            if a.id == cid:
                return a
        raise KeyError(cid)

    def family_by_id(self, fid: str) -> IllnessFamily:
        for f in self.families:
            if f.id == fid:
                return f
        raise KeyError(fid)

    def chronic_patient_count(self) -> int:
        return sum(1 for p in self.patients if p.chronic is not None)

    def capacity_hours_per_year(self) -> float:
        """Total staffed physician hours per 364-day year, incl. the
        one-hour post-session buffer."""
        weekly = 0.0
        for ph in self.physicians:
            for win in ph.opening:
                if win is not None:
                    weekly += (win[1] - win[0] + HOUR) * 24.0
        return weekly * 52.0


def evaluate_family(
    family: IllnessFamily,
    seriousness: float,
    age_class: AgeClass | None = None,
) -> tuple[float | None, float, float | None]:
    """Expected (duration, willingness, follow-up interval) in days for one
    illness episode of the given seriousness.

    Age factors scale duration and willingness; the follow-up interval is a
    medical property and is never age-adjusted. Inapplicable coordinates
    (duration of chronic families, follow-up when none is prescribed) are
    None.
    """
    dd = 1.0 if age_class is None else age_class.duration_factor
    dw = 1.0 if age_class is None else age_class.willingness_factor
    duration = None if family.duration_fn is None else dd * family.duration_fn(seriousness)
    willingness = dw * family.willingness_fn(seriousness)
    followup = None if family.followup_fn is None else family.followup_fn(seriousness)
    return duration, willingness, followup


# ---------------------------------------------------------------------------
# Parsing


def _schema() -> dict:
    text = resources.files("simcare").joinpath("scenario.schema.json").read_text()
    return json.loads(text)


def _affine(obj, path: str) -> AffineFn:
    try:
        return AffineFn(float(obj["slope"]), float(obj["intercept"]))
    except (TypeError, KeyError) as exc:
        raise ScenarioError(f"{path}: expected {{slope, intercept}}") from exc


def _affine_or_null(obj, path: str) -> AffineFn | None:
    return None if obj is None else _affine(obj, path)


def _check_positive_on_unit(fn: AffineFn, path: str, strict: bool) -> None:
    lo = min(fn(0.0), fn(1.0))
    if strict and lo <= 0.0:
        raise ScenarioError(f"{path}: must be positive on [0, 1], minimum is {lo}")
    if not strict and lo < 0.0:
        raise ScenarioError(f"{path}: must be non-negative on [0, 1], minimum is {lo}")


def _session_remap(epoch_weekday: int) -> list[int]:
    """Class index for each named session key under the given epoch."""
    remap = []
    for i in range(14):
        named_weekday, half = divmod(i, 2)
        remap.append(((named_weekday - epoch_weekday) % 7) * 2 + half)
    return remap


def _parse_opening(obj: dict, remap: list[int], path: str) -> tuple:
    windows: list = [None] * 14
    for key, val in obj.items():
        if key not in SESSION_KEYS:
            raise ScenarioError(f"{path}.{key}: unknown session key")
        cls = remap[SESSION_KEYS.index(key)]
        o, c = parse_hhmm(val[0]), parse_hhmm(val[1])
        if not o < c:
            raise ScenarioError(f"{path}.{key}: opening {val[0]} must precede closing {val[1]}")
        if c + HOUR > 1.0 + 1e-12:
            raise ScenarioError(f"{path}.{key}: closing {val[1]} leaves no room for the one-hour buffer before midnight")
        windows[cls] = (o, c)
    for day in range(7):
        am, pm = windows[day * 2], windows[day * 2 + 1]
        if am and pm and am[1] + HOUR > pm[0] + 1e-12:
            raise ScenarioError(
                f"{path}: day {day} morning buffer (closes {am[1]:.4f}+1h) overlaps the afternoon opening")
    if all(w is None for w in windows):
        raise ScenarioError(f"{path}: physician has no open sessions")
    return tuple(windows)


def _parse_availability(obj, remap: list[int], path: str) -> int:
    mask = 0
    if isinstance(obj, str):
        if len(obj) != 14 or any(ch not in "01" for ch in obj):
            raise ScenarioError(f"{path}: availability must be a 14-char 0/1 string")
        for i, ch in enumerate(obj):
            if ch == "1":
                mask |= 1 << remap[i]
    else:
        for key, val in obj.items():
            if key not in SESSION_KEYS:
                raise ScenarioError(f"{path}.{key}: unknown session key")
            if val:
                mask |= 1 << remap[SESSION_KEYS.index(key)]
    return mask


def _parse_mix(obj: dict, age_ids: list[str], families: list[IllnessFamily],
               chronic: bool, path: str) -> dict:
    wanted = {f.id for f in families if f.chronic == chronic}
    out: dict = {}
    for age_id in age_ids:
        if age_id not in obj:
            if not wanted:
                out[age_id] = {}
                continue
            raise ScenarioError(f"{path}: missing row for age class {age_id!r}")
        row = obj[age_id]
        unknown = set(row) - wanted
        if unknown:
            kind = "chronic" if chronic else "acute"
            raise ScenarioError(f"{path}.{age_id}: {sorted(unknown)} are not {kind} families")
        total = sum(row.values())
        if wanted and abs(total - 1.0) > 1e-9:
            raise ScenarioError(f"{path}.{age_id}: probabilities sum to {total}, expected 1")
        if any(v < 0 for v in row.values()):
            raise ScenarioError(f"{path}.{age_id}: negative probability")
        out[age_id] = dict(row)
    return out


def _parse_patient(obj: dict, idx: int, ages: dict, fams: dict, remap: list[int]) -> PatientSpec:
    path = f"patients[{idx}]"
    health = float(obj["health"])
    if not 0.0 <= health <= 1.0:
        raise ScenarioError(f"{path}.health: {health} outside [0, 1]")
    age_id = obj["age_class"]
    if age_id not in ages:
        raise ScenarioError(f"{path}.age_class: unknown id {age_id!r}")
    chronic = None
    if obj.get("chronic") is not None:
        c = obj["chronic"]
        fam = fams.get(c["family"])
        if fam is None or not fam.chronic:
            raise ScenarioError(f"{path}.chronic.family: {c['family']!r} is not a chronic family")
        s = float(c["seriousness"])
        if not 0.0 <= s <= 1.0:
            raise ScenarioError(f"{path}.chronic.seriousness: {s} outside [0, 1]")
        chronic = ChronicCondition(
            family=fam.id,
            seriousness=s,
            willingness_days=fam.willingness_fn(s),
            followup_days=fam.followup_fn(s) if fam.followup_fn else 0.0,
        )
        if chronic.followup_days <= 0.0:
            raise ScenarioError(f"{path}.chronic: family {fam.id!r} has no positive follow-up interval")
    return PatientSpec(
        id=str(obj["id"]),
        lat=float(obj["location"]["lat"]),
        lon=float(obj["location"]["lon"]),
        health=health,
        age_class=age_id,
        availability_mask=_parse_availability(obj["availability"], remap, f"{path}.availability"),
        chronic=chronic,
    )


def parse_scenario(raw: dict, source: str = "<scenario>") -> Scenario:
    """Build a validated Scenario from already-decoded JSON."""
    try:
        jsonschema.validate(raw, _schema())
    except jsonschema.ValidationError as exc:
        raise ScenarioError(f"{source}: {exc.json_path}: {exc.message}") from None

    meta = dict(raw.get("meta", {}))
    epoch = int(meta.get("epoch_weekday", 0))
    if not 0 <= epoch <= 6:
        raise ScenarioError("meta.epoch_weekday: must be in 0..6")
    remap = _session_remap(epoch)

    ages = []
    for i, a in enumerate(raw["age_classes"]):
        path = f"age_classes[{i}]"
        fn = _affine(a["annual_illness_fn"], f"{path}.annual_illness_fn")
        _check_positive_on_unit(fn, f"{path}.annual_illness_fn", strict=False)
        p = float(a["cancel_probability"])
        if not 0.0 <= p <= 1.0:
            raise ScenarioError(f"{path}.cancel_probability: {p} outside [0, 1]")
        ages.append(AgeClass(
            id=a["id"],
            annual_illness_fn=fn,
            duration_factor=float(a["duration_factor"]),
            willingness_factor=float(a["willingness_factor"]),
            cancel_probability=p,
        ))
    if len({a.id for a in ages}) != len(ages):
        raise ScenarioError("age_classes: duplicate ids")

    families = []
    for i, f in enumerate(raw["illness_families"]):
        path = f"illness_families[{i}]"
        chronic = bool(f["chronic"])
        wfn = _affine(f["willingness_fn"], f"{path}.willingness_fn")
        _check_positive_on_unit(wfn, f"{path}.willingness_fn", strict=False)
        dfn = _affine_or_null(f.get("duration_fn"), f"{path}.duration_fn")
        nfn = _affine_or_null(f.get("followup_fn"), f"{path}.followup_fn")
        if chronic and dfn is not None:
            raise ScenarioError(f"{path}: chronic families must have duration_fn null")
        if chronic and nfn is None:
            raise ScenarioError(f"{path}: chronic families need a follow-up interval")
        if dfn is not None:
            _check_positive_on_unit(dfn, f"{path}.duration_fn", strict=True)
        if nfn is not None:
            _check_positive_on_unit(nfn, f"{path}.followup_fn", strict=True)
        families.append(IllnessFamily(f["id"], chronic, wfn, dfn, nfn))
    if len({f.id for f in families}) != len(families):
        raise ScenarioError("illness_families: duplicate ids")

    age_ids = [a.id for a in ages]
    acute_mix = _parse_mix(raw["distributions"]["acute"], age_ids, families, False, "distributions.acute")
    chronic_mix = _parse_mix(raw["distributions"]["chronic"], age_ids, families, True, "distributions.chronic")

    physicians = []
    for i, ph in enumerate(raw["physicians"]):
        path = f"physicians[{i}]"
        strat = ph.get("strategies", {})
        appointment = strat.get("appointment", "ibfi")
        admission = strat.get("admission", "pt")
        treatment = strat.get("treatment", "pfcfs")
        for kind, name, known in (
            ("appointment", appointment, strategies.APPOINTMENT_STRATEGIES),
            ("admission", admission, strategies.ADMISSION_STRATEGIES),
            ("treatment", treatment, strategies.TREATMENT_STRATEGIES),
        ):
            if name not in known:
                raise ScenarioError(
                    f"{path}.strategies.{kind}: unknown strategy {name!r}, known: {sorted(known)}")
        physicians.append(PhysicianSpec(
            id=str(ph["id"]),
            lat=float(ph["location"]["lat"]),
            lon=float(ph["location"]["lon"]),
            opening=_parse_opening(ph["opening_hours"], remap, f"{path}.opening_hours"),
            appointment_strategy=appointment,
            admission_strategy=admission,
            treatment_strategy=treatment,
            strategy_params=dict(ph.get("strategy_params", {})),
        ))
    if not physicians:
        raise ScenarioError("physicians: at least one physician is required")
    if len({p.id for p in physicians}) != len(physicians):
        raise ScenarioError("physicians: duplicate ids")

    ages_by_id = {a.id: a for a in ages}
    fams_by_id = {f.id: f for f in families}
    patients_raw = raw["patients"]
    if isinstance(patients_raw, dict):
        from . import generate  # deferred: generate imports this module
        patients = generate.materialize_population(
            patients_raw["generator"], ages, families, chronic_mix, remap)
    else:
        patients = [_parse_patient(p, i, ages_by_id, fams_by_id, remap)
                    for i, p in enumerate(patients_raw)]
    if len({p.id for p in patients}) != len(patients):
        raise ScenarioError("patients: duplicate ids")

    rc = raw["run_config"]
    run_config = RunConfig(
        warmup_years=float(rc.get("warmup_years", 0)),
        horizon_years=float(rc["horizon_years"]),
        runs=int(rc.get("runs", 1)),
        base_seed=int(rc.get("base_seed", 1)),
    )
    if run_config.warmup_years < 0 or run_config.horizon_years <= 0:
        raise ScenarioError("run_config: warmup_years must be >= 0 and horizon_years > 0")
    if run_config.runs < 1:
        raise ScenarioError("run_config.runs: must be >= 1")

    return Scenario(
        meta=meta,
        age_classes=ages,
        families=families,
        acute_mix=acute_mix,
        chronic_mix=chronic_mix,
        physicians=physicians,
        patients=patients,
        run_config=run_config,
        patients_raw=patients_raw,
    )


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as exc:
        raise ScenarioError(f"{path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from exc
    return parse_scenario(raw, source=str(path))


# ---------------------------------------------------------------------------
# Serialisation


def _opening_to_json(opening: tuple, remap: list[int]) -> dict:
    from .timebase import format_hhmm
    out = {}
    for named_idx, key in enumerate(SESSION_KEYS):
        win = opening[remap[named_idx]]
        if win is not None:
            out[key] = [format_hhmm(win[0]), format_hhmm(win[1])]
    return out


def patient_to_json(p: PatientSpec, remap: list[int]) -> dict:
    bits = "".join("1" if p.availability_mask >> remap[i] & 1 else "0" for i in range(14))
    chronic = None
    if p.chronic is not None:
        chronic = {"family": p.chronic.family, "seriousness": p.chronic.seriousness}
    return {
        "id": p.id,
        "location": {"lat": p.lat, "lon": p.lon},
        "health": p.health,
        "age_class": p.age_class,
        "availability": bits,
        "chronic": chronic,
    }


def scenario_to_dict(sc: Scenario) -> dict:
    remap = _session_remap(int(sc.meta.get("epoch_weekday", 0)))
    if sc.patients_raw is not None:
        patients_json = sc.patients_raw
    else:
        patients_json = [patient_to_json(p, remap) for p in sc.patients]
    return {
        "meta": sc.meta,
        "age_classes": [
            {
                "id": a.id,
                "annual_illness_fn": a.annual_illness_fn.to_json(),
                "duration_factor": a.duration_factor,
                "willingness_factor": a.willingness_factor,
                "cancel_probability": a.cancel_probability,
            }
            for a in sc.age_classes
        ],
        "illness_families": [
            {
                "id": f.id,
                "chronic": f.chronic,
                "willingness_fn": f.willingness_fn.to_json(),
                "duration_fn": f.duration_fn.to_json() if f.duration_fn else None,
                "followup_fn": f.followup_fn.to_json() if f.followup_fn else None,
            }
            for f in sc.families
        ],
        "distributions": {"acute": sc.acute_mix, "chronic": sc.chronic_mix},
        "physicians": [
            {
                "id": ph.id,
                "location": {"lat": ph.lat, "lon": ph.lon},
                "opening_hours": _opening_to_json(ph.opening, remap),
                "strategies": {
                    "appointment": ph.appointment_strategy,
                    "admission": ph.admission_strategy,
                    "treatment": ph.treatment_strategy,
                },
                **({"strategy_params": ph.strategy_params} if ph.strategy_params else {}),
            }
            for ph in sc.physicians
        ],
        "patients": patients_json,
        "run_config": {
            "warmup_years": sc.run_config.warmup_years,
            "horizon_years": sc.run_config.horizon_years,
            "runs": sc.run_config.runs,
            "base_seed": sc.run_config.base_seed,
        },
    }


def save_scenario(sc: Scenario, path: str | Path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(sc), indent=2) + "\n")
