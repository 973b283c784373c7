"""Shared test helpers: scripted samplers and miniature scenario factories."""

from __future__ import annotations

import copy

from simcare.engine import Prepared, World
from simcare.scenario import parse_scenario


class ScriptedSamplers:
    """Deterministic stand-in for stochastics.Samplers.

    Keyword scripts: a list is consumed front to back, a scalar repeats
    forever, the string "arg" echoes the call's first argument back.
    Unscripted methods fail the test, so a scenario only draws what the
    test planned for. Every call is recorded in .calls as
    (method, args...).
    """

    def __init__(self, **scripts):
        self._scripts = scripts
        self.calls = []

    def _draw(self, name, *args):
        self.calls.append((name, *args))
        if name not in self._scripts:
            raise AssertionError(f"unscripted draw: {name}{args}")
        v = self._scripts[name]
        if isinstance(v, list):
            if not v:
                raise AssertionError(f"script for {name!r} exhausted")
            v = v.pop(0)
        if isinstance(v, str) and v == "arg":
            return args[0]
        return v

    def uniform(self):
        return self._draw("uniform")

    def rand(self, width):
        return self._draw("rand", width)

    def bernoulli(self, p):
        return self._draw("bernoulli", p)

    def categorical(self, cumulative):
        return self._draw("categorical", tuple(cumulative))

    def illness_gap(self, annual_rate):
        return self._draw("illness_gap", annual_rate)

    def seriousness(self, mode):
        return self._draw("seriousness", mode)

    def duration(self, expected_days):
        return self._draw("duration", expected_days)

    def willingness(self, expected_days):
        return self._draw("willingness", expected_days)

    def service_time(self, walk_in):
        return self._draw("service_days", walk_in)

    def punctuality(self):
        return self._draw("punctuality")

    def walkin_arrival(self, lo, hi):
        f = self._draw("walkin_frac", lo, hi)
        return lo + (hi - lo) * f


DEFAULT_AGES = [
    {"id": "adult", "annual_illness_fn": {"slope": 0.0, "intercept": 2.0},
     "duration_factor": 1.0, "willingness_factor": 1.0, "cancel_probability": 0.5},
]

# One acute family with clean affine coefficients (duration 5, tolerance 2,
# follow-up 6 at any seriousness) plus one chronic family.
DEFAULT_FAMILIES = [
    {"id": "acute1", "chronic": False,
     "willingness_fn": {"slope": 0.0, "intercept": 2.0},
     "duration_fn": {"slope": 0.0, "intercept": 5.0},
     "followup_fn": {"slope": 0.0, "intercept": 6.0}},
    {"id": "chron1", "chronic": True,
     "willingness_fn": {"slope": 0.0, "intercept": 6.0},
     "duration_fn": None,
     "followup_fn": {"slope": 0.0, "intercept": 20.0}},
]

DEFAULT_ACUTE_MIX = {"adult": {"acute1": 1.0}}
DEFAULT_CHRONIC_MIX = {"adult": {"chron1": 1.0}}

MON_AM = {"mon_am": ["08:00", "12:00"]}


def phys(pid, lat=50.65, lon=6.18, opening=None, strategies=None, params=None):
    doc = {"id": pid, "location": {"lat": lat, "lon": lon},
           "opening_hours": dict(opening if opening is not None else MON_AM)}
    if strategies:
        doc["strategies"] = strategies
    if params:
        doc["strategy_params"] = params
    return doc


def pat(pid, lat=50.65, lon=6.18, health=0.5, age="adult", avail="1" * 14,
        chronic=None):
    return {"id": pid, "location": {"lat": lat, "lon": lon}, "health": health,
            "age_class": age, "availability": avail, "chronic": chronic}


def build_raw(physicians, patients, *, ages=None, families=None,
              acute_mix=None, chronic_mix=None, warmup_years=0,
              horizon_years=1, runs=1, base_seed=1, epoch_weekday=0,
              name="test"):
    return copy.deepcopy({
        "meta": {"name": name, "epoch_weekday": epoch_weekday},
        "age_classes": ages if ages is not None else DEFAULT_AGES,
        "illness_families": families if families is not None else DEFAULT_FAMILIES,
        "distributions": {
            "acute": acute_mix if acute_mix is not None else DEFAULT_ACUTE_MIX,
            "chronic": chronic_mix if chronic_mix is not None else DEFAULT_CHRONIC_MIX,
        },
        "physicians": physicians,
        "patients": patients,
        "run_config": {"warmup_years": warmup_years, "horizon_years": horizon_years,
                       "runs": runs, "base_seed": base_seed},
    })


def make_world(raw, samplers=None, *, warmup_years=None, horizon_years=None,
               per_year=False, debug=True, seed=1, trace=None):
    sc = parse_scenario(raw)
    pre = Prepared(sc)
    rc = sc.run_config
    return World(
        pre, seed,
        rc.warmup_years if warmup_years is None else warmup_years,
        rc.horizon_years if horizon_years is None else horizon_years,
        per_year=per_year, debug=debug, trace=trace, samplers=samplers,
    )
