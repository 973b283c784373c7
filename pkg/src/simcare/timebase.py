"""Simulation time algebra.

Time is a single non-negative float measured in days. The integer part is
the day index, the fractional part the time of day. Day 0 is a Monday by
convention (scenario files may relabel the epoch weekday for their named
session keys; the internal weekly index is always day mod 7). A week has 14
half-day sessions: (weekday, half) with half 0 = morning, 1 = afternoon.

Each physician session is padded with a fixed one-hour buffer after the
published closing time during which arrived patients are still admitted.
"""

from __future__ import annotations

import math

DAY = 1.0
HOUR = 1.0 / 24.0
HALF_HOUR = 1.0 / 48.0
QUARTER_HOUR = 1.0 / 96.0
MINUTE = 1.0 / 1440.0
SECOND = 1.0 / 86400.0
WEEK_DAYS = 7
SESSIONS_PER_WEEK = 14
YEAR_DAYS = 364  # exactly 52 weeks, so weekday patterns repeat across years

AM, PM = 0, 1

# Canonical session key order used by scenario files: index = weekday*2 + half.
SESSION_KEYS = (
    "mon_am", "mon_pm", "tue_am", "tue_pm", "wed_am", "wed_pm",
    "thu_am", "thu_pm", "fri_am", "fri_pm", "sat_am", "sat_pm",
    "sun_am", "sun_pm",
)


def decompose(t: float) -> tuple[int, float]:
    """Split a time point into (day index, fraction of day)."""
    day = math.floor(t)
    return day, t - day


def day_of(t: float) -> int:
    return math.floor(t)


def compose(day: int, frac: float) -> float:
    return day + frac


def weekday(day: int) -> int:
    return day % WEEK_DAYS


def weekly_class(day: int, half: int) -> int:
    """Index 0..13 of the weekly session (weekday*2 + half)."""
    return (day % WEEK_DAYS) * 2 + half


def parse_hhmm(text: str) -> float:
    """Parse a wall-clock "HH:MM" string into a fraction of a day.

    "13:12" -> 792/1440 = 0.55. Raises ValueError on malformed input.
    """
    parts = text.split(":")
    if len(parts) != 2 or not parts[0].isdigit() or not parts[1].isdigit():
        raise ValueError(f"expected HH:MM, got {text!r}")
    hh, mm = int(parts[0]), int(parts[1])
    if hh > 24 or mm > 59 or (hh == 24 and mm != 0):
        raise ValueError(f"clock time out of range: {text!r}")
    return (hh * 60 + mm) / 1440.0


def format_hhmm(frac: float) -> str:
    """Inverse of parse_hhmm for whole-minute fractions."""
    total = round(frac * 1440.0)
    return f"{total // 60:02d}:{total % 60:02d}"


def year_of(t: float) -> int:
    return int(t // YEAR_DAYS)
