import math

import pytest
from hypothesis import given, strategies as st

from simcare import timebase as tb


def test_constants_are_exact_fractions():
    assert tb.HOUR == 1.0 / 24.0
    assert tb.HALF_HOUR * 48 == 1.0
    assert tb.QUARTER_HOUR * 96 == 1.0
    assert tb.MINUTE * 1440 == 1.0
    assert tb.SECOND * 86400 == 1.0
    assert tb.YEAR_DAYS == 364
    assert tb.YEAR_DAYS % 7 == 0  # weekday patterns repeat year over year
    assert len(tb.SESSION_KEYS) == 14
    assert tb.SESSION_KEYS[0] == "mon_am"
    assert tb.SESSION_KEYS[13] == "sun_pm"


def test_parse_hhmm_exact_values():
    # 13:12 is 792 of 1440 minutes, which is exactly representable
    assert tb.parse_hhmm("13:12") == 0.55
    assert tb.parse_hhmm("08:00") == 1.0 / 3.0
    assert tb.parse_hhmm("00:00") == 0.0
    assert tb.parse_hhmm("24:00") == 1.0
    assert tb.parse_hhmm("12:00") == 0.5
    assert tb.parse_hhmm("18:00") == 0.75


@pytest.mark.parametrize("bad", ["8", "08-00", "25:00", "08:60", "24:01", "ab:cd", "8:0:0", ""])
def test_parse_hhmm_rejects_malformed(bad):
    with pytest.raises(ValueError):
        tb.parse_hhmm(bad)


@given(st.integers(0, 24 * 60))
def test_format_parse_roundtrip(minutes):
    if minutes == 24 * 60:
        text = "24:00"
    else:
        text = f"{minutes // 60:02d}:{minutes % 60:02d}"
    assert tb.format_hhmm(tb.parse_hhmm(text)) == text


def test_decompose_and_compose():
    day, frac = tb.decompose(12.75)
    assert day == 12 and frac == 0.75
    assert tb.compose(12, 0.75) == 12.75
    assert tb.day_of(6.999999) == 6
    assert tb.decompose(0.0) == (0, 0.0)


@given(st.floats(min_value=0.0, max_value=1e6, allow_nan=False))
def test_decompose_fraction_in_unit_interval(t):
    day, frac = tb.decompose(t)
    assert 0.0 <= frac < 1.0 or math.isclose(day + frac, t)
    assert day + frac == t


def test_weekly_class_layout():
    # day 0 is a Monday; afternoons are the odd indices
    assert tb.weekly_class(0, 0) == 0
    assert tb.weekly_class(0, 1) == 1
    assert tb.weekly_class(6, 1) == 13
    assert tb.weekly_class(7, 0) == 0
    assert tb.weekly_class(9, 1) == 5
    assert tb.weekday(364) == 0


def test_year_of():
    assert tb.year_of(0.0) == 0
    assert tb.year_of(363.999) == 0
    assert tb.year_of(364.0) == 1
    assert tb.year_of(2 * 364.0 + 5.5) == 2
