"""Pluggable physician strategies.

Three independent decision seams, selected per physician by name in the
scenario file:

* appointment strategy: where in the calendar a requested appointment lands
  ("ibfi": earliest feasible slot within a rolling booking horizon);
* admission strategy: whether an arriving patient is let into the waiting
  room ("pt": projects the waiting workload against the time left in the
  session and adapts its service-time estimate);
* treatment strategy: who is called in next and how fast they are served
  ("pfcfs": appointment holders strictly before walk-ins, FIFO within each
  class, with a speed-up once the room gets crowded).

Strategy objects hold per-physician mutable state and live exactly as long
as one run.
"""

from __future__ import annotations

import math
from collections import deque

from .timebase import HOUR

_EPS = 1e-12


class IbfiBook:
    """Appointment book offering the earliest free slot in the window.

    Sessions are cut into fixed slots from the opening time; a trailing
    remainder shorter than one slot is not offered. Sessions are materialised
    lazily: an absent entry means fully free. Offers are non-binding; the
    caller confirms with schedule().
    """

    __slots__ = ("opening", "slot_len", "horizon_days", "slots_per_class", "sessions")

    def __init__(self, opening: tuple, params: dict | None = None):
        params = params or {}
        self.opening = opening
        self.slot_len = float(params.get("slot_minutes", 15.0)) / 1440.0
        self.horizon_days = int(params.get("booking_horizon_days", 140))
        self.slots_per_class = [
            0 if win is None else int((win[1] - win[0]) / self.slot_len + 1e-9)
            for win in opening
        ]
        self.sessions = {}  # day*2+half -> [slot list, free count]

    def find(self, today: int, earliest: float, latest: float,
             avail_mask: int, respect_availability: bool):
        """Earliest free slot with time in [earliest, latest], or None."""
        first_day = int(earliest)
        last_day = int(latest)
        horizon_last = today + self.horizon_days - 1
        if last_day > horizon_last:
            last_day = horizon_last
        slot_len = self.slot_len
        opening = self.opening
        counts = self.slots_per_class
        sessions = self.sessions
        for day in range(first_day, last_day + 1):
            cls_base = (day % 7) * 2
            for half in (0, 1):
                cls = cls_base + half
                n = counts[cls]
                if n == 0:
                    continue
                if respect_availability and not avail_mask >> cls & 1:
                    continue
                base = day + opening[cls][0]
                if earliest <= base:
                    k0 = 0
                else:
                    k0 = math.ceil((earliest - base) / slot_len - _EPS)
                    if k0 >= n:
                        continue
                sess = sessions.get(day * 2 + half)
                if sess is None:
                    t = base + k0 * slot_len
                    if t <= latest + _EPS:
                        return day, half, k0, t
                    continue
                slots, free = sess
                if free == 0:
                    continue
                for k in range(k0, n):
                    t = base + k * slot_len
                    if t > latest + _EPS:
                        break
                    if slots[k] is None:
                        return day, half, k, t
        return None

    def schedule(self, day: int, half: int, slot: int, token) -> None:
        key = day * 2 + half
        sess = self.sessions.get(key)
        if sess is None:
            n = self.slots_per_class[(day % 7) * 2 + half]
            sess = [[None] * n, n]
            self.sessions[key] = sess
        assert sess[0][slot] is None, "slot already booked"
        sess[0][slot] = token
        sess[1] -= 1

    def cancel(self, day: int, half: int, slot: int, token) -> None:
        sess = self.sessions.get(day * 2 + half)
        if sess is None:
            return
        assert sess[0][slot] is token, "cancelling a foreign booking"
        sess[0][slot] = None
        sess[1] += 1

    def upcoming_after(self, day: int, half: int, ref: float) -> int:
        """Booked slots of one session at or after the reference time."""
        sess = self.sessions.get(day * 2 + half)
        if sess is None:
            return 0
        base = day + self.opening[(day % 7) * 2 + half][0]
        slot_len = self.slot_len
        count = 0
        for k, token in enumerate(sess[0]):
            if token is not None and base + k * slot_len >= ref - _EPS:
                count += 1
        return count

    def prune(self, today: int) -> None:
        cutoff = today * 2
        stale = [key for key in self.sessions if key < cutoff]
        for key in stale:
            del self.sessions[key]

    def occupancy(self) -> int:
        return sum(len(slots) - free for slots, free in self.sessions.values())


class PfcfsQueue:
    """Waiting room with appointment priority and FIFO within each class.

    Nobody is called in before the session has opened; once open, the queue
    keeps serving until drained even past closing time (`started` is cleared
    by the engine when the room empties after close). Service speeds up by a
    constant factor while more than `speedup_threshold` patients wait.
    """

    __slots__ = ("started", "q_appointment", "q_walkin",
                 "speedup_threshold", "speedup_factor")

    def __init__(self, params: dict | None = None):
        params = params or {}
        self.started = False
        self.q_appointment = deque()
        self.q_walkin = deque()
        self.speedup_threshold = int(params.get("speedup_threshold", 3))
        self.speedup_factor = float(params.get("speedup_factor", 0.8))

    def add(self, visit) -> None:
        if visit.walk_in:
            self.q_walkin.append(visit)
        else:
            self.q_appointment.append(visit)

    def next(self):
        if not self.started:
            return None
        if self.q_appointment:
            return self.q_appointment.popleft()
        if self.q_walkin:
            return self.q_walkin.popleft()
        return None

    def waiting(self) -> int:
        return len(self.q_appointment) + len(self.q_walkin)

    def speedup(self) -> float:
        """Factor applied to the service time being started; the patient
        just seated is no longer in the waiting count."""
        if self.waiting() > self.speedup_threshold:
            return self.speedup_factor
        return 1.0


class PtAdmission:
    """Admission by projected throughput.

    Appointment holders are admitted while they arrive no later than one
    hour past session close. Walk-ins are admitted while the projected work
    (expected service time x patients ahead of them, waiting plus upcoming
    appointments) strictly fits into the time left until one hour past
    close. The expected service time adapts at session close: up one minute
    when three or more are still waiting, down 20 seconds when the physician
    sits idle despite having turned someone away, never below one second.

    Emergencies never reach this object; the engine admits them outright.
    """

    __slots__ = ("expected_min", "rejected_since_close")

    STEP_UP_MIN = 1.0
    STEP_DOWN_MIN = 1.0 / 3.0
    FLOOR_MIN = 1.0 / 60.0
    CROWDED = 3

    def __init__(self, params: dict | None = None):
        params = params or {}
        self.expected_min = float(params.get("initial_expected_service_min", 7.0))
        self.rejected_since_close = False

    def admit_appointment(self, arrival: float, session_close: float) -> bool:
        return arrival <= session_close + HOUR

    def admit_walkin(self, arrival: float, session_open: float,
                     session_close: float, waiting: int, upcoming: int) -> bool:
        ref = arrival if arrival > session_open else session_open
        budget_min = (session_close + HOUR - ref) * 1440.0
        if self.expected_min * (waiting + upcoming) < budget_min:
            return True
        self.rejected_since_close = True
        return False

    def on_close(self, waiting: int, idle: bool) -> None:
        if waiting >= self.CROWDED:
            self.expected_min += self.STEP_UP_MIN
        elif idle and self.rejected_since_close:
            down = self.expected_min - self.STEP_DOWN_MIN
            self.expected_min = down if down > self.FLOOR_MIN else self.FLOOR_MIN
        self.rejected_since_close = False


APPOINTMENT_STRATEGIES = {"ibfi": IbfiBook}
TREATMENT_STRATEGIES = {"pfcfs": PfcfsQueue}
ADMISSION_STRATEGIES = {"pt": PtAdmission}


def make_appointment_book(name: str, opening: tuple, params: dict):
    return APPOINTMENT_STRATEGIES[name](opening, params)


def make_treatment_queue(name: str, params: dict):
    return TREATMENT_STRATEGIES[name](params)


def make_admission(name: str, params: dict):
    return ADMISSION_STRATEGIES[name](params)
