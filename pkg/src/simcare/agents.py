"""Mutable per-run agent state.

Plain slotted classes, not dataclasses: these sit on the hot path of the
event loop and get created and mutated millions of times per run.
"""

from __future__ import annotations


class Illness:
    """One acute illness episode of one patient."""

    __slots__ = ("family", "seriousness", "duration", "willingness",
                 "followup", "fu_entry", "fu_ci")

    def __init__(self, family: int, seriousness: float, duration,
                 willingness: float, followup):
        self.family = family
        self.seriousness = seriousness
        self.duration = duration        # days; None = cured by first treatment
        self.willingness = willingness  # days the patient will wait for care
        self.followup = followup        # days until aftercare; None = none
        self.fu_entry = None            # live follow-up event, if any
        self.fu_ci = -1                 # considered-index of the treating physician


class Visit:
    """A planned trip to a physician: booked appointment or walk-in attempt.

    Appointment visits double as the booking record: day/half/slot identify
    the reserved slot until the patient arrives and the slot is consumed.
    """

    __slots__ = ("patient", "phys", "ci", "walk_in", "regular", "treat_chronic",
                 "booked_time", "day", "half", "slot", "arr_entry", "arrived",
                 "arr_time", "zeta")

    def __init__(self, patient, phys: int, ci: int, walk_in: bool,
                 regular: bool, treat_chronic: bool, day: int, half: int):
        self.patient = patient
        self.phys = phys
        self.ci = ci                    # index into patient.considered
        self.walk_in = walk_in
        self.regular = regular
        self.treat_chronic = treat_chronic
        self.booked_time = 0.0
        self.day = day
        self.half = half
        self.slot = -1
        self.arr_entry = None
        self.arrived = False
        self.arr_time = 0.0
        self.zeta = 1.0


class Patient:
    __slots__ = ("idx", "health", "age", "avail", "rate",
                 "chronic_fam", "chronic_s", "chronic_omega", "chronic_nu",
                 "considered", "dist", "tau", "r_app", "r_walk", "fam_ci",
                 "acute", "emergency", "appt_acute", "appt_regular",
                 "pursuit", "chronic_fu_entry")

    def __init__(self, idx: int, health: float, age: int, avail: int):
        self.idx = idx
        self.health = health
        self.age = age
        self.avail = avail
        self.rate = 0.0
        self.chronic_fam = -1           # family index, -1 = not chronic
        self.chronic_s = 0.0
        self.chronic_omega = 0.0
        self.chronic_nu = 0.0
        self.considered = []            # physician indices, ascending
        self.dist = []                  # km, aligned with considered
        self.tau = []                   # travel days, aligned with considered
        self.r_app = None               # array('d') appointment ratings
        self.r_walk = None              # array('d') 14 per considered physician
        self.fam_ci = -1                # family physician (chronic only)
        self.acute = []
        self.emergency = False
        self.appt_acute = None
        self.appt_regular = None
        self.pursuit = None             # walk-in Visit currently pursued
        self.chronic_fu_entry = None


class Physician:
    __slots__ = ("idx", "opening", "open_mask", "sessions_week",
                 "book", "queue", "admission",
                 "treating", "close_pending", "session_active",
                 "cur_day", "cur_half", "cur_open", "cur_close",
                 "cur_service", "last_release", "admitted", "released")

    def __init__(self, idx: int, opening: tuple, open_mask: int,
                 sessions_week: list, book, queue, admission):
        self.idx = idx
        self.opening = opening          # 14 x (open_frac, close_frac) | None
        self.open_mask = open_mask
        self.sessions_week = sessions_week  # sorted (cls, open, close)
        self.book = book
        self.queue = queue
        self.admission = admission
        self.treating = None
        self.close_pending = False
        self.session_active = False
        self.cur_day = -1
        self.cur_half = 0
        self.cur_open = 0.0
        self.cur_close = 0.0
        self.cur_service = 0.0
        self.last_release = -1.0
        self.admitted = 0
        self.released = 0
