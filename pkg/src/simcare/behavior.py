"""Patient decision making: ratings, appointment requests, walk-in targeting.

All functions take the run `world` (see engine.World) and mutate patient and
physician state through it. Patients request care half an hour of lead time
plus travel after the triggering moment, accept the first offer inside their
waiting tolerance, and fall back to walking in when nobody books them.

Rating bookkeeping: every appointment-rating change of a chronic patient can
shift their family physician (they switch when some other practice rates at
least 20 percent better). Walk-in ratings are kept per weekly session.
"""

from __future__ import annotations

from .agents import Visit
from .timebase import HALF_HOUR, QUARTER_HOUR, SECOND

OFFER_ACCEPT_BONUS = 4.0
TREATED_APPOINTMENT_BONUS = 2.0
TREATED_WALKIN_BONUS = 3.0
SHORT_WAIT_BONUS = 5.0
LONG_WAIT_MALUS = 10.0
REJECT_WALKIN_MALUS = 10.0
REJECT_APPOINTMENT_MALUS = 20.0
SWITCH_FACTOR = 1.2
EXISTING_APPT_GRACE = 0.5        # half a day past the window still counts
SESSION_END_DISCOUNT = 0.95      # per day of lead time, walk-in targeting
NEAR_KM = 15.0
FAR_CONSIDER_PROB = 0.05


def adjust_app_rating(p, ci: int, delta: float) -> None:
    r = p.r_app[ci] + delta
    p.r_app[ci] = r if r > 0.0 else 0.0
    if p.chronic_fam >= 0:
        reevaluate_family(p)


def adjust_walk_rating(p, ci: int, cls: int, delta: float) -> None:
    i = ci * 14 + cls
    r = p.r_walk[i] + delta
    p.r_walk[i] = r if r > 0.0 else 0.0


def reevaluate_family(p) -> None:
    """Switch the family physician when another one rates clearly higher."""
    r_app = p.r_app
    best = 0
    best_r = r_app[0]
    for i in range(1, len(r_app)):
        if r_app[i] > best_r:
            best_r = r_app[i]
            best = i
    if best != p.fam_ci and best_r >= SWITCH_FACTOR * r_app[p.fam_ci]:
        p.fam_ci = best


def book_appointment(world, p, ci: int, earliest: float, latest: float,
                     regular: bool, treat_chronic: bool):
    """Single booking attempt with one physician; returns the Visit or None.

    On success the offer bonus is applied, the arrival event (booked time
    plus punctuality deviation) is scheduled, and the access time recorded.
    """
    phys_idx = p.considered[ci]
    ph = world.physicians[phys_idx]
    omega = latest - earliest
    offer = ph.book.find(world.today, earliest, latest, p.avail, omega > 3.0)
    if offer is None:
        return None
    day, half, slot, t_slot = offer
    v = Visit(p, phys_idx, ci, False, regular, treat_chronic, day, half)
    v.slot = slot
    v.booked_time = t_slot
    ph.book.schedule(day, half, slot, v)
    arr = t_slot + world.samplers.punctuality()
    if arr <= world.now:
        arr = world.now + SECOND
    v.arr_entry = world.schedule_arrival(arr, v)
    if regular:
        p.appt_regular = v
    else:
        p.appt_acute = v
    world.booked += 1
    world.record_access(regular, t_slot - earliest)
    adjust_app_rating(p, ci, OFFER_ACCEPT_BONUS)
    return v


def cancel_appointment(world, p, v) -> None:
    world.physicians[v.phys].book.cancel(v.day, v.half, v.slot, v)
    world.cancel_event(v.arr_entry)
    world.cancelled += 1
    if v.regular:
        p.appt_regular = None
    else:
        p.appt_acute = None
    if v.treat_chronic and p.chronic_fam >= 0 and p.chronic_fu_entry is None:
        # the check-up this visit would have covered is still due
        world.rearm_chronic_followup(p)


def request_acute(world, p, illness) -> bool:
    """Arrange care for a fresh illness; True when an appointment covers it.

    An existing appointment soon enough already counts. Otherwise the two
    highest-rated practices are asked, in order, for a slot within the
    patient's waiting tolerance; a refusal costs the physician omega rating
    points. A still-pending acute appointment is given up before rebooking.
    """
    now = world.now
    omega = illness.willingness
    tau = p.tau
    for v in (p.appt_acute, p.appt_regular):
        if v is not None and v.booked_time <= now + HALF_HOUR + tau[v.ci] + omega + EXISTING_APPT_GRACE:
            return True
    if p.appt_acute is not None:
        cancel_appointment(world, p, p.appt_acute)
    r_app = p.r_app
    n = len(r_app)
    first = 0
    for i in range(1, n):
        if r_app[i] > r_app[first]:
            first = i
    second = -1
    for i in range(n):
        if i == first:
            continue
        if second < 0 or r_app[i] > r_app[second]:
            second = i
    targets = (first,) if second < 0 else (first, second)
    for ci in targets:
        t_i = now + HALF_HOUR + tau[ci]
        if book_appointment(world, p, ci, t_i, t_i + omega, False, False) is not None:
            return True
        adjust_app_rating(p, ci, -omega)
    return False


def request_followup(world, p, ci: int, illness, urgent: bool) -> bool:
    """Aftercare with the physician who treated the illness.

    Immediately after treatment (urgent=False) the target window opens a
    full follow-up interval later; when the follow-up moment has actually
    arrived (urgent=True) the window starts as soon as the patient can get
    there.
    """
    now = world.now
    nu = illness.followup
    omega = nu / 5.0 + 1.0
    tau = p.tau
    for v in (p.appt_acute, p.appt_regular):
        if v is not None:
            t_v = now + HALF_HOUR + tau[v.ci] if urgent else now + nu
            if v.booked_time <= t_v + omega + EXISTING_APPT_GRACE:
                return True
    if p.appt_acute is not None:
        cancel_appointment(world, p, p.appt_acute)
    earliest = now + HALF_HOUR + tau[ci] if urgent else now + nu
    if book_appointment(world, p, ci, earliest, earliest + omega, False, False) is not None:
        return True
    adjust_app_rating(p, ci, -omega)
    return False


def request_regular(world, p, urgent: bool) -> bool:
    """Chronic check-up with the family physician.

    An existing regular appointment always satisfies the request; an acute
    one only when it is with the family physician and soon enough. When a
    fresh regular booking lands no later than half a day after a pending
    acute appointment, the acute one becomes redundant and is cancelled.
    """
    now = world.now
    omega = p.chronic_omega
    fam = p.fam_ci
    if p.appt_regular is not None:
        return True
    a = p.appt_acute
    if a is not None and a.ci == fam:
        t_v = now + HALF_HOUR + p.tau[fam] if urgent else now + p.chronic_nu
        if a.booked_time <= t_v + omega + EXISTING_APPT_GRACE:
            a.treat_chronic = True
            return True
    earliest = now + HALF_HOUR + p.tau[fam] if urgent else now + p.chronic_nu
    v = book_appointment(world, p, fam, earliest, earliest + omega, True, True)
    if v is not None:
        a = p.appt_acute
        if a is not None and v.booked_time <= a.booked_time + EXISTING_APPT_GRACE:
            cancel_appointment(world, p, a)
        return True
    adjust_app_rating(p, fam, -omega)
    return False


def start_walkin(world, p, omega: float, treat_chronic: bool) -> None:
    """Pick a walk-in target session and schedule the arrival.

    Candidate sessions must start at most a quarter hour after the reachable
    window [t_phi, t_phi + omega] ends and must not close before the patient
    can be there. Sessions score by walk-in rating discounted per day of
    lead time until session end; the window widens day by day until some
    session qualifies. Arrival lands beta-distributed inside the overlap,
    skewed towards the session start.
    """
    now = world.now
    considered = p.considered
    physicians = world.physicians
    r_walk = p.r_walk
    tau = p.tau
    best_score = -1.0
    best = None
    while best is None:
        for ci in range(len(considered)):
            ph = physicians[considered[ci]]
            t_phi = now + HALF_HOUR + tau[ci]
            opening = ph.opening
            base = ci * 14
            reach_end = t_phi + omega
            for day in range(int(t_phi), int(reach_end) + 1):
                cls0 = (day % 7) * 2
                for half in (0, 1):
                    win = opening[cls0 + half]
                    if win is None:
                        continue
                    o_abs = day + win[0]
                    if o_abs - QUARTER_HOUR > reach_end:
                        continue
                    c_abs = day + win[1]
                    if t_phi > c_abs:
                        continue
                    score = r_walk[base + cls0 + half] * SESSION_END_DISCOUNT ** (c_abs - t_phi)
                    if score > best_score:
                        best_score = score
                        best = (ci, day, half, o_abs, c_abs, t_phi)
        if best is None:
            omega += 1.0
    ci, day, half, o_abs, c_abs, t_phi = best
    lo = o_abs - QUARTER_HOUR
    if lo < t_phi:
        lo = t_phi
    hi = t_phi + omega
    if hi > c_abs:
        hi = c_abs
    arrival = world.samplers.walkin_arrival(lo, hi)
    v = Visit(p, considered[ci], ci, True, False, treat_chronic, day, half)
    v.arr_entry = world.schedule_arrival(arrival, v)
    p.pursuit = v
    world.walkin_starts += 1


def handle_rejection(world, p, v) -> None:
    """Turned away at the door: mark the emergency and retry immediately."""
    if v.walk_in:
        adjust_walk_rating(p, v.ci, (v.day % 7) * 2 + v.half, -REJECT_WALKIN_MALUS)
    else:
        adjust_app_rating(p, v.ci, -REJECT_APPOINTMENT_MALUS)
    p.emergency = True
    treat_chronic = v.treat_chronic
    if p.pursuit is v:
        p.pursuit = None
    elif p.pursuit is not None and not p.pursuit.arrived:
        treat_chronic = treat_chronic or p.pursuit.treat_chronic
        world.cancel_event(p.pursuit.arr_entry)
        world.pursuit_cancels += 1
        p.pursuit = None
    start_walkin(world, p, 0.0, treat_chronic)
