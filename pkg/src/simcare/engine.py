"""Discrete-event core: prepared scenario tables, world state, run loop.

Events live in a binary heap keyed (time, sequence); cancellation tombstones
the entry in place. Scheduling into the past is an internal error. The main
loop stops at the first event at or past the horizon; a flush phase then
works off every admitted patient (release chains only, no KPI recording, no
new care requests) so that the admitted/released books balance.

One run = one World; runs differ only in their seed (base + run index), so
any number of runs can execute in parallel processes without changing
results.
"""

from __future__ import annotations

import heapq
import math
import multiprocessing
from array import array

from . import behavior
from .agents import Illness, Patient, Physician
from .geo import pairwise_road_km, travel_days
from .metrics import RunAccumulator, finalize
from .stochastics import Samplers
from .strategies import make_admission, make_appointment_book, make_treatment_queue
from .timebase import HOUR, SECOND, YEAR_DAYS

EV_OPEN, EV_CLOSE, EV_ARRIVAL, EV_RELEASE, EV_FOLLOWUP, EV_ILLNESS, EV_RECOVERY = range(7)

_EVENT_NAMES = ("open", "close", "arrival", "release", "followup", "illness", "recovery")
SHORT_WAIT = 7.0 / 1440.0
LONG_WAIT = 30.0 / 1440.0


class Prepared:
    """Static per-scenario tables, shared read-only by all runs."""

    __slots__ = (
        "n_phys", "n_pat",
        "phys_opening", "phys_open_mask", "phys_sessions_week", "phys_strategies",
        "pat_health", "pat_age", "pat_avail", "pat_rate", "pat_chronic",
        "dist", "tau", "dist_max",
        "age_dur_factor", "age_will_factor", "age_cancel_p",
        "fam_chronic", "fam_w", "fam_d", "fam_n", "fam_ids",
        "acute_cum",
        "chronic_count", "capacity_year", "run_config", "name",
    )

    def __init__(self, sc):
        self.name = sc.meta.get("name", "scenario")
        self.n_phys = len(sc.physicians)
        self.n_pat = len(sc.patients)
        self.run_config = sc.run_config

        self.phys_opening = []
        self.phys_open_mask = []
        self.phys_sessions_week = []
        self.phys_strategies = []
        for ph in sc.physicians:
            self.phys_opening.append(ph.opening)
            mask = 0
            week = []
            for cls, win in enumerate(ph.opening):
                if win is not None:
                    mask |= 1 << cls
                    week.append((cls, win[0], win[1]))
            self.phys_open_mask.append(mask)
            self.phys_sessions_week.append(week)
            self.phys_strategies.append((
                ph.appointment_strategy, ph.admission_strategy,
                ph.treatment_strategy, ph.strategy_params,
            ))

        age_index = {a.id: i for i, a in enumerate(sc.age_classes)}
        fam_index = {f.id: i for i, f in enumerate(sc.families)}
        self.age_dur_factor = [a.duration_factor for a in sc.age_classes]
        self.age_will_factor = [a.willingness_factor for a in sc.age_classes]
        self.age_cancel_p = [a.cancel_probability for a in sc.age_classes]
        self.fam_ids = [f.id for f in sc.families]
        self.fam_chronic = [f.chronic for f in sc.families]
        self.fam_w = [(f.willingness_fn.slope, f.willingness_fn.intercept) for f in sc.families]
        self.fam_d = [None if f.duration_fn is None else (f.duration_fn.slope, f.duration_fn.intercept)
                      for f in sc.families]
        self.fam_n = [None if f.followup_fn is None else (f.followup_fn.slope, f.followup_fn.intercept)
                      for f in sc.families]

        acute_fams = [i for i, f in enumerate(sc.families) if not f.chronic]
        self.acute_cum = []
        for a in sc.age_classes:
            row = sc.acute_mix.get(a.id, {})
            cum = []
            total = 0.0
            for fi in acute_fams:
                total += row.get(sc.families[fi].id, 0.0)
                cum.append(total)
            self.acute_cum.append((cum, acute_fams))

        self.pat_health = [p.health for p in sc.patients]
        self.pat_age = [age_index[p.age_class] for p in sc.patients]
        self.pat_avail = [p.availability_mask for p in sc.patients]
        self.pat_rate = []
        self.pat_chronic = []
        for p in sc.patients:
            age = sc.age_classes[age_index[p.age_class]]
            rate = age.annual_illness_fn(p.health)
            self.pat_rate.append(rate if rate > 0.0 else 0.0)
            if p.chronic is None:
                self.pat_chronic.append(None)
            else:
                self.pat_chronic.append((
                    fam_index[p.chronic.family], p.chronic.seriousness,
                    p.chronic.willingness_days, p.chronic.followup_days,
                ))

        pat_lat = [p.lat for p in sc.patients]
        pat_lon = [p.lon for p in sc.patients]
        ph_lat = [ph.lat for ph in sc.physicians]
        ph_lon = [ph.lon for ph in sc.physicians]
        self.dist = pairwise_road_km(pat_lat, pat_lon, ph_lat, ph_lon)
        self.tau = self.dist / (60.0 * 24.0)
        self.dist_max = float(self.dist.min(axis=1).max()) if self.n_pat else 0.0

        self.chronic_count = sum(1 for c in self.pat_chronic if c is not None)
        self.capacity_year = sc.capacity_hours_per_year()


def next_session_after(week: list, day: int, cls: int):
    """First operated session strictly after (day, its class) -> (day2, half, open_abs)."""
    week_start = day - day % 7
    for c, o, _ in week:
        if c > cls:
            d = week_start + (c >> 1)
            return d, c & 1, d + o
    c, o, _ = week[0]
    d = week_start + 7 + (c >> 1)
    return d, c & 1, d + o


class World:
    """State of one run. Construction performs all roster-order init draws."""

    __slots__ = (
        "pre", "samplers", "acc", "yaccs", "queue", "seq", "now", "today",
        "end", "warmup_t", "kpi_on", "flushing", "patients", "physicians",
        "trace", "debug",
        "booked", "cancelled", "appt_arrivals", "appt_admitted", "appt_rejected",
        "walkin_starts", "walkin_admitted", "walkin_rejected", "pursuit_cancels",
        "illness_onsets", "recoveries", "cured",
    )

    def __init__(self, pre: Prepared, seed: int, warmup_years: float,
                 horizon_years: float, *, per_year: bool = False,
                 trace=None, debug: bool = False, samplers=None):
        self.pre = pre
        self.samplers = samplers if samplers is not None else Samplers(seed)
        self.queue = []
        self.seq = 0
        self.now = -1.0
        self.today = 0
        self.warmup_t = warmup_years * YEAR_DAYS
        self.end = (warmup_years + horizon_years) * YEAR_DAYS
        self.kpi_on = warmup_years == 0.0
        self.flushing = False
        self.trace = trace
        self.debug = debug
        warmup_day = int(math.ceil(self.warmup_t - 1e-9))
        self.acc = RunAccumulator(pre.n_phys, warmup_day)
        if per_year:
            n_years = int(math.ceil(self.end / YEAR_DAYS - 1e-9))
            self.yaccs = [RunAccumulator(pre.n_phys) for _ in range(n_years)]
        else:
            self.yaccs = None

        self.booked = 0
        self.cancelled = 0
        self.appt_arrivals = 0
        self.appt_admitted = 0
        self.appt_rejected = 0
        self.walkin_starts = 0
        self.walkin_admitted = 0
        self.walkin_rejected = 0
        self.pursuit_cancels = 0
        self.illness_onsets = 0
        self.recoveries = 0
        self.cured = 0

        self._build_physicians()
        self._build_patients()

    # -- construction ------------------------------------------------------

    def _build_physicians(self) -> None:
        pre = self.pre
        self.physicians = []
        push = heapq.heappush
        for i in range(pre.n_phys):
            appt_name, adm_name, treat_name, params = pre.phys_strategies[i]
            opening = pre.phys_opening[i]
            ph = Physician(
                i, opening, pre.phys_open_mask[i], pre.phys_sessions_week[i],
                make_appointment_book(appt_name, opening, params),
                make_treatment_queue(treat_name, params),
                make_admission(adm_name, params),
            )
            self.physicians.append(ph)
            cls, o, _ = ph.sessions_week[0]
            day = cls >> 1
            push(self.queue, [day + o, self.seq, EV_OPEN, ph, day * 2 + (cls & 1), True])
            self.seq += 1

    def _build_patients(self) -> None:
        """Roster-order init: consideration sets, ratings, seed events."""
        pre = self.pre
        samplers = self.samplers
        physicians = self.physicians
        dist_max = pre.dist_max
        push = heapq.heappush
        self.patients = []
        for i in range(pre.n_pat):
            p = Patient(i, pre.pat_health[i], pre.pat_age[i], pre.pat_avail[i])
            p.rate = pre.pat_rate[i]
            chronic = pre.pat_chronic[i]
            if chronic is not None:
                p.chronic_fam, p.chronic_s, p.chronic_omega, p.chronic_nu = chronic
            dist_row = pre.dist[i]
            considered = p.considered
            for j in range(pre.n_phys):
                if dist_row[j] < behavior.NEAR_KM:
                    considered.append(j)
                elif samplers.bernoulli(behavior.FAR_CONSIDER_PROB):
                    considered.append(j)
            if not considered:
                considered.append(int(dist_row.argmin()))
            p.dist = [float(dist_row[j]) for j in considered]
            p.tau = [float(pre.tau[i][j]) for j in considered]

            avail = p.avail
            r_app = array("d", bytes(8 * len(considered)))
            for ci, j in enumerate(considered):
                m = (avail & physicians[j].open_mask).bit_count()
                if m:
                    r = 3.0 * m - p.dist[ci] + samplers.rand(2.0 * dist_max) + 100.0
                    r_app[ci] = r if r > 0.0 else 0.0
            p.r_app = r_app
            r_walk = array("d", b"")
            for ci, j in enumerate(considered):
                mask = physicians[j].open_mask
                d = p.dist[ci]
                for cls in range(14):
                    if mask >> cls & 1:
                        r = samplers.rand(dist_max) - d + 100.0
                        r_walk.append(r if r > 0.0 else 0.0)
                    else:
                        r_walk.append(-1.0)
            p.r_walk = r_walk
            if p.chronic_fam >= 0:
                best = 0
                for ci in range(1, len(r_app)):
                    if r_app[ci] > r_app[best]:
                        best = ci
                p.fam_ci = best

            gap = samplers.illness_gap(p.rate)
            if gap != math.inf:
                push(self.queue, [gap, self.seq, EV_ILLNESS, p, None, True])
                self.seq += 1
            if p.chronic_fam >= 0:
                t0 = samplers.uniform() * p.chronic_nu
                entry = [t0, self.seq, EV_FOLLOWUP, p, None, True]
                self.seq += 1
                push(self.queue, entry)
                p.chronic_fu_entry = entry
            self.patients.append(p)

    # -- event plumbing ----------------------------------------------------

    def schedule(self, t: float, kind: int, a, b):
        if t <= self.now:
            raise AssertionError(
                f"scheduling into the past: {_EVENT_NAMES[kind]} at {t} <= now {self.now}")
        entry = [t, self.seq, kind, a, b, True]
        self.seq += 1
        heapq.heappush(self.queue, entry)
        return entry

    def schedule_arrival(self, t: float, visit):
        return self.schedule(t, EV_ARRIVAL, visit, None)

    @staticmethod
    def cancel_event(entry) -> None:
        entry[5] = False
        entry[3] = entry[4] = None

    def rearm_chronic_followup(self, p) -> None:
        """Re-raise a consumed check-up request that lost its visit."""
        p.chronic_fu_entry = self.schedule(self.now + SECOND, EV_FOLLOWUP, p, None)

    def record_access(self, regular: bool, dt: float) -> None:
        if self.kpi_on:
            acc = self.acc
            if regular:
                acc.access_reg_sum += dt
                acc.access_reg_n += 1
            else:
                acc.access_std_sum += dt
                acc.access_std_n += 1
        if self.yaccs is not None:
            acc = self.yaccs[int(self.now / YEAR_DAYS)]
            if regular:
                acc.access_reg_sum += dt
                acc.access_reg_n += 1
            else:
                acc.access_std_sum += dt
                acc.access_std_n += 1

    # -- run loop ----------------------------------------------------------

    def run(self) -> dict:
        queue = self.queue
        pop = heapq.heappop
        end = self.end
        warmup_t = self.warmup_t
        last_t = self.now
        while queue:
            entry = pop(queue)
            if not entry[5]:
                continue
            t = entry[0]
            kind = entry[2]
            if t >= end:
                if not self.flushing:
                    self.flushing = True
                    self.kpi_on = False
                if kind == EV_RELEASE:
                    self.now = t
                    self.process_release(entry[3])
                continue
            assert t >= last_t, "event clock went backwards"
            last_t = t
            self.now = t
            self.today = int(t)
            self.kpi_on = t >= warmup_t
            if kind == EV_ARRIVAL:
                self.process_arrival(entry[3])
            elif kind == EV_RELEASE:
                self.process_release(entry[3])
            elif kind == EV_ILLNESS:
                self.process_illness(entry[3])
            elif kind == EV_FOLLOWUP:
                self.process_followup(entry[3], entry[4])
            elif kind == EV_RECOVERY:
                self.process_recovery(entry[3], entry[4])
            elif kind == EV_OPEN:
                self.process_open(entry[3], entry[4])
            else:
                self.process_close(entry[3], entry[4])
        for ph in self.physicians:
            if ph.session_active:
                self.finalize_session(ph)
        return self._result()

    # -- processors --------------------------------------------------------

    def process_open(self, ph, session_code: int) -> None:
        day, half = divmod(session_code, 2)
        if ph.session_active:
            self.finalize_session(ph)
        cls = (day % 7) * 2 + half
        win = ph.opening[cls]
        ph.cur_day = day
        ph.cur_half = half
        ph.cur_open = day + win[0]
        ph.cur_close = day + win[1]
        ph.cur_service = 0.0
        ph.last_release = -1.0
        ph.session_active = True
        ph.close_pending = False
        ph.queue.started = True
        ph.book.prune(day)
        self.schedule(ph.cur_close + HOUR, EV_CLOSE, ph, session_code)
        nd, nh, nopen = next_session_after(ph.sessions_week, day, cls)
        self.schedule(nopen, EV_OPEN, ph, nd * 2 + nh)
        if self.trace is not None:
            self.trace(f"{self.now:.9f} open phys={ph.idx} day={day} half={half}")
        if ph.treating is None:
            v = ph.queue.next()
            if v is not None:
                self.begin_treatment(ph, v)

    def process_close(self, ph, session_code: int) -> None:
        ph.admission.on_close(ph.queue.waiting(), ph.treating is None)
        if ph.treating is None and ph.queue.waiting() == 0:
            ph.queue.started = False
            ph.close_pending = False
        else:
            ph.close_pending = True
        if self.trace is not None:
            day, half = divmod(session_code, 2)
            self.trace(f"{self.now:.9f} close phys={ph.idx} day={day} half={half}")

    def finalize_session(self, ph) -> None:
        util = ph.cur_service / (ph.cur_close - ph.cur_open + HOUR)
        ot = ph.last_release - (ph.cur_close + HOUR)
        if ot < 0.0:
            ot = 0.0
        self.acc.add_session(ph.idx, ph.cur_day, util, ot)
        if self.yaccs is not None:
            self.yaccs[ph.cur_day // YEAR_DAYS].add_session(ph.idx, ph.cur_day, util, ot)
        ph.session_active = False

    def process_arrival(self, v) -> None:
        now = self.now
        p = v.patient
        ph = self.physicians[v.phys]
        v.arr_time = now
        if v.walk_in:
            if p.pursuit is v:
                v.arrived = True
        else:
            # the reservation is used up whether or not admission follows
            ph.book.cancel(v.day, v.half, v.slot, v)
            if v.regular:
                p.appt_regular = None
            else:
                p.appt_acute = None
            self.appt_arrivals += 1
        kpi = self.kpi_on
        yacc = None if self.yaccs is None else self.yaccs[int(now / YEAR_DAYS)]
        d = p.dist[v.ci]
        if kpi:
            self.acc.dist_sum += d
            self.acc.dist_n += 1
        if yacc is not None:
            yacc.dist_sum += d
            yacc.dist_n += 1

        win = ph.opening[(v.day % 7) * 2 + v.half]
        o_abs = v.day + win[0]
        c_abs = v.day + win[1]
        if p.emergency:
            admitted = True
        elif v.walk_in:
            admitted = ph.admission.admit_walkin(
                now, o_abs, c_abs, ph.queue.waiting(),
                ph.book.upcoming_after(v.day, v.half, now if now > o_abs else o_abs))
        else:
            admitted = ph.admission.admit_appointment(now, c_abs)
        if self.trace is not None:
            mode = "walkin" if v.walk_in else ("regular" if v.regular else "appt")
            self.trace(f"{now:.9f} arrival patient={p.idx} phys={ph.idx} "
                       f"mode={mode} admitted={admitted}")
        if admitted:
            ph.admitted += 1
            if v.walk_in:
                self.walkin_admitted += 1
            else:
                self.appt_admitted += 1
                ontime = now <= v.booked_time + 1e-9
                if kpi:
                    self.acc.appt_arrivals += 1
                    if ontime:
                        self.acc.ontime_n += 1
                if yacc is not None:
                    yacc.appt_arrivals += 1
                    if ontime:
                        yacc.ontime_n += 1
            ph.queue.add(v)
            if ph.treating is None:
                nxt = ph.queue.next()
                if nxt is not None:
                    self.begin_treatment(ph, nxt)
        else:
            if v.walk_in:
                self.walkin_rejected += 1
                if kpi:
                    self.acc.n_rej_walk += 1
                if yacc is not None:
                    yacc.n_rej_walk += 1
            else:
                self.appt_rejected += 1
                if kpi:
                    self.acc.n_rej_appt += 1
                if yacc is not None:
                    yacc.n_rej_appt += 1
            behavior.handle_rejection(self, p, v)

    def begin_treatment(self, ph, v) -> None:
        if self.debug:
            assert ph.treating is None, "physician already busy"
        now = self.now
        p = v.patient
        zeta = ph.queue.speedup()
        v.zeta = zeta
        service = self.samplers.service_time(v.walk_in) * zeta
        if not self.flushing:
            kpi = self.kpi_on
            yacc = None if self.yaccs is None else self.yaccs[int(now / YEAR_DAYS)]
            if v.walk_in:
                wait = now - v.arr_time
                if kpi:
                    acc = self.acc
                    acc.n_treat_walk += 1
                    acc.wait_walk_sum += wait
                if yacc is not None:
                    yacc.n_treat_walk += 1
                    yacc.wait_walk_sum += wait
                if wait < SHORT_WAIT:
                    behavior.adjust_walk_rating(p, v.ci, (v.day % 7) * 2 + v.half,
                                                behavior.SHORT_WAIT_BONUS)
                elif wait > LONG_WAIT:
                    behavior.adjust_walk_rating(p, v.ci, (v.day % 7) * 2 + v.half,
                                                -behavior.LONG_WAIT_MALUS)
            else:
                base = v.booked_time if v.booked_time > v.arr_time else v.arr_time
                wait = now - base
                if wait < 0.0:
                    wait = 0.0
                if kpi:
                    acc = self.acc
                    if v.regular:
                        acc.n_treat_reg += 1
                    else:
                        acc.n_treat_appt += 1
                    acc.wait_appt_sum += wait
                if yacc is not None:
                    if v.regular:
                        yacc.n_treat_reg += 1
                    else:
                        yacc.n_treat_appt += 1
                    yacc.wait_appt_sum += wait
                if wait < SHORT_WAIT:
                    behavior.adjust_app_rating(p, v.ci, behavior.SHORT_WAIT_BONUS)
                elif wait > LONG_WAIT:
                    behavior.adjust_app_rating(p, v.ci, -behavior.LONG_WAIT_MALUS)
            if self.trace is not None:
                self.trace(f"{now:.9f} treat patient={p.idx} phys={ph.idx} "
                           f"wait_min={wait * 1440.0:.3f} zeta={zeta}")
        ph.cur_service += service
        ph.treating = v
        self.schedule(now + service, EV_RELEASE, ph, None)

    def process_release(self, ph) -> None:
        now = self.now
        v = ph.treating
        ph.treating = None
        ph.last_release = now
        ph.released += 1
        p = v.patient
        if not self.flushing:
            if self.trace is not None:
                self.trace(f"{now:.9f} release patient={p.idx} phys={ph.idx}")
            chronic_treated = v.treat_chronic and p.chronic_fam >= 0
            if v.walk_in:
                behavior.adjust_walk_rating(p, v.ci, (v.day % 7) * 2 + v.half,
                                            behavior.TREATED_WALKIN_BONUS * v.zeta)
            else:
                behavior.adjust_app_rating(p, v.ci, behavior.TREATED_APPOINTMENT_BONUS * v.zeta)
            ill_min = None
            for ill in list(p.acute):
                if ill.fu_entry is not None:
                    self.cancel_event(ill.fu_entry)
                    ill.fu_entry = None
                if ill.duration is None:
                    p.acute.remove(ill)  # one-off, dealt with by this visit
                    self.cured += 1
                elif ill.followup is not None:
                    ill.fu_ci = v.ci
                    ill.fu_entry = self.schedule(now + ill.followup, EV_FOLLOWUP, p, ill)
                    if ill_min is None or ill.followup < ill_min.followup:
                        ill_min = ill
            if chronic_treated:
                if p.chronic_fu_entry is not None:
                    self.cancel_event(p.chronic_fu_entry)
                p.chronic_fu_entry = self.schedule(now + p.chronic_nu, EV_FOLLOWUP, p, None)
            p.emergency = False
            if p.pursuit is v:
                p.pursuit = None
            elif p.pursuit is not None and not p.pursuit.arrived:
                tc = p.pursuit.treat_chronic
                self.cancel_event(p.pursuit.arr_entry)
                p.pursuit = None
                self.pursuit_cancels += 1
                if tc and not chronic_treated and p.chronic_fu_entry is None:
                    self.rearm_chronic_followup(p)
            if p.pursuit is None:
                if chronic_treated:
                    behavior.request_regular(self, p, urgent=False)
                if ill_min is not None:
                    behavior.request_followup(self, p, ill_min.fu_ci, ill_min, urgent=False)
        nxt = ph.queue.next()
        if nxt is not None:
            self.begin_treatment(ph, nxt)
        elif ph.close_pending and ph.queue.waiting() == 0:
            ph.queue.started = False
            ph.close_pending = False

    def process_illness(self, p) -> None:
        s = self.samplers
        pre = self.pre
        now = self.now
        self.illness_onsets += 1
        if self.kpi_on:
            self.acc.n_illness += 1
        if self.yaccs is not None:
            self.yaccs[int(now / YEAR_DAYS)].n_illness += 1
        cum, fams = pre.acute_cum[p.age]
        fam = fams[s.categorical(cum)]
        sr = s.seriousness(p.health)
        dfn = pre.fam_d[fam]
        duration = None
        if dfn is not None:
            duration = s.duration(pre.age_dur_factor[p.age] * (dfn[0] * sr + dfn[1]))
        wfn = pre.fam_w[fam]
        willingness = s.willingness(pre.age_will_factor[p.age] * (wfn[0] * sr + wfn[1]))
        nfn = pre.fam_n[fam]
        followup = None if nfn is None else nfn[0] * sr + nfn[1]
        ill = Illness(fam, sr, duration, willingness, followup)
        p.acute.append(ill)
        if self.trace is not None:
            self.trace(f"{now:.9f} illness patient={p.idx} family={pre.fam_ids[fam]} "
                       f"s={sr:.4f}")
        if duration is not None:
            self.schedule(now + duration, EV_RECOVERY, p, ill)
        gap = s.illness_gap(p.rate)
        if gap != math.inf:
            self.schedule(now + gap, EV_ILLNESS, p, None)
        if p.pursuit is None:
            if not behavior.request_acute(self, p, ill):
                behavior.start_walkin(self, p, ill.willingness, False)

    def process_recovery(self, p, ill) -> None:
        self.recoveries += 1
        p.acute.remove(ill)
        if ill.fu_entry is not None:
            self.cancel_event(ill.fu_entry)
            ill.fu_entry = None
        if self.trace is not None:
            self.trace(f"{self.now:.9f} recovery patient={p.idx} "
                       f"family={self.pre.fam_ids[ill.family]}")
        if not p.acute:
            p.emergency = False
            a = p.appt_acute
            if a is not None and self.samplers.bernoulli(self.pre.age_cancel_p[p.age]):
                behavior.cancel_appointment(self, p, a)
            v = p.pursuit
            if v is not None and not v.treat_chronic and not v.arrived:
                self.cancel_event(v.arr_entry)
                p.pursuit = None
                self.pursuit_cancels += 1

    def process_followup(self, p, ill) -> None:
        if ill is None:
            p.chronic_fu_entry = None
            if self.trace is not None:
                self.trace(f"{self.now:.9f} followup patient={p.idx} chronic")
            if p.pursuit is not None:
                # the pending walk-in absorbs the need; make it address it
                p.pursuit.treat_chronic = True
                return
            if not behavior.request_regular(self, p, urgent=True):
                behavior.start_walkin(self, p, p.chronic_omega, True)
        else:
            ill.fu_entry = None
            if self.trace is not None:
                self.trace(f"{self.now:.9f} followup patient={p.idx} "
                           f"family={self.pre.fam_ids[ill.family]}")
            if p.pursuit is not None:
                return
            if not behavior.request_followup(self, p, ill.fu_ci, ill, urgent=True):
                behavior.start_walkin(self, p, ill.followup / 5.0 + 1.0, False)

    # -- results -----------------------------------------------------------

    def _result(self) -> dict:
        pre = self.pre
        horizon_years = (self.end - self.warmup_t) / YEAR_DAYS
        indicators = finalize(self.acc, pre.n_phys, pre.chronic_count,
                              pre.capacity_year * horizon_years)
        yearly = None
        if self.yaccs is not None:
            yearly = [finalize(acc, pre.n_phys, pre.chronic_count, pre.capacity_year)
                      for acc in self.yaccs]
        pending_appts = 0
        pending_walkins = 0
        active = 0
        min_rating = math.inf
        for p in self.patients:
            if p.appt_acute is not None:
                pending_appts += 1
            if p.appt_regular is not None:
                pending_appts += 1
            if p.pursuit is not None and not p.pursuit.arrived:
                pending_walkins += 1
            active += len(p.acute)
            if len(p.r_app):
                m = min(p.r_app)
                if m < min_rating:
                    min_rating = m
        audit = {
            "bookings": self.booked,
            "cancellations": self.cancelled,
            "appointment_arrivals": self.appt_arrivals,
            "pending_appointments": pending_appts,
            "appointment_admitted": self.appt_admitted,
            "appointment_rejected": self.appt_rejected,
            "walkin_starts": self.walkin_starts,
            "walkin_admitted": self.walkin_admitted,
            "walkin_rejected": self.walkin_rejected,
            "walkin_pending": pending_walkins,
            "pursuit_cancelled": self.pursuit_cancels,
            "admitted": sum(ph.admitted for ph in self.physicians),
            "released": sum(ph.released for ph in self.physicians),
            "in_treatment_at_end": sum(1 for ph in self.physicians if ph.treating is not None),
            "waiting_at_end": sum(ph.queue.waiting() for ph in self.physicians),
            "illness_onsets": self.illness_onsets,
            "recoveries": self.recoveries,
            "cured_by_visit": self.cured,
            "active_illnesses": active,
            "min_appointment_rating": min_rating if min_rating != math.inf else 0.0,
        }
        if self.debug:
            assert audit["admitted"] == audit["released"], audit
            assert audit["in_treatment_at_end"] == 0, audit
            assert audit["waiting_at_end"] == 0, audit
            assert audit["bookings"] == (audit["cancellations"] + audit["appointment_arrivals"]
                                         + audit["pending_appointments"]), audit
            assert audit["walkin_starts"] == (audit["walkin_admitted"] + audit["walkin_rejected"]
                                              + audit["pursuit_cancelled"] + audit["walkin_pending"]), audit
            assert audit["illness_onsets"] == (audit["recoveries"] + audit["cured_by_visit"]
                                               + audit["active_illnesses"]), audit
            assert audit["min_appointment_rating"] >= 0.0, audit
        result = {"indicators": indicators, "audit": audit}
        if yearly is not None:
            result["yearly"] = yearly
        return result


def simulate_run(pre: Prepared, run_index: int, *, base_seed: int,
                 warmup_years: float, horizon_years: float,
                 per_year: bool = False, trace=None, debug: bool = False,
                 samplers=None) -> dict:
    world = World(pre, base_seed + run_index, warmup_years, horizon_years,
                  per_year=per_year, trace=trace, debug=debug, samplers=samplers)
    result = world.run()
    result["run"] = run_index
    result["seed"] = base_seed + run_index
    return result


_FORK_STATE: dict = {}


def _run_forked(run_index: int) -> dict:
    return simulate_run(_FORK_STATE["pre"], run_index, **_FORK_STATE["kw"])


def run_many(pre: Prepared, runs: int, threads: int, *, base_seed: int,
             warmup_years: float, horizon_years: float,
             per_year: bool = False, debug: bool = False) -> list[dict]:
    """Execute `runs` independent runs, up to `threads` at a time.

    Results are ordered by run index and independent of `threads`.
    """
    kw = dict(base_seed=base_seed, warmup_years=warmup_years,
              horizon_years=horizon_years, per_year=per_year, debug=debug)
    if threads <= 1 or runs == 1:
        return [simulate_run(pre, i, **kw) for i in range(runs)]
    _FORK_STATE["pre"] = pre
    _FORK_STATE["kw"] = kw
    try:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(min(threads, runs)) as pool:
            return pool.map(_run_forked, range(runs), chunksize=1)
    finally:
        _FORK_STATE.clear()
