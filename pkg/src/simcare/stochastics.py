"""Random sampling for simulation runs.

Every run owns exactly one uniform stream (numpy PCG64, seed = base_seed +
run_index) and every sampler below consumes exactly one uniform from it via
an inverse-CDF transform. That makes runs bit-reproducible given the seed and
the documented draw order, independent of threading or platform:

* run initialisation, patients in roster order; per patient: one bernoulli
  per physician 15 km or farther (consideration trial), one uniform per
  considered physician with at least one reachable session (appointment
  rating), one uniform per (considered physician, open weekly session)
  pair (walk-in rating), one exponential gap (first illness onset), one
  uniform for the initial chronic follow-up offset if the patient is chronic;
* afterwards, draws happen strictly in event-processing order. An illness
  event draws family, seriousness, duration (when the family recovers),
  willingness, next gap, in that order. An accepted appointment offer draws
  one punctuality deviation. A walk-in start draws one arrival time. A
  treatment start draws one service time. A recovery that clears the last
  acute illness draws one cancellation bernoulli per pending acute
  appointment.

Uniforms are served from a buffered block so scalar draws stay cheap.
"""

from __future__ import annotations

import math
import statistics

import numpy as np
from scipy.special import betaincinv

_BLOCK = 8192
_EPS = 2.0 ** -53  # inv_cdf rejects exact 0/1; clamp once, probability ~1e-16
_STD_NORMAL = statistics.NormalDist()
_INV_CDF = _STD_NORMAL.inv_cdf
_GAMMA_1_5 = math.sqrt(math.pi) / 2.0  # Gamma(1.5), Weibull shape-2 mean factor

# Service time distributions, in minutes, before the fixed one-minute
# patient-transition add-on. Means land at 8.84 and 5.55 minutes.
SERVICE_APPOINTMENT_MU = 1.82
SERVICE_APPOINTMENT_SIGMA = 0.692
SERVICE_WALKIN_MU = 1.254
SERVICE_WALKIN_SIGMA = 0.723

PUNCTUALITY_MEAN_MIN = -5.0
PUNCTUALITY_SD_MIN = 6.0

WALKIN_ARRIVAL_ALPHA = 1.93
WALKIN_ARRIVAL_BETA = 2.94

DURATION_SIGMA = 0.3
YEAR_DAYS = 364.0


class RngStream:
    """Buffered scalar uniforms from a PCG64 bit generator."""

    __slots__ = ("_gen", "_buf", "_i", "_blocks")

    def __init__(self, seed: int):
        self._gen = np.random.Generator(np.random.PCG64(seed))
        self._buf = self._gen.random(_BLOCK).tolist()
        self._i = 0
        self._blocks = 0

    def uniform(self) -> float:
        i = self._i
        if i >= _BLOCK:
            self._buf = self._gen.random(_BLOCK).tolist()
            self._blocks += 1
            i = 0
        self._i = i + 1
        return self._buf[i]

    @property
    def position(self) -> int:
        """Total uniforms consumed so far."""
        return self._blocks * _BLOCK + self._i


class Samplers:
    """Named distributions over one RngStream; one uniform per call."""

    __slots__ = ("stream",)

    def __init__(self, seed: int):
        self.stream = RngStream(seed)

    # -- raw helpers -------------------------------------------------------

    def uniform(self) -> float:
        return self.stream.uniform()

    def rand(self, width: float) -> float:
        """Uniform on [0, width)."""
        return self.stream.uniform() * width

    def bernoulli(self, p: float) -> bool:
        return self.stream.uniform() < p

    def categorical(self, cumulative: list[float]) -> int:
        """Index into a cumulative-probability table (last entry ~1.0)."""
        u = self.stream.uniform()
        for i, c in enumerate(cumulative):
            if u < c:
                return i
        return len(cumulative) - 1

    # -- domain samplers ---------------------------------------------------

    def illness_gap(self, annual_rate: float) -> float:
        """Days until the next acute illness at a per-364-day-year rate.

        Rate 0 means the patient never falls ill: returns +inf.
        """
        if annual_rate <= 0.0:
            self.stream.uniform()  # keep the draw count shape-independent
            return math.inf
        u = self.stream.uniform()
        gap = -math.log1p(-u) * (YEAR_DAYS / annual_rate)
        return gap if gap > 0.0 else 1e-12

    def seriousness(self, mode: float) -> float:
        """Triangular on [0, 1] with the given mode (patient health)."""
        u = self.stream.uniform()
        if u < mode:
            return math.sqrt(u * mode)
        return 1.0 - math.sqrt((1.0 - u) * (1.0 - mode))

    def duration(self, expected_days: float) -> float:
        """Log-normal illness duration with the given mean, sigma fixed."""
        u = self.stream.uniform()
        if u < _EPS:
            u = _EPS
        elif u > 1.0 - _EPS:
            u = 1.0 - _EPS
        mu = math.log(expected_days) - DURATION_SIGMA * DURATION_SIGMA / 2.0
        return math.exp(mu + DURATION_SIGMA * _INV_CDF(u))

    def willingness(self, expected_days: float) -> float:
        """Weibull shape-2 waiting tolerance with the given mean; 0 stays 0."""
        u = self.stream.uniform()
        if expected_days <= 0.0:
            return 0.0
        scale = expected_days / _GAMMA_1_5
        return scale * math.sqrt(-math.log1p(-u))

    def service_time(self, walk_in: bool) -> float:
        """Consultation length in days, incl. one transition minute."""
        u = self.stream.uniform()
        if u < _EPS:
            u = _EPS
        elif u > 1.0 - _EPS:
            u = 1.0 - _EPS
        if walk_in:
            minutes = math.exp(SERVICE_WALKIN_MU + SERVICE_WALKIN_SIGMA * _INV_CDF(u))
        else:
            minutes = math.exp(SERVICE_APPOINTMENT_MU + SERVICE_APPOINTMENT_SIGMA * _INV_CDF(u))
        return (minutes + 1.0) / 1440.0

    def punctuality(self) -> float:
        """Arrival deviation from the booked time, in days (usually early)."""
        u = self.stream.uniform()
        if u < _EPS:
            u = _EPS
        elif u > 1.0 - _EPS:
            u = 1.0 - _EPS
        minutes = PUNCTUALITY_MEAN_MIN + PUNCTUALITY_SD_MIN * _INV_CDF(u)
        return minutes / 1440.0

    def walkin_arrival(self, lo: float, hi: float) -> float:
        """Beta-distributed arrival time on [lo, hi], skewed early."""
        u = self.stream.uniform()
        frac = float(betaincinv(WALKIN_ARRIVAL_ALPHA, WALKIN_ARRIVAL_BETA, u))
        return lo + (hi - lo) * frac
