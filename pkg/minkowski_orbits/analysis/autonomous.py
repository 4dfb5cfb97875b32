'''
The autonomous problem q = 1: travel times, the periodic approximants
through (zeta(gamma), 0), the homoclinic and balanced heteroclinic orbits, and
the piecewise-linear profiles they collapse to as delta goes to 0.
'''

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np
from scipy import integrate

from minkowski_orbits.analysis.dynamics import (Direction, EventSpec,
                                                PhaseState, Termination,
                                                equilibrium_segment,
                                                integrate_t, phi)
from minkowski_orbits.analysis.nonlinearity import zeta
from minkowski_orbits.analysis.weight import WeightProfile
from minkowski_orbits.exceptions import DomainError

QUADRATURE_TOLERANCE = 1e-9
QUADRATURE_LIMIT = 400
_MIDPOINT_SPAN = 1e-6
_THETA_GUARD = 1e-12
HOMOCLINIC_WINDOW = 20.0


def _depth_above(n, base, v):
    '''
        F(base) - F(v) for v near base, without cancellation.
    '''
    d = v - base
    if abs(d) < _MIDPOINT_SPAN:
        return -n.f(base + 0.5 * d) * d
    return n.F(base) - n.F(v)


def _time_density(depth, delta):
    '''
        dt/dv on a monotone branch whose potential sits depth below its turning level.
    '''
    return (delta + depth) / math.sqrt(depth * (depth + 2.0 * delta))


def _sin2_integral(integrand, lo, hi):
    span = hi - lo

    def transformed(theta):
        theta = min(max(theta, _THETA_GUARD), 0.5 * math.pi - _THETA_GUARD)
        s, c = math.sin(theta), math.cos(theta)
        return integrand(lo + span * s * s, span * s * s, span * c * c) * 2.0 * span * s * c

    value, _ = integrate.quad(transformed, 0.0, 0.5 * math.pi, epsabs=QUADRATURE_TOLERANCE,
                              epsrel=QUADRATURE_TOLERANCE, limit=QUADRATURE_LIMIT)
    return value


def period_T(n, gamma, delta):
    '''
        Half-period T_{gamma,delta} of the periodic orbit oscillating between
        gamma and zeta(gamma).
    '''
    n.require_structure()
    if not 0.0 < gamma < n.alpha:
        raise DomainError(f"gamma must lie in ]0, alpha[ = ]0, {n.alpha!r}[, got {gamma!r}")
    if not delta > 0.0:
        raise DomainError(f"delta must be positive, got {delta!r}")
    top = zeta(n, gamma)

    def integrand(v, from_low, from_top):
        if from_low <= from_top:
            depth = _depth_above(n, gamma, v)
        else:
            depth = _depth_above(n, top, v)
        return _time_density(max(depth, 1e-300), delta)

    return _sin2_integral(integrand, gamma, top)


def travel_time_truncated(n, delta, v_lo, v_hi):
    '''
        Time the homoclinic orbit spends going from v_hi down to v_lo. It
        diverges logarithmically as v_lo goes to 0.
    '''
    n.require_structure()
    if not 0.0 < v_lo < v_hi <= n.v0:
        raise DomainError(f"need 0 < v_lo < v_hi <= v0 = {n.v0!r}, got [{v_lo!r}, {v_hi!r}]")
    if not delta > 0.0:
        raise DomainError(f"delta must be positive, got {delta!r}")

    def density(v):
        depth = _depth_above(n, n.v0, v) if n.v0 - v < _MIDPOINT_SPAN else -n.F(v)
        return _time_density(max(depth, 1e-300), delta)

    middle = v_hi / 2.0 if v_lo < v_hi / 2.0 else 0.5 * (v_lo + v_hi)
    lower = 0.0
    if v_lo < middle:
        lower, _ = integrate.quad(lambda u: density(math.exp(u)) * math.exp(u),
                                  math.log(v_lo), math.log(middle),
                                  epsabs=QUADRATURE_TOLERANCE, epsrel=QUADRATURE_TOLERANCE,
                                  limit=QUADRATURE_LIMIT)
    upper = _sin2_integral(lambda v, from_low, from_top: density(v), middle, v_hi)
    return lower + upper


def _symmetric_orbit(n, delta, start, window, events):
    unit = WeightProfile.constant(1.0)
    forward = integrate_t(n, unit, delta, start, Direction.FORWARD, events, t_max=window)
    backward = integrate_t(n, unit, delta, start, Direction.BACKWARD, events, t_max=window)
    return backward.joined(forward)


def autonomous_special_orbit(n, delta, gamma, window=None):
    '''
        The orbit through (zeta(gamma), 0) at t = 0, integrated over
        [-window, window]. For gamma = 0 this is the homoclinic through
        (v0, 0), cut where it enters the equilibrium ball or turns back.
        In the balanced case with gamma = 0 the orbit is the constant 1 and is
        returned flagged degenerate-constant.
    '''
    n.require_structure()
    if not 0.0 <= gamma < n.alpha:
        raise DomainError(f"gamma must lie in [0, alpha[, got {gamma!r}")
    top = zeta(n, gamma)
    start = PhaseState(0.0, top, 0.0)
    if gamma == 0.0 and n.is_balanced:
        span = window or HOMOCLINIC_WINDOW
        return equilibrium_segment(start, (-span, span))
    if gamma > 0.0:
        window = window or 4.0 * period_T(n, gamma, delta)
        events = [EventSpec.w_zero(terminal=False)]
    else:
        window = window or HOMOCLINIC_WINDOW
        events = [EventSpec.equilibrium(), EventSpec.w_zero(), EventSpec.v_level(0.0, direction=-1)]
    return _symmetric_orbit(n, delta, start, window, events)


def heteroclinic_ic(n, delta, gamma=0.0):
    '''
        State at t = 0 on the level F(gamma)/delta crossing v = alpha, for a
        balanced f. Its slope d solves 1/sqrt(1 - d^2) = 1 + (F(gamma) - F(alpha))/delta.
    '''
    n.require_structure()
    if not n.is_balanced:
        raise DomainError("heteroclinic_ic needs a balanced nonlinearity, F(1) = 0")
    if not 0.0 <= gamma < n.alpha:
        raise DomainError(f"gamma must lie in [0, alpha[, got {gamma!r}")
    lorentz = 1.0 + (n.F(gamma) - n.F(n.alpha)) / delta
    slope = math.sqrt(1.0 - 1.0 / (lorentz * lorentz))
    return PhaseState(0.0, n.alpha, float(phi(slope)))


def autonomous_heteroclinic_orbit(n, delta, gamma=0.0, window=HOMOCLINIC_WINDOW):
    start = heteroclinic_ic(n, delta, gamma)
    events = [EventSpec.equilibrium(), EventSpec.w_zero()]
    return _symmetric_orbit(n, delta, start, window, events)


class LimitScenario(Enum):
    GAMMA0_DELTA0 = 'gamma0-delta0'
    FIXED_GAMMA_DELTA0 = 'fixed-gamma-delta0'
    DELTA0_GAMMA0 = 'delta0-gamma0'
    BALANCED_HETEROCLINIC = 'balanced-heteroclinic'


@dataclass
class LimitProfile:
    '''
        Continuous piecewise-linear profile. slopes has one entry per
        interval cut by the breakpoints, the two unbounded ones included. A
        periodic profile repeats its window [breakpoints[0], breakpoints[-1]].
    '''
    breakpoints: list
    slopes: list
    periodic: Optional[float] = None
    anchor: tuple = (0.0, 0.0)
    _base: float = field(init=False, repr=False)

    def __post_init__(self):
        if len(self.slopes) != len(self.breakpoints) + 1:
            raise DomainError("a limit profile needs one slope per interval")
        if any(b <= a for a, b in zip(self.breakpoints, self.breakpoints[1:])):
            raise DomainError("limit profile breakpoints must increase")
        if self.periodic is not None:
            window = self.breakpoints[-1] - self.breakpoints[0]
            if abs(window - self.periodic) > 1e-12 * max(1.0, self.periodic):
                raise DomainError("a periodic profile must span exactly one period")
        t_a, v_a = self.anchor
        self._base = v_a - self._rise(self.breakpoints[0], self._reduce(t_a))

    def _reduce(self, t):
        if self.periodic is None:
            return t
        start = self.breakpoints[0]
        return start + (t - start) % self.periodic

    def _rise(self, a, b):
        '''
            Integral of the slope from a to b.
        '''
        sign = 1.0
        if b < a:
            a, b, sign = b, a, -1.0
        knots = [-math.inf] + list(self.breakpoints) + [math.inf]
        total = 0.0
        for slope, lo, hi in zip(self.slopes, knots, knots[1:]):
            overlap = min(b, hi) - max(a, lo)
            if overlap > 0.0 and slope:
                total += slope * overlap
        return sign * total

    def evaluate(self, t):
        if np.ndim(t):
            return np.array([self.evaluate(float(s)) for s in np.ravel(t)]).reshape(np.shape(t))
        return self._base + self._rise(self.breakpoints[0], self._reduce(float(t)))

    __call__ = evaluate

    def slope_at(self, t):
        t = self._reduce(t)
        return self.slopes[bisect_right(self.breakpoints, t)]

    def to_dict(self):
        return {'breakpoints': list(self.breakpoints), 'slopes': list(self.slopes),
                'periodic': self.periodic, 'anchor': list(self.anchor)}


def limit_profile_autonomous(n, scenario, gamma=None):
    n.require_structure()
    scenario = LimitScenario(scenario)
    v0, alpha = n.v0, n.alpha
    if scenario == LimitScenario.GAMMA0_DELTA0:
        if n.is_balanced:
            raise DomainError("the tent profile needs F(1) > 0")
        return LimitProfile([-v0, 0.0, v0], [0, 1, -1, 0], anchor=(0.0, v0))
    if scenario == LimitScenario.FIXED_GAMMA_DELTA0:
        if gamma is None or not 0.0 < gamma < alpha:
            raise DomainError(f"fixed-gamma-delta0 needs gamma in ]0, alpha[, got {gamma!r}")
        rise = zeta(n, gamma) - gamma
        return LimitProfile([-rise, 0.0, rise], [-1, 1, -1, 1], periodic=2.0 * rise,
                            anchor=(0.0, gamma + rise))
    if scenario == LimitScenario.DELTA0_GAMMA0:
        return LimitProfile([-v0, 0.0, v0], [-1, 1, -1, 1], periodic=2.0 * v0, anchor=(0.0, v0))
    if not n.is_balanced:
        raise DomainError("the balanced heteroclinic profile needs F(1) = 0")
    return LimitProfile([-alpha, 1.0 - alpha], [0, 1, 0], anchor=(0.0, alpha))


def segment_values(segment, times):
    '''
        v on the given times, held at the end values outside the segment.
    '''
    lo, hi = segment.t_span
    first, last = segment.samples[0].v, segment.samples[-1].v
    values = []
    for t in times:
        if t <= lo:
            values.append(first)
        elif t >= hi:
            values.append(last)
        else:
            values.append(segment.at(t).v)
    return np.array(values)


def sup_distance(profile, segment, t_lo, t_hi, points=2001):
    times = np.linspace(t_lo, t_hi, points)
    return float(np.max(np.abs(segment_values(segment, times) - profile.evaluate(times))))
