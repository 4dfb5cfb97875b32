'''
Phase-plane machinery for

    v' = phi^-1(w),    w' = -q(t) f(v) / delta

in the time domain, and for its first-order reduction along monotone
branches, where v is the independent variable and

    y = 1/sqrt(1 - v'^2) - 1,    dy/dv = -q(t(v)) f(v) / delta,
    dt/dv = +-(1 + y)/sqrt(y^2 + 2y).

Both integrators drive scipy's DOP853 one step at a time so that steps never
cross a discontinuity of q and events are located on the dense output.
'''

import math
from bisect import bisect_right
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.integrate import DOP853
from scipy.optimize import brentq

from minkowski_orbits.constants import (ATOL, BLOWUP_MOMENTUM,
                                        ENDPOINT_TOLERANCE,
                                        EQUILIBRIUM_RADIUS,
                                        EVENT_TIME_TOLERANCE, MIN_STEP,
                                        REDUCED_MOMENTUM_FLOOR,
                                        REDUCED_START_MOMENTUM, ROOT_TOLERANCE,
                                        RTOL)
from minkowski_orbits.exceptions import (DomainError, MonotonicityLost,
                                         StepSizeUnderflow)


def phi(xi):
    if np.any(np.abs(xi) >= 1.0):
        raise DomainError(f"phi is defined on ]-1, 1[, got {xi!r}")
    return xi / np.sqrt(1.0 - xi * xi)


def phi_inv(w):
    return w / np.sqrt(1.0 + w * w)


def kinetic(w):
    '''
        sqrt(1 + w^2) - 1 without cancellation for small w.
    '''
    w2 = w * w
    return w2 / (np.sqrt(1.0 + w2) + 1.0)


def energy(v, w, delta, c, n):
    if not delta > 0.0:
        raise DomainError(f"delta must be positive, got {delta!r}")
    return kinetic(w) + (c / delta) * n.F(v)


def reduced_momentum(vprime):
    if np.any(np.abs(vprime) >= 1.0):
        raise DomainError(f"slope must lie in ]-1, 1[, got {vprime!r}")
    return 1.0 / np.sqrt(1.0 - vprime * vprime) - 1.0


def slope_from_reduced(y):
    y = np.maximum(y, 0.0)
    return np.sqrt(y * y + 2.0 * y) / (y + 1.0)


def momentum_from_reduced(y, sense=1.0):
    y = max(float(y), 0.0)
    return math.copysign(math.sqrt(y * y + 2.0 * y), sense)


class Direction(Enum):
    FORWARD = 'forward'
    BACKWARD = 'backward'

    @property
    def sign(self):
        return 1.0 if self == Direction.FORWARD else -1.0


class Termination(Enum):
    TIME_LIMIT = 'time-limit'
    HIT_V_LEVEL = 'hit-v-level'
    HIT_W_ZERO = 'hit-w-zero'
    REACHED_EQUILIBRIUM = 'reached-equilibrium'
    BLOWUP_GUARD = 'blowup-guard'
    DEGENERATE_CONSTANT = 'degenerate-constant'


class Monotonicity(Enum):
    INCREASING = 'increasing'
    DECREASING = 'decreasing'
    NON_MONOTONE = 'non-monotone'


@dataclass(frozen=True)
class PhaseState:
    t: float
    v: float
    w: float

    @property
    def vprime(self):
        return float(phi_inv(self.w))

    def to_row(self):
        return (self.t, self.v, self.w, self.vprime)

    def to_dict(self):
        return {'t': self.t, 'v': self.v, 'w': self.w, 'vprime': self.vprime}


@dataclass(frozen=True)
class ReducedState:
    v: float
    y: float
    t: float = math.nan

    @property
    def slope(self):
        return float(slope_from_reduced(self.y))


@dataclass(frozen=True)
class TimeChart:
    '''
        Time attached to the starting value of a monotone branch, and whether
        t grows with v along it.
    '''
    t_from: float = 0.0
    increasing: bool = True

    @property
    def sense(self):
        return 1.0 if self.increasing else -1.0


class EventKind(Enum):
    V_LEVEL = 'level'
    W_ZERO = 'w-zero'
    EQUILIBRIUM = 'equilibrium'


@dataclass(frozen=True)
class EventSpec:
    '''
        direction is +1 when the event fires only as g goes from negative to
        positive in the order the orbit is traversed, -1 for the opposite,
        0 for both.
    '''
    kind: EventKind
    level: float = 0.0
    direction: int = 0
    terminal: bool = True
    radius: float = EQUILIBRIUM_RADIUS
    equilibria: tuple = (0.0, 1.0)

    @classmethod
    def v_level(cls, level, direction=0, terminal=True):
        return cls(EventKind.V_LEVEL, level=float(level), direction=direction, terminal=terminal)

    @classmethod
    def w_zero(cls, direction=0, terminal=True):
        return cls(EventKind.W_ZERO, direction=direction, terminal=terminal)

    @classmethod
    def equilibrium(cls, radius=EQUILIBRIUM_RADIUS, equilibria=(0.0, 1.0), terminal=True):
        return cls(EventKind.EQUILIBRIUM, direction=-1, terminal=terminal,
                   radius=radius, equilibria=tuple(equilibria))

    def g(self, state):
        v, w = state[0], state[1]
        if self.kind == EventKind.V_LEVEL:
            return v - self.level
        if self.kind == EventKind.W_ZERO:
            return w
        return min(max(abs(v - p), abs(w)) for p in self.equilibria) - self.radius

    @property
    def termination(self):
        return {
            EventKind.V_LEVEL: Termination.HIT_V_LEVEL,
            EventKind.W_ZERO: Termination.HIT_W_ZERO,
            EventKind.EQUILIBRIUM: Termination.REACHED_EQUILIBRIUM,
        }[self.kind]


@dataclass(frozen=True)
class EventRecord:
    spec: EventSpec
    state: PhaseState

    def to_dict(self):
        return {'kind': self.spec.kind.value, 'level': self.spec.level, **self.state.to_dict()}


class OrbitSegment(object):
    '''
        A sampled orbit with its dense interpolants. Samples are kept in
        increasing time whatever the direction of integration; initial and
        final refer to the order of traversal.
    '''

    def __init__(self, samples, termination, direction=Direction.FORWARD, events=(),
                 terminal_event=None, steps=()):
        self.direction = Direction(direction)
        ordered = list(samples)
        if self.direction == Direction.BACKWARD:
            ordered.reverse()
        self.samples = ordered
        self.termination = termination
        self.events = list(events)
        self.terminal_event = terminal_event
        self._steps = sorted(steps, key=lambda s: s[0])
        self._lows = [s[0] for s in self._steps]

    @property
    def initial(self):
        return self.samples[0] if self.direction == Direction.FORWARD else self.samples[-1]

    @property
    def final(self):
        return self.samples[-1] if self.direction == Direction.FORWARD else self.samples[0]

    @property
    def times(self):
        return np.array([s.t for s in self.samples])

    @property
    def v(self):
        return np.array([s.v for s in self.samples])

    @property
    def w(self):
        return np.array([s.w for s in self.samples])

    @property
    def vprime(self):
        return phi_inv(self.w)

    @property
    def t_span(self):
        return self.samples[0].t, self.samples[-1].t

    @property
    def monotone(self):
        steps = np.diff(self.v)
        if steps.size and np.all(steps > 0.0):
            return Monotonicity.INCREASING
        if steps.size and np.all(steps < 0.0):
            return Monotonicity.DECREASING
        return Monotonicity.NON_MONOTONE

    def at(self, t):
        lo, hi = self.t_span
        if not lo <= t <= hi:
            raise DomainError(f"t={t!r} outside the segment [{lo!r}, {hi!r}]")
        if not self._steps:
            times = self.times
            return PhaseState(float(t), float(np.interp(t, times, self.v)),
                              float(np.interp(t, times, self.w)))
        i = max(bisect_right(self._lows, t) - 1, 0)
        u = self._steps[i][2](t)
        return PhaseState(float(t), float(u[0]), float(u[1]))

    def sample(self, times):
        states = [self.at(t) for t in times]
        return np.array([s.v for s in states]), np.array([s.w for s in states])

    def energies(self, n, delta, c):
        return energy(self.v, self.w, delta, c, n)

    def events_of(self, kind):
        return [e for e in self.events if e.spec.kind == EventKind(kind)]

    def joined(self, other):
        '''
            Concatenate two segments that share an end point in time.
        '''
        first, second = sorted((self, other), key=lambda s: s.t_span[0])
        tail = [s for s in second.samples if s.t > first.samples[-1].t]
        return OrbitSegment(first.samples + tail, other.termination,
                            events=first.events + second.events,
                            terminal_event=other.terminal_event,
                            steps=first._steps + second._steps)

    def shifted(self, dt):
        samples = [PhaseState(s.t + dt, s.v, s.w) for s in self.samples]
        steps = [(lo + dt, hi + dt, _Shifted(f, dt)) for lo, hi, f in self._steps]
        segment = OrbitSegment(samples, self.termination, events=self.events,
                               terminal_event=self.terminal_event, steps=steps)
        return segment

    def to_rows(self):
        return [s.to_row() for s in self.samples]

    def to_dict(self):
        return {
            'termination': self.termination.value,
            'monotone': self.monotone.value,
            't_start': self.samples[0].t,
            't_end': self.samples[-1].t,
            'initial': self.initial.to_dict(),
            'final': self.final.to_dict(),
            'samples': len(self.samples),
            'events': [e.to_dict() for e in self.events],
        }


class _Shifted(object):
    def __init__(self, interpolant, dt):
        self.interpolant = interpolant
        self.dt = dt

    def __call__(self, t):
        return self.interpolant(t - self.dt)


class _Constant(object):
    def __init__(self, state):
        self.state = np.array(state, dtype=float)

    def __call__(self, t):
        return self.state


def _sign(x):
    return 1 if x > 0.0 else (-1 if x < 0.0 else 0)


def _intervals(breakpoints, start, end):
    '''
        Consecutive sub-intervals from start to end, cut at every breakpoint
        strictly between them, in the order of traversal.
    '''
    lo, hi = min(start, end), max(start, end)
    cuts = [b for b in breakpoints if lo < b < hi]
    if end < start:
        cuts.reverse()
    nodes = [start] + cuts + [end]
    return list(zip(nodes, nodes[1:]))


def _time_rhs(n, piece, delta):
    if piece.is_constant:
        scale = piece.constant / delta

        def rhs(t, u):
            return [phi_inv(u[1]), -scale * n.f(u[0])]
    else:
        def rhs(t, u):
            return [phi_inv(u[1]), -piece.value(t) * n.f(u[0]) / delta]
    return rhs


class _EventTracker(object):
    '''
        Sign bookkeeping for event functions. A zero of g at the start of the
        integration is ignored; the first nonzero sign becomes the reference.
    '''

    def __init__(self, events, state):
        self.events = list(events)
        self.signs = [_sign(e.g(state)) or None for e in self.events]

    def crossings(self, state, dense, t_old, t_new):
        hits = []
        for i, event in enumerate(self.events):
            g_new = event.g(state)
            previous = self.signs[i]
            current = _sign(g_new)
            if previous is None:
                self.signs[i] = current or None
                continue
            if current == previous:
                continue
            self.signs[i] = current if current else -previous
            if event.direction and event.direction != -previous:
                continue
            hits.append((self._locate(event, dense, t_old, t_new, current), event))
        return hits

    @staticmethod
    def _locate(event, dense, t_old, t_new, current):
        if current == 0:
            return t_new
        lo, hi = min(t_old, t_new), max(t_old, t_new)
        g_lo, g_hi = event.g(dense(lo)), event.g(dense(hi))
        if g_lo == 0.0:
            return lo
        if g_lo * g_hi > 0.0:
            return t_new
        return brentq(lambda s: event.g(dense(s)), lo, hi, xtol=EVENT_TIME_TOLERANCE)


def integrate_t(n, w, delta, start, direction=Direction.FORWARD, events=(), t_max=100.0,
                rtol=RTOL, atol=ATOL, max_step=np.inf):
    '''
        Integrate the planar system from start for a duration t_max in the
        given direction. Every weight-piece boundary on the way is an
        integration endpoint. The first terminal event stops the run; other
        events are recorded on the segment.
    '''
    if not delta > 0.0:
        raise DomainError(f"delta must be positive, got {delta!r}")
    if not (math.isfinite(t_max) and t_max > 0.0):
        raise DomainError(f"t_max must be finite and positive, got {t_max!r}")
    direction = Direction(direction)
    t_end = start.t + direction.sign * t_max

    u = np.array([start.v, start.w], dtype=float)
    samples = [start]
    steps = []
    records = []
    tracker = _EventTracker(events, u)

    for a, b in _intervals(w.breakpoints, start.t, t_end):
        piece = w.piece_at(0.5 * (a + b))
        solver = DOP853(_time_rhs(n, piece, delta), a, u, b, rtol=rtol, atol=atol, max_step=max_step)
        while solver.status == 'running':
            solver.step()
            if solver.status == 'failed':
                raise StepSizeUnderflow(float(solver.t), float(solver.step_size or 0.0))
            t_old, t_new = solver.t_old, solver.t
            if solver.status == 'running' and abs(t_new - t_old) < MIN_STEP:
                raise StepSizeUnderflow(float(t_new), abs(t_new - t_old))
            dense = solver.dense_output()
            state = solver.y
            if not np.all(np.isfinite(state)) or abs(state[1]) > BLOWUP_MOMENTUM:
                return OrbitSegment(samples, Termination.BLOWUP_GUARD, direction, records,
                                    steps=steps)
            hits = sorted(tracker.crossings(state, dense, t_old, t_new),
                          key=lambda hit: direction.sign * hit[0])
            for t_hit, event in hits:
                x = dense(t_hit)
                record = EventRecord(event, PhaseState(float(t_hit), float(x[0]), float(x[1])))
                records.append(record)
                if event.terminal:
                    if t_hit != t_old:
                        samples.append(record.state)
                        steps.append((min(t_old, t_hit), max(t_old, t_hit), dense))
                    return OrbitSegment(samples, event.termination, direction, records,
                                        terminal_event=record, steps=steps)
            samples.append(PhaseState(float(t_new), float(state[0]), float(state[1])))
            steps.append((min(t_old, t_new), max(t_old, t_new), dense))
        u = np.array(solver.y, dtype=float)
    return OrbitSegment(samples, Termination.TIME_LIMIT, direction, records, steps=steps)


def equilibrium_segment(state, t_span, termination=Termination.DEGENERATE_CONSTANT):
    '''
        A constant orbit at an equilibrium over t_span.
    '''
    lo, hi = t_span
    samples = [PhaseState(lo, state.v, state.w), PhaseState(hi, state.v, state.w)]
    return OrbitSegment(samples, termination, steps=[(lo, hi, _Constant((state.v, state.w)))])



# v-domain reduction

def _piece_towards(w, t, time_sign):
    piece = w.piece_at(t)
    if time_sign < 0.0 and t == piece.start:
        piece = w.piece_at(np.nextafter(t, -np.inf))
    return piece


def _chord_time(y_a, y_b, dv):
    '''
        Time to cross a stretch of length |dv| on which y is linear in v.
    '''
    root_a = math.sqrt(y_a * y_a + 2.0 * y_a)
    root_b = math.sqrt(y_b * y_b + 2.0 * y_b)
    if abs(y_b - y_a) <= 1e-15:
        return abs(dv) * (1.0 + y_a) / max(root_a, 1e-300)
    slope = (y_b - y_a) / dv
    return abs((root_b - root_a) / slope)


class _ChordPiece(object):
    def __init__(self, v_a, y_a, t_a, v_b, y_b, t_b):
        self.v_a, self.y_a, self.t_a = v_a, y_a, t_a
        self.v_b, self.y_b, self.t_b = v_b, y_b, t_b

    def __call__(self, v):
        share = (v - self.v_a) / (self.v_b - self.v_a)
        y = self.y_a + share * (self.y_b - self.y_a)
        dt = _chord_time(self.y_a, y, v - self.v_a) if v != self.v_a else 0.0
        return np.array([y, self.t_a + math.copysign(dt, self.t_b - self.t_a)])


class ReducedCoordinate(object):
    '''
        Independent variable of the reduced march: v itself, or
        x = ln|v - anchor| to approach an equilibrium at anchor smoothly.
    '''

    def __init__(self, anchor=None):
        self.anchor = anchor
        self.side = 1.0 if anchor in (None, 0.0) else -1.0

    def x_of(self, v):
        if self.anchor is None:
            return v
        return math.log(abs(v - self.anchor))

    def v_of(self, x):
        if self.anchor is None:
            return x
        return self.anchor + self.side * math.exp(x)

    def dv_dx(self, x):
        if self.anchor is None:
            return 1.0
        return self.side * math.exp(x)


class _InChart(object):
    def __init__(self, dense, coordinate):
        self.dense = dense
        self.coordinate = coordinate

    def __call__(self, v):
        return self.dense(self.coordinate.x_of(v))


def _reduced_rhs(n, piece, delta, sense, coordinate):
    def rhs(x, u):
        v = coordinate.v_of(x)
        jacobian = coordinate.dv_dx(x)
        y = max(u[0], REDUCED_MOMENTUM_FLOOR)
        q = piece.value(u[1])
        return [-q * n.f(v) / delta * jacobian,
                sense * (1.0 + y) / math.sqrt(y * y + 2.0 * y) * jacobian]
    return rhs


def reduced_march(n, w, delta, sense, v, y, t, v_stop, coordinate=None, rtol=RTOL, atol=ATOL):
    '''
        March the reduced system (y, t) from v to v_stop, restarting at every
        weight breakpoint the co-advanced time crosses. Returns the end point,
        the accepted states and the dense pieces. Raises MonotonicityLost
        where y drops to the floor.
    '''
    coordinate = coordinate or ReducedCoordinate()
    v_sign = 1.0 if v_stop > v else -1.0
    time_sign = sense * v_sign
    x, x_stop = coordinate.x_of(v), coordinate.x_of(v_stop)
    states, pieces = [], []
    reached = x == x_stop
    while not reached:
        piece = _piece_towards(w, t, time_sign)
        upcoming = [b for b in w.breakpoints if time_sign * (b - t) > 0.0]
        barrier = (min(upcoming) if time_sign > 0 else max(upcoming)) if upcoming else None
        solver = DOP853(_reduced_rhs(n, piece, delta, sense, coordinate), x, np.array([y, t]),
                        x_stop, rtol=rtol, atol=atol)
        reached = True
        while solver.status == 'running':
            solver.step()
            if solver.status == 'failed':
                raise StepSizeUnderflow(float(solver.t), float(solver.step_size or 0.0))
            dense = solver.dense_output()
            x_old, x_new = solver.t_old, solver.t
            lo, hi = min(x_old, x_new), max(x_old, x_new)
            y_new, t_new = solver.y
            if y_new < REDUCED_MOMENTUM_FLOOR:
                located = x_old
                if dense(x_old)[0] > REDUCED_MOMENTUM_FLOOR:
                    located = brentq(lambda s: dense(s)[0] - REDUCED_MOMENTUM_FLOOR, lo, hi,
                                     xtol=ROOT_TOLERANCE)
                raise MonotonicityLost(coordinate.v_of(float(located)))
            if barrier is not None and time_sign * (t_new - barrier) >= 0.0:
                x_cross = x_new
                if dense(x_old)[1] != barrier:
                    x_cross = brentq(lambda s: dense(s)[1] - barrier, lo, hi, xtol=ROOT_TOLERANCE)
                x, y, t = float(x_cross), float(dense(x_cross)[0]), float(barrier)
                pieces.append((coordinate.v_of(x_old), coordinate.v_of(x), _InChart(dense, coordinate)))
                states.append(ReducedState(coordinate.v_of(x), y, t))
                reached = False
                break
            pieces.append((coordinate.v_of(x_old), coordinate.v_of(x_new), _InChart(dense, coordinate)))
            states.append(ReducedState(coordinate.v_of(x_new), float(y_new), float(t_new)))
        if reached:
            x, y, t = float(solver.t), float(solver.y[0]), float(solver.y[1])
    v_end = v_stop if x == x_stop else coordinate.v_of(x)
    return v_end, y, t, states, pieces


class ReducedPath(object):
    '''
        The monotone branch in the (v, y) chart with the co-advanced time.
    '''

    def __init__(self, states, pieces):
        self.states = states
        self._pieces = sorted(pieces, key=lambda p: min(p[0], p[1]))
        self._lows = [min(p[0], p[1]) for p in self._pieces]

    @property
    def final(self):
        return self.states[-1]

    def at(self, v):
        i = max(bisect_right(self._lows, v) - 1, 0)
        y, t = self._pieces[i][2](v)
        return ReducedState(float(v), max(float(y), 0.0), float(t))


def _analytic_stretch(n, q, delta, v_a, y_a, v_b):
    return y_a - (q / delta) * (n.F(v_b) - n.F(v_a))


def integrate_v_path(n, w, delta, time_of_v, v_from, v_to, y_start, rtol=RTOL, atol=ATOL):
    '''
        Integrate the reduced equation from v_from to v_to and keep the
        dense representation. The last ENDPOINT_TOLERANCE of the interval,
        and the first one when the branch starts at y = 0, are crossed with
        the closed form for y and the exact time of a linear y.
    '''
    if not delta > 0.0:
        raise DomainError(f"delta must be positive, got {delta!r}")
    if y_start < 0.0:
        raise DomainError(f"reduced momentum must be nonnegative, got {y_start!r}")
    if v_from == v_to:
        state = ReducedState(v_from, y_start, time_of_v.t_from)
        return ReducedPath([state], [(v_from, v_to, _Constant((y_start, time_of_v.t_from)))])
    chart = time_of_v
    v_sign = 1.0 if v_to > v_from else -1.0
    time_sign = chart.sense * v_sign
    stretch = min(ENDPOINT_TOLERANCE, abs(v_to - v_from) / 2.0)

    v, y, t = float(v_from), float(y_start), float(chart.t_from)
    states = [ReducedState(v, y, t)]
    pieces = []

    if y <= REDUCED_START_MOMENTUM:
        at_equilibrium = abs(n.f(v)) <= ROOT_TOLERANCE
        if at_equilibrium:
            q = w.constant_between(t, -time_sign * math.inf)
            if q is None:
                raise DomainError("a branch leaving an equilibrium needs a constant weight on its time tail")
        else:
            q = _piece_towards(w, t, time_sign).value(t)
        v_next = v + v_sign * stretch
        y_next = _analytic_stretch(n, q, delta, v, y, v_next)
        if y_next <= 0.0:
            raise MonotonicityLost(v)
        dt = 0.0 if at_equilibrium else _chord_time(y, y_next, stretch)
        t_next = t + time_sign * dt
        pieces.append((v, v_next, _ChordPiece(v, y, t, v_next, y_next, t_next)))
        v, y, t = v_next, y_next, t_next
        states.append(ReducedState(v, y, t))

    v_stop = v_to - v_sign * stretch
    if v_sign * (v_stop - v) > 0.0:
        v, y, t, marched, dense_pieces = reduced_march(n, w, delta, chart.sense, v, y, t, v_stop,
                                                       rtol=rtol, atol=atol)
        states.extend(marched)
        pieces.extend(dense_pieces)

    q = _piece_towards(w, t, time_sign).value(t)
    y_end = _analytic_stretch(n, q, delta, v, y, v_to)
    if y_end < -1e-9:
        located = brentq(lambda s: _analytic_stretch(n, q, delta, v, y, s),
                         min(v, v_to), max(v, v_to), xtol=ROOT_TOLERANCE)
        raise MonotonicityLost(float(located))
    y_end = max(y_end, 0.0)
    t_end = t + time_sign * _chord_time(y, y_end, v_to - v)
    pieces.append((v, v_to, _ChordPiece(v, y, t, v_to, y_end, t_end)))
    states.append(ReducedState(float(v_to), float(y_end), float(t_end)))
    return ReducedPath(states, pieces)


def integrate_v(n, w, delta, time_of_v, v_from, v_to, y_start, v_samples=None,
                rtol=RTOL, atol=ATOL):
    '''
        Reduced states along a strictly monotone branch from v_from to v_to.

        Returns the accepted integration nodes, or the states at v_samples
        when given. Raises MonotonicityLost when y vanishes strictly inside
        the interval.
    '''
    path = integrate_v_path(n, w, delta, time_of_v, v_from, v_to, y_start, rtol=rtol, atol=atol)
    if v_samples is None:
        return path.states
    return [path.at(float(v)) for v in v_samples]


def segment_from_reduced(states, termination=Termination.TIME_LIMIT, sense=1.0):
    '''
        Phase-plane samples of a monotone branch given in the reduced chart.
    '''
    samples = sorted((PhaseState(s.t, s.v, momentum_from_reduced(s.y, sense)) for s in states),
                     key=lambda s: s.t)
    unique = [samples[0]] + [b for a, b in zip(samples, samples[1:]) if b.t > a.t]
    return OrbitSegment(unique, termination)
