'''
Connections for a weight that is constant on one side of t0. The branch
kappa(rho) of half-line momenta on the varying side is intersected with a
level curve of the autonomous energy on the constant side, and the two
pieces are glued at t0. Stepwise weights are classified in closed form.
'''

import math
import multiprocessing
import operator
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from minkowski_orbits.analysis.autonomous import period_T
from minkowski_orbits.analysis.dynamics import (Direction, EventSpec,
                                                OrbitSegment, PhaseState,
                                                Termination, TimeChart,
                                                energy, integrate_t,
                                                integrate_v,
                                                momentum_from_reduced, phi)
from minkowski_orbits.analysis.nonlinearity import gamma_of_level
from minkowski_orbits.analysis.shooting import (HalfLine, HalfLineMethod,
                                                analytic_rho_bound,
                                                condition_eta_threshold,
                                                halfline_solution,
                                                kappa_branch)
from minkowski_orbits.analysis.weight import (VaryingSide, WeightProfile,
                                              check_hypotheses)
from minkowski_orbits.config.logging import log_bold, log_intent, log_warning
from minkowski_orbits.constants import (BRANCH_COINCIDENCE,
                                        DEFAULT_GRID_POINTS, EXIT_HORIZON,
                                        EXIT_SLOPE, PERIODIC_TAIL_PERIODS,
                                        RHO_TOLERANCE, ROOT_TOLERANCE,
                                        TAIL_CUTOFF, TAIL_MOMENTUM,
                                        TAIL_SAMPLES)
from minkowski_orbits.exceptions import (DegenerateCase, DomainError,
                                         HypothesisViolation)

GLUE_RHO_TOLERANCE = 1e-12
STEPWISE_TIE = 1e-12
LEVEL_DEPTH_TOLERANCE = 1e-14
EVENT_MERGE = 1e-9


class Classification(Enum):
    HETEROCLINIC = 'heteroclinic'
    HOMOCLINIC = 'homoclinic'
    DEFINITIVELY_PERIODIC = 'definitively-periodic'
    FINITE_TIME_EXIT = 'finite-time-exit'
    NONEXISTENCE_CERTIFIED = 'nonexistence-certified'
    UNDETERMINED = 'undetermined'


class LevelAnchor(Enum):
    THROUGH_ONE = 'through-one'
    THROUGH_V0 = 'through-v0'
    THROUGH_W = 'through-w'
    THROUGH_ORIGIN = 'through-origin'


_RELATIONS = {
    '<=': operator.le,
    '<': operator.lt,
    '>=': operator.ge,
    '>': operator.gt,
}


@dataclass(frozen=True)
class Condition:
    name: str
    value: float
    bound: float
    relation: str
    holds: bool
    applicable: bool = True
    note: str = ''

    @property
    def verdict(self):
        if not self.applicable:
            return 'inapplicable'
        return 'holds' if self.holds else 'fails'

    def to_row(self):
        return (self.name, self.value, self.relation, self.bound, self.verdict)

    def to_dict(self):
        return {'value': self.value, 'bound': self.bound, 'relation': self.relation,
                'holds': self.holds, 'verdict': self.verdict, 'note': self.note}


class ConditionReport(object):
    '''
        Evaluated thresholds, keyed by name, in evaluation order.
    '''

    def __init__(self, conditions=()):
        self._conditions = {c.name: c for c in conditions}
        self.extras = {}

    def add(self, name, value, bound, relation, applicable=True, note='', tolerance=None):
        value, bound = float(value), float(bound)
        if tolerance is not None:
            holds = abs(value - bound) <= tolerance
        else:
            holds = _RELATIONS[relation](value, bound)
        condition = Condition(name, value, bound, relation, bool(applicable and holds),
                              applicable, note)
        self._conditions[name] = condition
        return condition

    def merge(self, other):
        for condition in other:
            self._conditions.setdefault(condition.name, condition)
        for key, value in other.extras.items():
            self.extras.setdefault(key, value)
        return self

    def __getitem__(self, name):
        return self._conditions[name]

    def __contains__(self, name):
        return name in self._conditions

    def __iter__(self):
        return iter(self._conditions.values())

    def __len__(self):
        return len(self._conditions)

    def holds(self, name):
        return name in self._conditions and self._conditions[name].holds

    @property
    def certified(self):
        return self.holds('cond-eta') and (self.holds('cond-c3') or self.holds('cond-c3-sharpened'))

    def to_dict(self):
        record = {name: c.to_dict() for name, c in self._conditions.items()}
        if self.extras:
            record['extras'] = dict(self.extras)
        return record


@dataclass
class ConnectionResult:
    classification: Classification
    rho_star: Optional[float] = None
    profile: Optional[OrbitSegment] = None
    conditions: ConditionReport = field(default_factory=ConditionReport)
    peak: Optional[float] = None
    period: Optional[float] = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def determinate(self):
        return self.classification != Classification.UNDETERMINED

    def to_dict(self):
        return {
            'classification': self.classification.value,
            'rho_star': self.rho_star,
            'peak': self.peak,
            'period': self.period,
            'conditions': self.conditions.to_dict(),
            'profile': None if self.profile is None else self.profile.to_dict(),
            'diagnostics': self.diagnostics,
        }


class LevelCurve(object):
    '''
        Upper half of the level set of the autonomous energy with weight c
        through (K, 0): w(v) = sqrt(y^2 + 2 y), y = (c/delta) (F(K) - F(v)).
    '''

    def __init__(self, n, delta, c, anchor, w_bar=None):
        if not c > 0.0:
            raise DomainError(f"c must be positive, got {c!r}")
        if not delta > 0.0:
            raise DomainError(f"delta must be positive, got {delta!r}")
        n.require_structure()
        self.n = n
        self.anchor = LevelAnchor(anchor)
        if self.anchor == LevelAnchor.THROUGH_ONE:
            self.through = 1.0
        elif self.anchor == LevelAnchor.THROUGH_V0:
            self.through = n.v0
        elif self.anchor == LevelAnchor.THROUGH_ORIGIN:
            self.through = 0.0
        else:
            if w_bar is None or not n.alpha < w_bar <= n.v0:
                raise DomainError(f"through-w needs w_bar in ]alpha, v0], got {w_bar!r}")
            self.through = float(w_bar)
        self.ratio = c / delta
        self.level_F = 0.0 if self.anchor == LevelAnchor.THROUGH_V0 else n.F(self.through)

    @property
    def level(self):
        return self.ratio * self.level_F

    def reduced(self, v):
        depth = self.level_F - self.n.F(v)
        if depth < -LEVEL_DEPTH_TOLERANCE:
            raise DomainError(f"the level through {self.through!r} has no point at v={v!r}")
        return self.ratio * max(depth, 0.0)

    def __call__(self, v):
        y = self.reduced(v)
        return math.sqrt(y * y + 2.0 * y)


def energy_level_curve(n, delta, c, anchor, w_bar=None):
    return LevelCurve(n, delta, c, anchor, w_bar=w_bar)


def _require_bistable(n):
    n.require_structure()
    if not n.is_bistable:
        raise HypothesisViolation('bistable', f"alpha={n.alpha!r} < beta={n.beta!r}")


def heteroclinic_ratio(n):
    return -n.F(n.alpha) / (n.F(1.0) - n.F(n.alpha))


def stepwise_family(n, rho):
    '''
        c2/c1 for which the stepwise problem connects 0 to 1 through rho at t0.
    '''
    return -n.F(rho) / (n.F(1.0) - n.F(rho))


def periodic_condition_bound(n, eta, w_bar):
    return eta * (-n.F(n.alpha)) / (n.F(w_bar) - n.F(n.alpha))


def nonexistence_curve(n, eta, sup_norm, rho):
    return (-sup_norm * n.F(n.alpha) - eta * (n.F(rho) - n.F(n.alpha))) / (n.F(1.0) - n.F(rho))


def _rho_grid(lo, hi, points):
    return [lo + (hi - lo) * k / (points + 1) for k in range(1, points + 1)]


# glued profiles

def _exponential_tail(last, anchor, time_sign):
    gap = abs(anchor - last.v)
    slope = abs(last.vprime)
    if gap <= TAIL_CUTOFF or slope == 0.0:
        return []
    rate = slope / gap
    span = math.log(gap / TAIL_CUTOFF) / rate
    towards = math.copysign(1.0, anchor - last.v)
    tail = []
    for s in np.linspace(0.0, span, TAIL_SAMPLES + 1)[1:]:
        distance = gap * math.exp(-rate * s)
        vprime = towards * time_sign * rate * distance
        tail.append(PhaseState(last.t + time_sign * s, anchor - towards * distance, float(phi(vprime))))
    return tail


def _level_branch(n, w, delta, q, t0, rho, y0, anchor, increasing):
    '''
        Monotone branch on a side where q is constant, from (rho, y0) at t0
        to the equilibrium anchor. The part where y falls below TAIL_MOMENTUM
        follows the linearization at the anchor.
    '''
    ratio = q / delta

    def excess(v):
        return y0 - ratio * (n.F(v) - n.F(rho)) - TAIL_MOMENTUM

    top = n.alpha if min(rho, anchor) < n.alpha < max(rho, anchor) else rho
    if excess(anchor) >= 0.0:
        raise DomainError(f"the branch from rho={rho!r} does not settle at {anchor!r}")
    if excess(top) <= 0.0:
        v_stop = rho
    else:
        v_stop = float(brentq(excess, min(anchor, top), max(anchor, top), xtol=ROOT_TOLERANCE))

    chart = TimeChart(t0, increasing)
    samples = [PhaseState(t0, rho, momentum_from_reduced(y0, chart.sense))]
    if v_stop != rho:
        states = integrate_v(n, w, delta, chart, rho, v_stop, y0)
        samples = [PhaseState(s.t, s.v, momentum_from_reduced(s.y, chart.sense)) for s in states]
    time_sign = chart.sense * math.copysign(1.0, anchor - rho)
    samples.extend(_exponential_tail(samples[-1], anchor, time_sign))
    return sorted(samples, key=lambda s: s.t)


def _rise_to_peak(n, w, delta, t0, rho, y0, peak):
    '''
        Increasing branch from (rho, y0) at t0 up to the turning point (peak, 0).
    '''
    states = integrate_v(n, w, delta, TimeChart(t0, True), rho, peak, y0)
    return [PhaseState(s.t, s.v, momentum_from_reduced(s.y)) for s in states]


def _windowed(samples, t0, window):
    if window is None:
        return samples
    return [s for s in samples if t0 - window <= s.t <= t0 + window]


def _glue(left, right, t0, window=None, termination=Termination.REACHED_EQUILIBRIUM):
    '''
        Join the part up to t0 with the part from t0 on. Returns the profile
        and the jump of (v, w) at t0.
    '''
    left = sorted(left, key=lambda s: s.t)
    right = sorted(right, key=lambda s: s.t)
    joint_left, joint_right = left[-1], right[0]
    jump = {'t0': t0, 'v': abs(joint_left.v - joint_right.v), 'w': abs(joint_left.w - joint_right.w)}
    samples = left + [s for s in right if s.t > joint_left.t]
    samples = _windowed(samples, t0, window)
    return OrbitSegment(samples, termination), jump


# branch intersections

class _BranchSearch(object):
    '''
        Sign changes of level(rho) - kappa(rho) on a grid, refined by brentq.
    '''

    def __init__(self, n, w, delta, t0, side, level, method):
        self.n = n
        self.w = w
        self.delta = delta
        self.t0 = t0
        self.side = HalfLine(side)
        self.level = level
        self.method = HalfLineMethod(method)
        self.diagnostics = {}
        self.coincident = False

    def solve(self, rho):
        return halfline_solution(self.n, self.w, self.delta, self.t0, self.side, rho,
                                 method=self.method)

    def gap(self, rho):
        return self.level(rho) - self.solve(rho).terminal_w

    def run(self, lo, hi, grid_points, parallel=False):
        grid = _rho_grid(lo, hi, grid_points)
        points = kappa_branch(self.n, self.w, self.delta, self.t0, self.side, grid,
                              method=self.method, parallel=parallel)
        usable = [(p.rho, self.level(p.rho) - p.kappa) for p in points if p.converged]
        self.diagnostics.update({
            'grid_points': len(grid),
            'converged_points': len(usable),
            'failed_rho': [p.rho for p in points if not p.converged],
        })
        if len(usable) < 2:
            return None

        scale = max(1.0, max(self.level(rho) for rho, _ in usable))
        if max(abs(g) for _, g in usable) <= BRANCH_COINCIDENCE * scale:
            self.coincident = True
            self.diagnostics['coincident_branches'] = True
            rho = min((r for r, _ in usable), key=lambda r: abs(r - 0.5 * (lo + hi)))
            return rho, self.solve(rho)

        brackets = [(a, b) for (a, ga), (b, gb) in zip(usable, usable[1:]) if ga * gb < 0.0]
        zeros = [rho for rho, g in usable if g == 0.0]
        self.diagnostics['brackets'] = [list(b) for b in brackets]
        if len(brackets) > 1:
            log_warning(f"{len(brackets)} sign changes on the branch; using the smallest rho")
        if zeros and (not brackets or zeros[0] < brackets[0][0]):
            return zeros[0], self.solve(zeros[0])
        if not brackets:
            return None
        a, b = brackets[0]
        rho = float(brentq(self.gap, a, b, xtol=GLUE_RHO_TOLERANCE))
        return rho, self.solve(rho)


def heteroclinic_conditions(n, report):
    conditions = ConditionReport()
    ratio = heteroclinic_ratio(n)
    if report.side == VaryingSide.LEFT_VARYING:
        conditions.add('cond-c', report.c, report.eta * ratio, '<=')
        if n.is_balanced:
            conditions.add('cond-c-balanced', report.c, report.eta, '<=',
                           note='q(t) <= q(s) for t > t0 > s; evaluated, not enforced')
    else:
        conditions.add('cond-c2', report.c, report.sup_norm / ratio, '>=')
    return conditions


def certify_nonexistence(n, w, delta, M=None, grid_points=DEFAULT_GRID_POINTS):
    '''
        Thresholds above which no heteroclinic exists for a left-varying
        weight with constant right tail c. M defaults to the analytic bound
        on the Dirichlet value of left half-line solutions.
    '''
    report = ConditionReport()
    try:
        _require_bistable(n)
        hypotheses = check_hypotheses(w, VaryingSide.LEFT_VARYING)
    except HypothesisViolation as e:
        for name in ('cond-eta', 'cond-c3'):
            report.add(name, math.nan, math.nan, '>', applicable=False, note=str(e))
        return report

    eta, sup_norm, c = hypotheses.eta, hypotheses.sup_norm, hypotheses.c
    threshold = condition_eta_threshold(n, sup_norm)
    report.add('cond-eta', eta, threshold, '>')
    applicable = report.holds('cond-eta')
    note = '' if applicable else 'needs cond-eta'
    report.add('cond-c3', c, threshold, '>', applicable=applicable, note=note)
    if not applicable:
        return report

    if M is None:
        M = analytic_rho_bound(n, eta, sup_norm)
    top = min(M, 1.0 - 1e-9)
    grid = np.linspace(0.0, top, grid_points + 1)
    curve = [nonexistence_curve(n, eta, sup_norm, rho) for rho in grid]
    argmax = float(grid[int(np.argmax(curve))])
    report.add('C-maximizer', argmax, n.alpha, '~', tolerance=top / grid_points,
               note='max of C over [0, M] sits at alpha')
    report.extras['M'] = M
    if M < n.alpha:
        report.add('cond-c3-sharpened', c, nonexistence_curve(n, eta, sup_norm, M), '>')
    log_intent(f"nonexistence: cond-eta {report['cond-eta'].verdict}, cond-c3 {report['cond-c3'].verdict}", 1)
    return report


def _without_connection(n, w, delta, conditions, diagnostics):
    conditions.merge(certify_nonexistence(n, w, delta))
    if conditions.certified:
        log_bold("no heteroclinic: nonexistence certified")
        return ConnectionResult(Classification.NONEXISTENCE_CERTIFIED, conditions=conditions,
                                diagnostics=diagnostics)
    log_warning("no sign change on the branch and no certificate: undetermined")
    return ConnectionResult(Classification.UNDETERMINED, conditions=conditions, diagnostics=diagnostics)


def find_heteroclinic(n, w, delta, grid_points=DEFAULT_GRID_POINTS, method=HalfLineMethod.REDUCED,
                      parallel=False, window=None):
    '''
        Heteroclinic from 0 to 1 for a weight constant on one side of t0.

        Left-varying weights: the left half-line branch kappa on ]0, alpha[
        meets the level through (1, 0). Right-varying weights: the right
        half-line branch on ]alpha, v0[ meets the level through (0, 0).
    '''
    _require_bistable(n)
    side = w.varying_side
    if side is None:
        raise HypothesisViolation('constant tail', 'q must be constant on one side of t0')
    report = check_hypotheses(w, side)
    conditions = heteroclinic_conditions(n, report)
    t0, c = report.t0, report.c

    if side == VaryingSide.LEFT_VARYING:
        level = energy_level_curve(n, delta, c, LevelAnchor.THROUGH_ONE)
        search = _BranchSearch(n, w, delta, t0, HalfLine.LEFT, level, method)
        found = search.run(0.0, n.alpha, grid_points, parallel)
        if found is None:
            return _without_connection(n, w, delta, conditions, search.diagnostics)
        rho, shot = found
        left = shot.orbit.samples
        right = _level_branch(n, w, delta, c, t0, rho, level.reduced(rho), 1.0, increasing=True)
    else:
        level = energy_level_curve(n, delta, c, LevelAnchor.THROUGH_ORIGIN)
        search = _BranchSearch(n, w, delta, t0, HalfLine.RIGHT, level, method)
        found = search.run(n.alpha, n.v0, grid_points, parallel)
        if found is None:
            return ConnectionResult(Classification.UNDETERMINED, conditions=conditions,
                                    diagnostics=search.diagnostics)
        rho, shot = found
        left = _level_branch(n, w, delta, c, t0, rho, level.reduced(rho), 0.0, increasing=True)
        right = shot.orbit.samples

    profile, jump = _glue(left, right, t0, window)
    diagnostics = dict(search.diagnostics, glue_jump=jump, kappa=shot.terminal_w,
                       level_w=level(rho), side=side.value)
    log_bold(f"heteroclinic through rho*={rho!r} at t0={t0!r}")
    return ConnectionResult(Classification.HETEROCLINIC, rho_star=rho, profile=profile,
                            conditions=conditions, diagnostics=diagnostics)


def _peak_glued(n, w, delta, t0, c_left, c_right, window=None):
    '''
        Homoclinic with its maximum v0 at t0: both sides sit on the zero level
        of their own constant weight.
    '''
    left = _level_branch(n, w, delta, c_left, t0, n.v0, 0.0, 0.0, increasing=True)
    right = _level_branch(n, w, delta, c_right, t0, n.v0, 0.0, 0.0, increasing=False)
    return _glue(left, right, t0, window)


def find_homoclinic(n, w, delta, grid_points=DEFAULT_GRID_POINTS, method=HalfLineMethod.REDUCED,
                    parallel=False, window=None):
    _require_bistable(n)
    if n.is_balanced:
        raise HypothesisViolation('(f2)', 'a homoclinic needs F(1) > 0')
    report = check_hypotheses(w, VaryingSide.LEFT_VARYING)
    t0, c, eta = report.t0, report.c, report.eta
    conditions = ConditionReport()
    conditions.add('cond-c-eta', c, eta, '<=')

    level = energy_level_curve(n, delta, c, LevelAnchor.THROUGH_V0)
    search = _BranchSearch(n, w, delta, t0, HalfLine.LEFT, level, method)
    if w.tail_constant_left is None:
        found = search.run(0.0, n.alpha, grid_points, parallel)
    else:
        # kappa is the zero level of the left weight: the gap keeps one sign
        found = None
    diagnostics = dict(search.diagnostics)

    if found is not None and not search.coincident:
        rho, shot = found
        rise = _rise_to_peak(n, w, delta, t0, rho, level.reduced(rho), n.v0)
        fall = _level_branch(n, w, delta, c, rise[-1].t, n.v0, 0.0, 0.0, increasing=False)
        right = rise + [s for s in fall if s.t > rise[-1].t]
        profile, jump = _glue(shot.orbit.samples, right, t0, window)
        diagnostics.update(glue='transversal', kappa=shot.terminal_w, level_w=level(rho))
    elif w.tail_constant_left is not None and c <= eta:
        rho = n.v0
        profile, jump = _peak_glued(n, w, delta, t0, w.tail_constant_left, c, window)
        diagnostics.update(glue='peak')
    else:
        log_warning("no intersection with the level through (v0, 0): undetermined")
        return ConnectionResult(Classification.UNDETERMINED, conditions=conditions, diagnostics=diagnostics)

    diagnostics['glue_jump'] = jump
    log_bold(f"homoclinic with peak {n.v0!r}, glued at rho={rho!r}")
    return ConnectionResult(Classification.HOMOCLINIC, rho_star=rho, profile=profile,
                            conditions=conditions, peak=n.v0, diagnostics=diagnostics)


def measured_period(segment):
    '''
        Mean distance between every other zero of w, or nan with fewer than
        three. Samples lying on w = 0 count: integration starts there are not
        reported as events.
    '''
    zeros = [e.state.t for e in segment.events if e.spec.kind.value == 'w-zero']
    zeros += [s.t for s in segment.samples if s.w == 0.0]
    times = []
    for t in sorted(zeros):
        if not times or t - times[-1] > EVENT_MERGE:
            times.append(t)
    if len(times) < 3:
        return math.nan
    return float(np.mean([b - a for a, b in zip(times, times[2:])]))


def _periodic_tail(n, w, delta, start, period, periods):
    events = [EventSpec.w_zero(terminal=False)]
    return integrate_t(n, w, delta, start, Direction.FORWARD, events, t_max=periods * period)


def find_definitively_periodic(n, w, delta, grid_points=DEFAULT_GRID_POINTS,
                               method=HalfLineMethod.REDUCED, parallel=False, window=None,
                               periods=PERIODIC_TAIL_PERIODS):
    '''
        A solution leaving 0 at -inf and periodic after t0. Among the grid
        points whose state at t0 lies strictly inside the homoclinic loop of
        the right weight, the one farthest from both the loop and the center
        is used; the orbit turns at (w_bar, 0).
    '''
    _require_bistable(n)
    report = check_hypotheses(w, VaryingSide.LEFT_VARYING)
    t0, c, eta = report.t0, report.c, report.eta
    conditions = ConditionReport()
    floor = (c / delta) * n.F(n.alpha)

    grid = _rho_grid(0.0, n.alpha, grid_points)
    points = kappa_branch(n, w, delta, t0, HalfLine.LEFT, grid, method=method, parallel=parallel)
    candidates = []
    for p in points:
        if not p.converged:
            continue
        level = energy(p.rho, p.kappa, delta, c, n)
        margin = min(level - floor, -level)
        if margin > 0.0:
            candidates.append((margin, p.rho))
    diagnostics = {'grid_points': len(grid), 'admissible_points': len(candidates)}
    if not candidates:
        log_warning("no branch point inside the homoclinic loop: undetermined")
        return ConnectionResult(Classification.UNDETERMINED, conditions=conditions, diagnostics=diagnostics)

    _, rho = max(candidates)
    shot = halfline_solution(n, w, delta, t0, HalfLine.LEFT, rho, method=method)
    level_F = delta * float(energy(rho, shot.terminal_w, delta, c, n)) / c
    w_bar = float(brentq(lambda v: n.F(v) - level_F, n.alpha, n.v0, xtol=ROOT_TOLERANCE))
    gamma = gamma_of_level(n, level_F)
    period = 2.0 * period_T(n, gamma, delta / c)
    conditions.add('cond-c2-h2', c, periodic_condition_bound(n, eta, w_bar), '<=')

    tail = _periodic_tail(n, w, delta, PhaseState(t0, rho, shot.terminal_w), period, periods)
    profile, jump = _glue(shot.orbit.samples, tail.samples, t0, window,
                          termination=Termination.TIME_LIMIT)
    diagnostics.update(glue_jump=jump, w_bar=w_bar, gamma=gamma, measured_period=measured_period(tail),
                       kappa=shot.terminal_w)
    log_bold(f"definitively periodic after t0, period {period!r}")
    return ConnectionResult(Classification.DEFINITIVELY_PERIODIC, rho_star=rho, profile=profile,
                            conditions=conditions, period=period, diagnostics=diagnostics)


# exit detection

@dataclass
class ExitReport:
    exited: bool
    segment: OrbitSegment
    exit_state: Optional[PhaseState] = None

    def to_dict(self):
        return {'exited': self.exited,
                'exit_state': None if self.exit_state is None else self.exit_state.to_dict(),
                'termination': self.segment.termination.value}


def detect_exit(n, w, delta, start, horizon=EXIT_HORIZON):
    '''
        Forward integration from start; an exit is v crossing 0 or 1 with
        |v'| > EXIT_SLOPE within the horizon.
    '''
    events = [EventSpec.v_level(0.0, direction=-1), EventSpec.v_level(1.0, direction=1)]
    segment = integrate_t(n, w, delta, start, Direction.FORWARD, events, t_max=horizon)
    hit = segment.terminal_event
    if (hit is not None and segment.termination == Termination.HIT_V_LEVEL
            and abs(hit.state.vprime) > EXIT_SLOPE):
        return ExitReport(True, segment, hit.state)
    return ExitReport(False, segment)


# stepwise weights

def _stepwise_prediction(n, c1, c2):
    ratio = c2 / c1
    tie = abs(ratio - 1.0) <= STEPWISE_TIE
    if n.is_balanced:
        if tie:
            return Classification.HETEROCLINIC, 0.5 * n.alpha
        return (Classification.DEFINITIVELY_PERIODIC if ratio > 1.0
                else Classification.FINITE_TIME_EXIT), None
    if tie:
        return Classification.HOMOCLINIC, None
    if ratio > 1.0:
        return Classification.DEFINITIVELY_PERIODIC, None
    top = stepwise_family(n, n.alpha)
    if math.isclose(ratio, top, rel_tol=STEPWISE_TIE):
        return Classification.HETEROCLINIC, n.alpha
    if ratio > top:
        return Classification.FINITE_TIME_EXIT, None
    rho = float(brentq(lambda r: stepwise_family(n, r) - ratio, 0.0, n.alpha, xtol=1e-15, rtol=1e-14))
    if rho < RHO_TOLERANCE:
        raise DegenerateCase(f"c2/c1={ratio!r} meets the connecting family only as rho -> 0",
                             {'c1': c1, 'c2': c2, 'rho': rho})
    return Classification.HETEROCLINIC, rho


def _stepwise_witness(n, c1, c2, delta, result, horizon, window, t0):
    w = WeightProfile.stepwise(c1, c2, t0=t0)
    if result.classification == Classification.HOMOCLINIC:
        profile, jump = _peak_glued(n, w, delta, t0, c1, c2, window)
        return profile, {'glue_jump': jump, 'glue': 'peak'}

    rho = result.rho_star if result.classification == Classification.HETEROCLINIC else 0.5 * n.alpha
    y0 = -(c1 / delta) * n.F(rho)
    left = _level_branch(n, w, delta, c1, t0, rho, y0, 0.0, increasing=True)
    if result.classification == Classification.HETEROCLINIC:
        right = _level_branch(n, w, delta, c2, t0, rho, y0, 1.0, increasing=True)
        profile, jump = _glue(left, right, t0, window)
        return profile, {'glue_jump': jump}

    start = PhaseState(t0, rho, momentum_from_reduced(y0))
    if result.classification == Classification.DEFINITIVELY_PERIODIC:
        tail = _periodic_tail(n, w, delta, start, result.period, PERIODIC_TAIL_PERIODS)
        profile, jump = _glue(left, tail.samples, t0, window, termination=Termination.TIME_LIMIT)
        return profile, {'glue_jump': jump, 'measured_period': measured_period(tail)}

    report = detect_exit(n, w, delta, start, horizon)
    profile, jump = _glue(left, report.segment.samples, t0, window, termination=report.segment.termination)
    return profile, {'glue_jump': jump, 'exit': report.to_dict()}


def classify_stepwise(n, c1, c2, delta, construct=True, horizon=EXIT_HORIZON, window=None, t0=0.0):
    '''
        Classification for q = c1 before t0 and c2 after, read off c2/c1
        against the connecting family. The prediction does not use delta;
        the witness orbit does, and is built by energy matching at t0.
    '''
    _require_bistable(n)
    if not (c1 > 0.0 and c2 > 0.0):
        raise DomainError(f"c1 and c2 must be positive, got {c1!r}, {c2!r}")
    if not delta > 0.0:
        raise DomainError(f"delta must be positive, got {delta!r}")
    classification, rho = _stepwise_prediction(n, c1, c2)

    conditions = ConditionReport()
    top = stepwise_family(n, n.alpha)
    if not n.is_balanced:
        conditions.add('cond-c', c2, c1 * top, '<=')
    result = ConnectionResult(classification, rho_star=rho, conditions=conditions,
                              diagnostics={'ratio': c2 / c1, 'family_sup': top})
    if classification == Classification.HOMOCLINIC:
        result.peak = n.v0
    if classification == Classification.DEFINITIVELY_PERIODIC:
        glue = 0.5 * n.alpha
        level_F = (1.0 - c1 / c2) * n.F(glue)
        result.period = 2.0 * period_T(n, gamma_of_level(n, level_F), delta / c2)
    log_intent(f"c1={c1!r} c2={c2!r}: {classification.value}", 1)

    if construct:
        profile, extra = _stepwise_witness(n, c1, c2, delta, result, horizon, window, t0)
        result.profile = profile
        result.diagnostics.update(extra)
    return result


@dataclass(frozen=True)
class StepwiseCell:
    c1: float
    c2: float
    delta: float
    classification: Optional[str]
    rho_star: Optional[float] = None
    message: str = ''

    def to_row(self):
        return (self.c1, self.c2, self.delta, self.classification or 'degenerate', self.rho_star)


def _classify_cell(job):
    n, c1, c2, delta = job
    try:
        result = classify_stepwise(n, c1, c2, delta, construct=False)
    except DegenerateCase as e:
        return StepwiseCell(c1, c2, delta, None, message=str(e))
    return StepwiseCell(c1, c2, delta, result.classification.value, result.rho_star)


def classify_grid(n, c1_values, c2_values, deltas=(0.1,), parallel=False, workers=None):
    jobs = [(n, float(c1), float(c2), float(d)) for d in deltas for c1 in c1_values for c2 in c2_values]
    if parallel and len(jobs) > 1:
        with multiprocessing.Pool(processes=workers) as pool:
            return pool.map(_classify_cell, jobs)
    return [_classify_cell(job) for job in jobs]
