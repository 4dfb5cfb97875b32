'''
Shooting for the mixed Dirichlet-Neumann problems on [t0 - T, t0] and
[t0, t0 + T], their half-line limits as T grows, and the branch kappa(rho)
of terminal momenta of half-line solutions.
'''

import math
import multiprocessing
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np
from scipy.optimize import brentq

from minkowski_orbits.analysis.dynamics import (Direction, EventSpec,
                                                PhaseState,
                                                ReducedCoordinate,
                                                ReducedState, Termination,
                                                integrate_t,
                                                momentum_from_reduced,
                                                reduced_march,
                                                segment_from_reduced)
from minkowski_orbits.config.logging import log_intent, log_warning
from minkowski_orbits.constants import (ATOL, CAUCHY_TOLERANCE, DEFAULT_T1,
                                        FAR_END_TOLERANCE, MAX_DOUBLINGS,
                                        MAX_RHO_STEP, POLISH_WINDOW,
                                        REDUCED_START_MOMENTUM, REDUCED_V_MIN,
                                        ROOT_TOLERANCE, SCAN_DIVISIONS,
                                        SHOOT_LOG_TOLERANCE, SHOOT_RESIDUAL)
from minkowski_orbits.exceptions import (BracketingFailure, DomainError,
                                         HypothesisViolation,
                                         MonotonicityLost, NoConvergence,
                                         NumericalFailure)


class HalfLine(Enum):
    LEFT = 'left'
    RIGHT = 'right'


class HalfLineMethod(Enum):
    DOUBLING = 'doubling'
    REDUCED = 'reduced'


@dataclass
class ShootResult:
    omega: float
    orbit: object
    rho: float
    terminal_w: float
    monotone_certificate: bool
    side: HalfLine = HalfLine.LEFT
    horizon: float = math.nan
    converged: bool = True
    trend: list = field(default_factory=list)
    method: HalfLineMethod = HalfLineMethod.DOUBLING

    @property
    def kappa(self):
        return self.terminal_w

    def to_dict(self):
        return {
            'omega': self.omega,
            'rho': self.rho,
            'terminal_w': self.terminal_w,
            'monotone_certificate': self.monotone_certificate,
            'side': self.side.value,
            'horizon': self.horizon,
            'converged': self.converged,
            'trend': list(self.trend),
            'method': self.method.value,
            'orbit': self.orbit.to_dict(),
        }


class _Geometry(object):
    '''
        Where the Neumann end sits and how the shooting parameter s maps to
        omega: omega = e^s on the left, omega = 1 - e^s on the right.
    '''

    def __init__(self, side, t0, horizon):
        self.side = HalfLine(side)
        self.t0 = t0
        self.horizon = horizon
        if self.side == HalfLine.LEFT:
            self.t_neumann = t0 - horizon
            self.direction = Direction.FORWARD
            self.equilibrium = 0.0
            self.crossing = 1
        else:
            self.t_neumann = t0 + horizon
            self.direction = Direction.BACKWARD
            self.equilibrium = 1.0
            self.crossing = -1

    def omega(self, s):
        distance = math.exp(s)
        return distance if self.side == HalfLine.LEFT else 1.0 - distance

    def log_gap(self, value):
        return math.log(abs(value - self.equilibrium))

    def weight_window(self):
        return tuple(sorted((self.t_neumann, self.t0)))


def _check_rho(n, side, rho):
    n.require_structure()
    side = HalfLine(side)
    if side == HalfLine.LEFT:
        if not 0.0 < rho < 1.0 or rho == n.alpha:
            raise DomainError(f"left Dirichlet value must lie in ]0, alpha[ or ]alpha, 1[, got {rho!r}")
    elif not n.beta < rho < 1.0:
        raise DomainError(f"right Dirichlet value must lie in ]beta, 1[ = ]{n.beta!r}, 1[, got {rho!r}")
    return side


def log_omega_gamma_bound(n, w, delta, T, gamma, t0=None, side=HalfLine.LEFT):
    geometry = _Geometry(side, w.t0 if t0 is None else t0, T)
    a, b = geometry.weight_window()
    exponent = w.sup_on(a, b) * n.lipschitz * T * T / delta
    return geometry.log_gap(gamma) - exponent


def omega_gamma_bound(n, w, delta, T, gamma, t0=None, side=HalfLine.LEFT):
    '''
        Smallness threshold below which the orbit from (omega, 0) at the
        Neumann end stays between the equilibrium and gamma with nonzero slope.
        On the right the threshold is a distance from 1.
    '''
    n.require_structure()
    side = HalfLine(side)
    if not T > 0.0:
        raise DomainError(f"T must be positive, got {T!r}")
    if side == HalfLine.LEFT and not 0.0 < gamma < n.alpha:
        raise DomainError(f"gamma must lie in ]0, alpha[, got {gamma!r}")
    if side == HalfLine.RIGHT and not n.beta < gamma < 1.0:
        raise DomainError(f"gamma must lie in ]beta, 1[, got {gamma!r}")
    distance = math.exp(log_omega_gamma_bound(n, w, delta, T, gamma, t0, side))
    return distance if side == HalfLine.LEFT else 1.0 - distance


def poincare_map(n, w, delta, t_from, t_to, state):
    if t_from == t_to:
        return tuple(state)
    direction = Direction.FORWARD if t_to > t_from else Direction.BACKWARD
    segment = integrate_t(n, w, delta, PhaseState(t_from, state[0], state[1]), direction,
                          t_max=abs(t_to - t_from))
    end = segment.final
    return end.v, end.w


def poincare_image(n, w, delta, t_from, t_to, omegas):
    '''
        Images of the Neumann segment {(omega, 0)} under the map from t_from to t_to.
    '''
    rows = []
    for omega in omegas:
        v, momentum = poincare_map(n, w, delta, t_from, t_to, (float(omega), 0.0))
        rows.append((float(omega), v, momentum))
    return np.array(rows)


class _MixedShooter(object):
    def __init__(self, n, w, delta, t0, T, rho, side):
        self.n = n
        self.w = w
        self.delta = delta
        self.rho = rho
        self.geometry = _Geometry(side, t0, T)

    def _atol(self, s):
        return max(min(ATOL, ATOL * math.exp(s) / abs(self.rho - self.geometry.equilibrium)), 1e-300)

    def _start(self, s):
        return PhaseState(self.geometry.t_neumann, self.geometry.omega(s), 0.0)

    def residual(self, s):
        '''
            Negative while v has not reached rho by t0; once it has, the time
            left between the first hit and t0.
        '''
        geometry = self.geometry
        segment = integrate_t(self.n, self.w, self.delta, self._start(s), geometry.direction,
                              [EventSpec.v_level(self.rho, geometry.crossing)],
                              t_max=geometry.horizon, atol=self._atol(s))
        if segment.termination == Termination.HIT_V_LEVEL:
            return abs(geometry.t0 - segment.terminal_event.state.t)
        return geometry.crossing * (segment.final.v - self.rho)

    def bracket(self):
        geometry = self.geometry
        s_low = log_omega_gamma_bound(self.n, self.w, self.delta, geometry.horizon,
                                      self.rho if self.rho < self.n.alpha or geometry.side == HalfLine.RIGHT
                                      else self.n.alpha * 0.5,
                                      geometry.t0, geometry.side)
        if geometry.side == HalfLine.LEFT:
            s_top = math.log(min(self.rho, self.n.alpha))
        else:
            s_top = geometry.log_gap(self.rho)
        step = (s_top - s_low) / SCAN_DIVISIONS
        overshoot = None
        for k in range(SCAN_DIVISIONS + 1):
            s = s_top - k * step
            value = self.residual(s)
            if value == 0.0:
                return s, s
            if value > 0.0:
                overshoot = s
            elif overshoot is not None:
                return s, overshoot
        raise BracketingFailure(
            f"no sign change of the shooting residual for rho={self.rho!r}, T={geometry.horizon!r}",
            {'rho': self.rho, 'T': geometry.horizon, 's_low': s_low, 's_top': s_top})

    def _terminal(self, s):
        return integrate_t(self.n, self.w, self.delta, self._start(s), self.geometry.direction,
                           t_max=self.geometry.horizon, atol=self._atol(s))

    def _terminal_gap(self, s):
        return self.geometry.crossing * (self._terminal(s).final.v - self.rho)

    def polish(self, s):
        '''
            The event residual and the full integration to t0 disagree at the
            level of the dense-output error. Refine s on v(t0) - rho itself in a
            widening window around the event root.
        '''
        gap = self._terminal_gap(s)
        if abs(gap) < SHOOT_RESIDUAL:
            return s
        width = SHOOT_LOG_TOLERANCE
        while width <= POLISH_WINDOW:
            for other in (s - width, s + width):
                other_gap = self._terminal_gap(other)
                if abs(other_gap) < SHOOT_RESIDUAL:
                    return other
                if other_gap * gap < 0.0:
                    return brentq(self._terminal_gap, min(s, other), max(s, other),
                                  xtol=SHOOT_LOG_TOLERANCE * 1e-2)
            width *= 10.0
        return s

    def solve(self):
        low, high = self.bracket()
        s = low if low == high else brentq(self.residual, low, high, xtol=SHOOT_LOG_TOLERANCE)
        s = self.polish(s)
        geometry = self.geometry
        orbit = self._terminal(s)
        end = orbit.final
        if abs(end.v - self.rho) >= SHOOT_RESIDUAL:
            raise BracketingFailure(
                f"shooting residual {abs(end.v - self.rho):.3e} at rho={self.rho!r}",
                {'rho': self.rho, 'T': geometry.horizon, 'v_t0': end.v})
        interior = orbit.samples[1:] if geometry.side == HalfLine.LEFT else orbit.samples[:-1]
        certificate = all(state.w > 0.0 for state in interior)
        return ShootResult(omega=geometry.omega(s), orbit=orbit, rho=self.rho, terminal_w=end.w,
                           monotone_certificate=certificate, side=geometry.side,
                           horizon=geometry.horizon)


def shoot_mixed_left(n, w, delta, t0, T, rho):
    _check_rho(n, HalfLine.LEFT, rho)
    if not T > 0.0:
        raise DomainError(f"T must be positive, got {T!r}")
    return _MixedShooter(n, w, delta, t0, T, rho, HalfLine.LEFT).solve()


def shoot_mixed_right(n, w, delta, t0, T, rho):
    _check_rho(n, HalfLine.RIGHT, rho)
    if not T > 0.0:
        raise DomainError(f"T must be positive, got {T!r}")
    return _MixedShooter(n, w, delta, t0, T, rho, HalfLine.RIGHT).solve()


def _half_line_bounds(w, t0, side):
    if HalfLine(side) == HalfLine.LEFT:
        return w.inf_on(-math.inf, t0), w.sup_on(-math.inf, t0)
    return w.inf_on(t0, math.inf), w.sup_on(t0, math.inf)


def reduced_momentum_bounds(n, w, delta, rho, side=HalfLine.LEFT, t0=None):
    '''
        Bracket for y(rho) of a half-line solution. Inside the sign range of f
        the weight bounds give it directly; past alpha on the left the a priori
        bound with F(alpha) is used.
    '''
    side = HalfLine(side)
    t0 = w.t0 if t0 is None else t0
    eta, sup_norm = _half_line_bounds(w, t0, side)
    if side == HalfLine.LEFT and rho < n.alpha:
        return -eta * n.F(rho) / delta, -sup_norm * n.F(rho) / delta
    if side == HalfLine.RIGHT:
        drop = n.F(1.0) - n.F(rho)
        return eta * drop / delta, sup_norm * drop / delta
    ceiling = (-sup_norm * n.F(n.alpha) - eta * (n.F(rho) - n.F(n.alpha))) / delta
    return 0.0, ceiling


def kappa_bounds(n, w, delta, rho, side=HalfLine.LEFT, t0=None):
    side = _check_rho(n, side, rho)
    if side == HalfLine.LEFT and rho > n.alpha:
        raise DomainError(f"kappa bounds hold for rho in ]0, alpha[, got {rho!r}")
    low, high = reduced_momentum_bounds(n, w, delta, rho, side, t0)
    return momentum_from_reduced(low), momentum_from_reduced(high)


class _ReducedShooter(object):
    '''
        Half-line solution in the v-domain: march from (rho, Y) at t0 to
        within REDUCED_V_MIN of the equilibrium in x = ln|v - equilibrium|
        and adjust Y until y matches its local form there.
    '''

    def __init__(self, n, w, delta, t0, rho, side):
        self.n = n
        self.w = w
        self.delta = delta
        self.t0 = t0
        self.rho = rho
        self.side = HalfLine(side)
        self.anchor = 0.0 if self.side == HalfLine.LEFT else 1.0
        self.v_end = REDUCED_V_MIN if self.side == HalfLine.LEFT else 1.0 - REDUCED_V_MIN
        self.coordinate = ReducedCoordinate(self.anchor)

    def march(self, Y):
        return reduced_march(self.n, self.w, self.delta, 1.0, self.rho, Y, self.t0, self.v_end,
                             coordinate=self.coordinate)

    def residual(self, Y):
        try:
            v, y, t, _, _ = self.march(Y)
        except MonotonicityLost as e:
            return -abs(self.coordinate.x_of(e.v_location) - self.coordinate.x_of(self.v_end)) - 1e-300
        target = -(self.w.eval_q(t) / self.delta) * (self.n.F(v) - self.n.F(self.anchor))
        return y - target

    def solve(self):
        low, high = reduced_momentum_bounds(self.n, self.w, self.delta, self.rho, self.side, self.t0)
        if high <= 0.0:
            raise BracketingFailure(f"no half-line solution can reach rho={self.rho!r}",
                                    {'rho': self.rho, 'ceiling': high})
        low = max(low * (1.0 - 1e-6), REDUCED_START_MOMENTUM)
        high = high * (1.0 + 1e-6)
        if self.residual(low) > 0.0:
            raise BracketingFailure(f"no half-line solution reaches rho={self.rho!r}",
                                    {'rho': self.rho, 'y_low': low})
        for _ in range(30):
            if self.residual(high) > 0.0:
                break
            high *= 2.0
        else:
            raise BracketingFailure(f"reduced momentum bracket did not close at rho={self.rho!r}")
        Y = brentq(self.residual, low, high, xtol=1e-15, rtol=1e-14)
        v, y, t, states, _ = self.march(Y)
        path = [ReducedState(self.rho, Y, self.t0)] + states
        orbit = segment_from_reduced(path, Termination.REACHED_EQUILIBRIUM)
        return ShootResult(omega=v, orbit=orbit, rho=self.rho, terminal_w=momentum_from_reduced(Y),
                           monotone_certificate=all(s.y > 0.0 for s in path), side=self.side,
                           horizon=abs(self.t0 - t), method=HalfLineMethod.REDUCED)


def _far_end_reached(result):
    if result.side == HalfLine.LEFT:
        return result.omega < FAR_END_TOLERANCE
    return 1.0 - result.omega < FAR_END_TOLERANCE


def halfline_solution(n, w, delta, t0, side, rho, method=HalfLineMethod.DOUBLING, T1=DEFAULT_T1,
                      tolerance=CAUCHY_TOLERANCE, max_doublings=MAX_DOUBLINGS):
    '''
        Solution on the half-line ending at t0 with value rho there and
        tending to the equilibrium at the far end.

        doubling: solve the mixed problem on T1, 2 T1, 4 T1, ... until the
        terminal momentum moves by less than tolerance.
        reduced: shoot on the terminal reduced momentum in the v-domain.
    '''
    side = _check_rho(n, side, rho)
    method = HalfLineMethod(method)
    if method == HalfLineMethod.REDUCED:
        return _ReducedShooter(n, w, delta, t0, rho, side).solve()

    shoot = shoot_mixed_left if side == HalfLine.LEFT else shoot_mixed_right
    trend = []
    previous = None
    horizon = T1
    for _ in range(max_doublings + 1):
        result = shoot(n, w, delta, t0, horizon, rho)
        if previous is not None:
            change = abs(result.terminal_w - previous.terminal_w)
            trend.append(change)
            log_intent(f"rho={rho!r} T={horizon!r}: terminal momentum moved by {change:.3e}", 2)
            if change < tolerance and _far_end_reached(result):
                return replace(result, converged=True, trend=trend)
        previous = result
        horizon *= 2.0
    raise NoConvergence(
        f"half-line solution at rho={rho!r} did not settle after {max_doublings} doublings", trend)


@dataclass(frozen=True)
class KappaPoint:
    rho: float
    kappa: float
    converged: bool
    lower_bound: float
    upper_bound: float
    omega: float = math.nan
    message: str = ''

    def to_row(self):
        return (self.rho, self.kappa, self.converged, self.lower_bound, self.upper_bound)


def _kappa_point(job):
    n, w, delta, t0, side, rho, method, options = job
    side = HalfLine(side)
    try:
        low, high = kappa_bounds(n, w, delta, rho, side, t0)
    except DomainError:
        low = high = math.nan
    try:
        result = halfline_solution(n, w, delta, t0, side, rho, method=method, **options)
    except NumericalFailure as e:
        log_warning(f"kappa({rho!r}) not converged: {e}")
        return KappaPoint(rho, math.nan, False, low, high, message=str(e))
    return KappaPoint(rho, result.terminal_w, True, low, high, omega=result.omega)


def kappa_branch(n, w, delta, t0, side, rho_grid, method=HalfLineMethod.DOUBLING, parallel=False,
                 workers=None, **options):
    '''
        kappa(rho) over the grid. Points that fail to converge are flagged
        and reported, never fatal.
    '''
    side = HalfLine(side)
    for rho in rho_grid:
        _check_rho(n, side, rho)
    method = HalfLineMethod(method).value
    jobs = [(n, w, delta, t0, side.value, float(rho), method, options) for rho in rho_grid]
    if parallel and len(jobs) > 1:
        with multiprocessing.Pool(processes=workers) as pool:
            return pool.map(_kappa_point, jobs)
    points = []
    for index, job in enumerate(jobs):
        log_intent(f"kappa branch point {index + 1}/{len(jobs)}: rho={job[5]!r}", 1)
        points.append(_kappa_point(job))
    return points


@dataclass(frozen=True)
class MaxRhoReport:
    analytic: float
    empirical: float
    step: float
    probes: tuple = ()

    def to_dict(self):
        return {'analytic': self.analytic, 'empirical': self.empirical, 'step': self.step,
                'probes': [list(p) for p in self.probes]}


def condition_eta_threshold(n, sup_norm):
    return sup_norm * (-n.F(n.alpha)) / (n.F(1.0) - n.F(n.alpha))


def analytic_rho_bound(n, eta, sup_norm):
    '''
        The rho* with -sup q F(alpha) - eta (F(rho*) - F(alpha)) = 0. It is at
        least v0 and no left half-line solution reaches past it.
    '''
    target = -n.F(n.alpha) * (sup_norm / eta - 1.0)
    if target <= 0.0:
        return n.v0
    if target >= n.F(1.0):
        return 1.0
    return float(brentq(lambda v: n.F(v) - target, n.v0, 1.0, xtol=ROOT_TOLERANCE))


def max_rho_bound(n, w, delta, t0=None, method=HalfLineMethod.REDUCED, step=MAX_RHO_STEP, **options):
    '''
        Largest Dirichlet value a left half-line solution can take.

        analytic: the rho* with -sup q F(alpha) - eta (F(rho*) - F(alpha)) = 0;
        it is at least v0 and bounds the empirical value from above.
        empirical: the last solvable value of the upward scan alpha + k step,
        stopped at the first value without a solution.
    '''
    n.require_structure()
    t0 = w.t0 if t0 is None else t0
    eta, sup_norm = _half_line_bounds(w, t0, HalfLine.LEFT)
    threshold = condition_eta_threshold(n, sup_norm)
    if not eta > threshold:
        raise HypothesisViolation('cond-eta', f"eta={eta!r} must exceed {threshold!r}")

    analytic = analytic_rho_bound(n, eta, sup_norm)

    empirical = n.alpha
    probes = []
    k = 1
    while n.alpha + k * step < 1.0:
        rho = n.alpha + k * step
        try:
            halfline_solution(n, w, delta, t0, HalfLine.LEFT, rho, method=method, **options)
            ok = True
        except NumericalFailure:
            ok = False
        probes.append((rho, ok))
        log_intent(f"M probe rho={rho!r}: {'solvable' if ok else 'no solution'}", 1)
        if not ok:
            break
        empirical = rho
        k += 1
    return MaxRhoReport(analytic=analytic, empirical=empirical, step=step, probes=tuple(probes))
