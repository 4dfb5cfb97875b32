'''
Behaviour of the constructed connections as delta varies: the ramp and tent
profiles they approach as delta goes to 0, and the flattening around v(t0)
as delta grows.
'''

import math
import multiprocessing
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from minkowski_orbits.analysis.autonomous import LimitProfile, segment_values
from minkowski_orbits.analysis.connections import (Classification,
                                                   classify_stepwise,
                                                   find_heteroclinic,
                                                   find_homoclinic)
from minkowski_orbits.analysis.shooting import HalfLineMethod
from minkowski_orbits.config.logging import log_intent
from minkowski_orbits.constants import (DEFAULT_GRID_POINTS,
                                        SWEEP_HALF_WINDOW,
                                        SWEEP_WINDOW_POINTS)
from minkowski_orbits.exceptions import DomainError, UndeterminedClassification


class SweepKind(Enum):
    HETEROCLINIC = 'heteroclinic'
    HOMOCLINIC = 'homoclinic'


def limit_profile_heteroclinic(v_star, t0=0.0):
    if not v_star > 0.0:
        raise DomainError(f"v_star must be positive, got {v_star!r}")
    start = t0 - v_star
    return LimitProfile([start, start + 1.0], [0, 1, 0], anchor=(t0, v_star))


def limit_profile_homoclinic(v_star, v0, t0=0.0):
    '''
        Tent of height v0 rising through (t0, v_star). v_star = v0 puts the
        peak at t0.
    '''
    if not 0.0 < v_star <= v0:
        raise DomainError(f"v_star must lie in ]0, v0] = ]0, {v0!r}], got {v_star!r}")
    start = t0 - v_star
    return LimitProfile([start, start + v0, start + 2.0 * v0], [0, 1, -1, 0], anchor=(t0, v_star))


@dataclass
class SweepReport:
    kind: SweepKind
    deltas: list
    v_star_estimates: list
    sup_distances: list
    flattening: list
    window: tuple
    v_star: float
    v_star_spread: float
    peaks: list = field(default_factory=list)
    ramp_slopes: list = field(default_factory=list)
    profiles: list = field(default_factory=list, repr=False)

    @property
    def converging(self):
        return all(b <= a for a, b in zip(self.sup_distances, self.sup_distances[1:]))

    @property
    def flattening_shrinks(self):
        '''
            The deltas are descending, so flattening must grow along the list.
        '''
        return all(b >= a for a, b in zip(self.flattening, self.flattening[1:]))

    def rows(self):
        return list(zip(self.deltas, self.v_star_estimates, self.sup_distances, self.flattening))

    def to_dict(self):
        return {
            'kind': self.kind.value,
            'deltas': list(self.deltas),
            'v_star_estimates': list(self.v_star_estimates),
            'sup_distances': list(self.sup_distances),
            'flattening': list(self.flattening),
            'window': list(self.window),
            'v_star': self.v_star,
            'v_star_spread': self.v_star_spread,
            'peaks': list(self.peaks),
            'ramp_slopes': list(self.ramp_slopes),
            'converging': self.converging,
        }


def _construct(job):
    n, w, kind, delta, options = job
    kind = SweepKind(kind)
    c_left, c_right = w.tail_constant_left, w.tail_constant_right
    if kind == SweepKind.HETEROCLINIC and c_left is not None and c_right is not None:
        result = classify_stepwise(n, c_left, c_right, delta, t0=w.t0)
    elif kind == SweepKind.HETEROCLINIC:
        result = find_heteroclinic(n, w, delta, **options)
    else:
        result = find_homoclinic(n, w, delta, **options)
    if result.classification.value != kind.value:
        raise UndeterminedClassification(
            f"no {kind.value} at delta={delta!r}: got {result.classification.value}",
            {'delta': delta, 'classification': result.classification.value})
    log_intent(f"delta={delta!r}: {kind.value} constructed", 1)
    return result.profile


def _extrapolated_v_star(deltas, values):
    if len(deltas) == 1:
        return values[0], 0.0
    (d_a, v_a), (d_b, v_b) = (deltas[-1], values[-1]), (deltas[-2], values[-2])
    estimate = v_a - d_a * (v_b - v_a) / (d_b - d_a)
    return estimate, abs(estimate - v_a)


def delta_sweep(n, w, kind, deltas, method=HalfLineMethod.REDUCED, grid_points=DEFAULT_GRID_POINTS,
                parallel=False, workers=None, half_window=SWEEP_HALF_WINDOW, points=SWEEP_WINDOW_POINTS):
    '''
        Construct the connection for each delta, largest first, and compare it
        on [t0 - half_window, t0 + half_window] with the limit profile anchored
        at the v* extrapolated from the two smallest deltas.
    '''
    kind = SweepKind(kind)
    deltas = sorted((float(d) for d in deltas), reverse=True)
    if not deltas or deltas[-1] <= 0.0:
        raise DomainError(f"deltas must be a nonempty list of positive reals, got {deltas!r}")
    options = {'method': HalfLineMethod(method), 'grid_points': grid_points}
    jobs = [(n, w, kind.value, d, options) for d in deltas]
    if parallel and len(jobs) > 1:
        with multiprocessing.Pool(processes=workers) as pool:
            profiles = pool.map(_construct, jobs)
    else:
        profiles = [_construct(job) for job in jobs]

    t0 = w.t0
    values = [p.at(t0).v for p in profiles]
    v_star, spread = _extrapolated_v_star(deltas, values)
    if kind == SweepKind.HETEROCLINIC:
        v_star = min(max(v_star, 1e-12), n.alpha)
        limit = limit_profile_heteroclinic(v_star, t0)
    else:
        v_star = min(max(v_star, 1e-12), n.v0)
        limit = limit_profile_homoclinic(v_star, n.v0, t0)

    window = (t0 - half_window, t0 + half_window)
    times = np.linspace(window[0], window[1], points)
    target = limit.evaluate(times)
    distances, flattening, peaks, slopes = [], [], [], []
    for profile, value in zip(profiles, values):
        sampled = segment_values(profile, times)
        distances.append(float(np.max(np.abs(sampled - target))))
        flattening.append(float(np.max(np.abs(sampled - value))))
        peaks.append(float(np.max(profile.v)))
        slopes.append(_ramp_slope(profile, t0 - v_star + 0.5 * min(1.0, 2.0 * n.v0)))

    return SweepReport(kind=kind, deltas=deltas, v_star_estimates=values, sup_distances=distances,
                       flattening=flattening, window=window, v_star=v_star, v_star_spread=spread,
                       peaks=peaks, ramp_slopes=slopes, profiles=profiles)


def _ramp_slope(profile, t):
    lo, hi = profile.t_span
    if not lo <= t <= hi:
        return math.nan
    return profile.at(t).vprime
