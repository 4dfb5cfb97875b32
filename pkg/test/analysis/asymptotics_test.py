import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.optimize import brentq

from minkowski_orbits.analysis.asymptotics import (SweepKind, delta_sweep,
                                                   limit_profile_heteroclinic,
                                                   limit_profile_homoclinic)
from minkowski_orbits.analysis.weight import WeightProfile
from minkowski_orbits.exceptions import (DomainError,
                                         UndeterminedClassification)


def inverse_slope(y):
    return (y + 1.0) / math.sqrt(y * y + 2.0 * y)


class StepwiseBranches(object):
    """
    Reduced momentum on both sides of a stepwise heteroclinic through v_star
    at t = 0, and the times the branches take in the v-domain.
    """

    def __init__(self, n, c1, c2, delta, v_star):
        self.n = n
        self.c1 = c1
        self.c2 = c2
        self.delta = delta
        self.v_star = v_star
        self.y0 = -c1 * n.F(v_star) / delta

    def y_left(self, v):
        return -self.c1 * self.n.F(v) / self.delta

    def y_right(self, v):
        return self.y0 - (self.c2 / self.delta) * (self.n.F(v) - self.n.F(self.v_star))

    def left_time(self, v):
        return quad(lambda s: inverse_slope(self.y_left(s)), v, self.v_star)[0]

    def right_time(self, v):
        return quad(lambda s: inverse_slope(self.y_right(s)), self.v_star, v)[0]

    def corner_lags(self):
        left = brentq(lambda x: self.left_time(x) - self.v_star, 1e-6, self.v_star)
        right = brentq(lambda x: self.right_time(1.0 - x) - (1.0 - self.v_star), 1e-6, 1.0 - self.v_star)
        return left, right

    def drift(self, duration, reach):
        left = brentq(lambda x: self.left_time(x) - duration, self.v_star - reach, self.v_star)
        right = brentq(lambda x: self.right_time(x) - duration, self.v_star, self.v_star + reach)
        return max(self.v_star - left, right - self.v_star)

    def slope_right(self, v):
        y = self.y_right(v)
        return math.sqrt(1.0 - 1.0 / (y + 1.0) ** 2)


class TestLimitProfiles(object):
    def test_heteroclinic_ramp(self):
        profile = limit_profile_heteroclinic(0.2, t0=0.0)
        assert profile(0.0) == pytest.approx(0.2)
        assert profile(-1.0) == pytest.approx(0.0)
        assert profile(0.3) == pytest.approx(0.5)
        assert profile(2.0) == pytest.approx(1.0)

    def test_homoclinic_tent(self, cubic04):
        v0 = cubic04.v0
        profile = limit_profile_homoclinic(0.3, v0, t0=1.0)
        assert profile(1.0) == pytest.approx(0.3)
        assert profile(1.0 - 0.3 + v0) == pytest.approx(v0)
        assert profile(1.0 - 0.3 + 2.0 * v0 + 1.0) == pytest.approx(0.0)
        assert np.max(profile(np.linspace(-3.0, 5.0, 801))) <= v0 + 1e-12

    def test_peak_at_t0(self, cubic04):
        profile = limit_profile_homoclinic(cubic04.v0, cubic04.v0)
        assert profile(0.0) == pytest.approx(cubic04.v0)

    def test_out_of_range(self, cubic04):
        with pytest.raises(DomainError):
            limit_profile_heteroclinic(0.0)
        with pytest.raises(DomainError):
            limit_profile_homoclinic(0.9, cubic04.v0)


class TestDeltaSweep(object):
    def test_stepwise_heteroclinic(self, cubic04):
        w = WeightProfile.stepwise(1.0, 0.21875)
        report = delta_sweep(cubic04, w, SweepKind.HETEROCLINIC, [0.01, 0.1, 0.001], points=801)
        assert report.deltas == [0.1, 0.01, 0.001]
        assert report.v_star == pytest.approx(0.2, abs=1e-9)
        assert report.v_star_spread < 1e-9
        assert report.sup_distances[-1] < report.sup_distances[0]
        assert report.flattening[0] < report.flattening[-1]
        assert len(report.rows()) == 3
        assert report.to_dict()['kind'] == 'heteroclinic'

    def test_stepwise_homoclinic(self, cubic04):
        w = WeightProfile.stepwise(1.0, 0.8)
        report = delta_sweep(cubic04, w, 'homoclinic', [0.1, 0.01], points=401)
        assert report.v_star == pytest.approx(cubic04.v0)
        assert report.peaks == pytest.approx([cubic04.v0, cubic04.v0])

    def test_wrong_kind(self, cubic04):
        with pytest.raises(UndeterminedClassification):
            delta_sweep(cubic04, WeightProfile.stepwise(1.0, 1.5), SweepKind.HOMOCLINIC, [0.1])

    def test_needs_positive_deltas(self, cubic04):
        with pytest.raises(DomainError):
            delta_sweep(cubic04, WeightProfile.stepwise(1.0, 0.21875), SweepKind.HETEROCLINIC, [0.1, 0.0])

    @pytest.mark.slow
    def test_benchmark_heteroclinic(self, cubic04, benchmark_weight):
        report = delta_sweep(cubic04, benchmark_weight, SweepKind.HETEROCLINIC, [0.1, 0.05, 0.01],
                             grid_points=60, points=801)
        assert 0.0 < report.v_star <= cubic04.alpha
        assert report.sup_distances[-1] < report.sup_distances[0]


    def test_jump_away_from_origin(self, cubic04):
        w = WeightProfile.stepwise(1.0, 0.21875, t0=5.0)
        report = delta_sweep(cubic04, w, SweepKind.HETEROCLINIC, [0.1, 0.01], points=401)
        assert report.v_star_estimates == pytest.approx([0.2, 0.2], abs=1e-9)
        assert report.v_star == pytest.approx(0.2, abs=1e-9)
        assert report.window == (3.0, 7.0)

    @pytest.mark.slow
    def test_small_delta_convergence(self, cubic04):
        w = WeightProfile.stepwise(1.0, 0.21875)
        report = delta_sweep(cubic04, w, SweepKind.HETEROCLINIC, [0.1, 0.05, 0.01, 0.005, 0.001])
        assert report.converging
        lags = StepwiseBranches(cubic04, 1.0, 0.21875, 0.001, 0.2).corner_lags()
        assert report.sup_distances[-1] == pytest.approx(max(lags), abs=2e-3)

    @pytest.mark.slow
    def test_slope_saturation(self, cubic04):
        w = WeightProfile.stepwise(1.0, 0.21875)
        report = delta_sweep(cubic04, w, SweepKind.HETEROCLINIC, [0.1, 0.01, 0.001])
        assert report.ramp_slopes == sorted(report.ramp_slopes)
        midpoint = -0.2 + 0.5
        v = report.profiles[-1].at(midpoint).v
        branches = StepwiseBranches(cubic04, 1.0, 0.21875, 0.001, 0.2)
        assert report.ramp_slopes[-1] == pytest.approx(branches.slope_right(v), abs=1e-3)
        assert report.ramp_slopes[-1] > 0.98

    @pytest.mark.slow
    def test_large_delta_flattening(self, cubic04):
        w = WeightProfile.stepwise(1.0, 0.21875)
        report = delta_sweep(cubic04, w, SweepKind.HETEROCLINIC, [1.0, 10.0, 100.0, 1000.0], points=801)
        assert report.deltas == [1000.0, 100.0, 10.0, 1.0]
        assert report.flattening_shrinks
        drift = StepwiseBranches(cubic04, 1.0, 0.21875, 100.0, 0.2).drift(2.0, 0.1)
        assert report.flattening[1] == pytest.approx(drift, rel=5e-3)
        assert report.flattening[0] < 0.01

    @pytest.mark.slow
    def test_homoclinic_peak(self, cubic04):
        w = WeightProfile.stepwise(1.0, 0.8)
        report = delta_sweep(cubic04, w, SweepKind.HOMOCLINIC, [0.1, 0.01, 0.001], points=801)
        assert abs(report.peaks[-1] - cubic04.v0) < 1e-3
