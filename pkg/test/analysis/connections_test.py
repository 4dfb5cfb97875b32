import math

import numpy as np
import pytest

from minkowski_orbits.analysis.connections import (Classification,
                                                   ConditionReport,
                                                   LevelAnchor,
                                                   certify_nonexistence,
                                                   classify_grid,
                                                   classify_stepwise,
                                                   detect_exit,
                                                   energy_level_curve,
                                                   find_definitively_periodic,
                                                   find_heteroclinic,
                                                   find_homoclinic,
                                                   heteroclinic_ratio,
                                                   nonexistence_curve,
                                                   stepwise_family)
from minkowski_orbits.analysis.dynamics import PhaseState, integrate_t
from minkowski_orbits.analysis.shooting import (HalfLine, HalfLineMethod,
                                                halfline_solution)
from minkowski_orbits.analysis.weight import WeightPiece, WeightProfile
from minkowski_orbits.exceptions import (DegenerateCase, DomainError,
                                         HypothesisViolation)

BENCHMARK_RATIO = 0.338624
GRID_WEIGHTS = [0.5, 1.0, 2.0, 4.0, 8.0]


def near_constant_weight(c):
    return WeightProfile([
        WeightPiece(None, 0.0, expression='1 + 0.05*abs(sin(t))', period=np.pi, origin=0.0),
        WeightPiece(0.0, None, constant=c),
    ])


def left_terminal_momentum(n, w, delta, rho):
    return halfline_solution(n, w, delta, 0.0, HalfLine.LEFT, rho,
                             method=HalfLineMethod.REDUCED).terminal_w


def constructed_classification(n, c1, c2, delta, predicted):
    w = WeightProfile.stepwise(c1, c2)
    if predicted.classification == Classification.HETEROCLINIC:
        rho = predicted.rho_star
        y = c2 * (n.F(1.0) - n.F(rho)) / delta
        kappa = left_terminal_momentum(n, w, delta, rho)
        if math.isclose(kappa, math.sqrt(y * y + 2.0 * y), rel_tol=1e-6):
            return Classification.HETEROCLINIC
        return None
    if predicted.classification == Classification.HOMOCLINIC:
        return find_homoclinic(n, w, delta).classification
    rho = 0.5 * n.alpha
    start = PhaseState(0.0, rho, left_terminal_momentum(n, w, delta, rho))
    if detect_exit(n, w, delta, start, horizon=50.0).exited:
        return Classification.FINITE_TIME_EXIT
    return Classification.DEFINITIVELY_PERIODIC


class TestThresholds(object):
    def test_heteroclinic_ratio(self, cubic04):
        assert heteroclinic_ratio(cubic04) == pytest.approx(BENCHMARK_RATIO, abs=1e-6)
        assert stepwise_family(cubic04, cubic04.alpha) == pytest.approx(BENCHMARK_RATIO, abs=1e-6)

    def test_stepwise_family_increases(self, cubic04):
        values = [stepwise_family(cubic04, rho) for rho in np.linspace(0.01, cubic04.alpha, 40)]
        assert all(b > a for a, b in zip(values, values[1:]))
        assert stepwise_family(cubic04, 0.2) == pytest.approx(0.21875, abs=1e-12)

    def test_nonexistence_curve_at_alpha(self, cubic04):
        assert nonexistence_curve(cubic04, 1.0, 1.5, cubic04.alpha) == pytest.approx(1.5 * BENCHMARK_RATIO, abs=1e-6)


class TestLevelCurve(object):
    def test_through_one(self, cubic04):
        level = energy_level_curve(cubic04, 0.1, 1.0, LevelAnchor.THROUGH_ONE)
        y = 10.0 * cubic04.F(1.0)
        assert level.reduced(0.0) == pytest.approx(y)
        assert level(0.0) == pytest.approx(math.sqrt(y * y + 2.0 * y))
        assert level(1.0) == 0.0

    def test_through_v0_vanishes_at_zero(self, cubic04):
        level = energy_level_curve(cubic04, 0.1, 1.0, 'through-v0')
        assert level.level == 0.0
        assert level(0.0) == 0.0
        assert level(0.2) > 0.0
        with pytest.raises(DomainError):
            level(0.8)

    def test_through_w_needs_turning_point(self, cubic04):
        with pytest.raises(DomainError):
            energy_level_curve(cubic04, 0.1, 1.0, LevelAnchor.THROUGH_W, w_bar=0.2)
        level = energy_level_curve(cubic04, 0.1, 1.0, LevelAnchor.THROUGH_W, w_bar=0.6)
        assert level(0.6) == 0.0

    def test_positive_weight(self, cubic04):
        with pytest.raises(DomainError):
            energy_level_curve(cubic04, 0.1, 0.0, LevelAnchor.THROUGH_ONE)


class TestConditionReport(object):
    def test_relations_and_verdicts(self):
        report = ConditionReport()
        report.add('a', 0.3, 0.5, '<=')
        report.add('b', 0.7, 0.5, '<=')
        report.add('c', 0.7, 0.5, '>', applicable=False, note='needs a')
        assert report.holds('a') and not report.holds('b') and not report.holds('c')
        assert [c.verdict for c in report] == ['holds', 'fails', 'inapplicable']
        assert report['c'].to_row() == ('c', 0.7, '>', 0.5, 'inapplicable')
        assert not report.holds('missing')

    def test_approximate_comparison(self):
        report = ConditionReport()
        report.add('x', 0.401, 0.4, '~', tolerance=0.01)
        assert report.holds('x')

    def test_merge_keeps_first(self):
        first, second = ConditionReport(), ConditionReport()
        first.add('a', 1.0, 2.0, '<')
        second.add('a', 3.0, 2.0, '<')
        second.add('b', 1.0, 0.0, '>')
        second.extras['M'] = 0.7
        first.merge(second)
        assert len(first) == 2
        assert first.holds('a')
        assert first.to_dict()['extras'] == {'M': 0.7}

    def test_certified(self):
        report = ConditionReport()
        report.add('cond-eta', 1.0, 0.5, '>')
        assert not report.certified
        report.add('cond-c3', 0.6, 0.5, '>')
        assert report.certified


class TestNonexistence(object):
    def test_certified_above_threshold(self, cubic04):
        report = certify_nonexistence(cubic04, near_constant_weight(0.5), 0.1)
        assert report.holds('cond-eta')
        assert report.holds('cond-c3')
        assert report.certified
        assert report.extras['M'] >= cubic04.v0

    def test_below_threshold(self, cubic04, benchmark_weight):
        report = certify_nonexistence(cubic04, benchmark_weight, 0.1)
        assert report.holds('cond-eta')
        assert not report.holds('cond-c3')
        assert not report.certified

    def test_cond_c3_needs_cond_eta(self, cubic04):
        w = WeightProfile([WeightPiece(None, 0.0, samples=[0.1, 1.0, 0.1], period=2.0, origin=0.0),
                           WeightPiece(0.0, None, constant=0.9)])
        report = certify_nonexistence(cubic04, w, 0.1)
        assert report['cond-eta'].verdict == 'fails'
        assert report['cond-c3'].verdict == 'inapplicable'

    def test_sharpened_bound_below_alpha(self, cubic04):
        report = certify_nonexistence(cubic04, near_constant_weight(0.5), 0.1, M=0.3)
        assert 'cond-c3-sharpened' in report
        assert report['cond-c3-sharpened'].bound == pytest.approx(
            nonexistence_curve(cubic04, 1.0, 1.05, 0.3), rel=1e-4)

    def test_hypothesis_failure_is_reported(self, cubic04):
        w = WeightProfile([
            WeightPiece(None, 0.0, constant=1.0),
            WeightPiece(0.0, None, expression='1 + 0.5*abs(sin(t))', period=np.pi, origin=0.0),
        ])
        report = certify_nonexistence(cubic04, w, 0.1)
        assert report['cond-eta'].verdict == 'inapplicable'
        assert not report.certified


class TestStepwiseClassification(object):
    @pytest.mark.parametrize('c2, expected', [
        (1.0, Classification.HOMOCLINIC),
        (2.0, Classification.DEFINITIVELY_PERIODIC),
        (0.5, Classification.FINITE_TIME_EXIT),
        (0.21875, Classification.HETEROCLINIC),
    ])
    def test_decision_table(self, cubic04, c2, expected):
        result = classify_stepwise(cubic04, 1.0, c2, 0.1, construct=False)
        assert result.classification == expected

    @pytest.mark.parametrize('c2, expected', [
        (1.0, Classification.HETEROCLINIC),
        (2.0, Classification.DEFINITIVELY_PERIODIC),
        (0.5, Classification.FINITE_TIME_EXIT),
    ])
    def test_balanced_decision_table(self, cubic05, c2, expected):
        assert classify_stepwise(cubic05, 1.0, c2, 0.1, construct=False).classification == expected

    def test_heteroclinic_value(self, cubic04):
        result = classify_stepwise(cubic04, 1.0, 0.21875, 0.1, construct=False)
        assert result.rho_star == pytest.approx(0.2, abs=1e-9)
        assert result.conditions.holds('cond-c')

    def test_boundary_of_family(self, cubic04):
        result = classify_stepwise(cubic04, 1.0, stepwise_family(cubic04, cubic04.alpha), 0.1,
                                   construct=False)
        assert result.classification == Classification.HETEROCLINIC
        assert result.rho_star == pytest.approx(cubic04.alpha, abs=1e-9)

    def test_degenerate_ratio(self, cubic04):
        with pytest.raises(DegenerateCase):
            classify_stepwise(cubic04, 1.0, 1e-20, 0.1, construct=False)

    def test_independent_of_delta(self, cubic04):
        for c1, c2 in [(1.0, 0.1), (2.0, 0.5), (1.0, 1.0), (0.5, 3.0), (3.0, 2.0)]:
            verdicts = {classify_stepwise(cubic04, c1, c2, delta, construct=False).classification
                        for delta in (0.01, 0.1, 1.0, 10.0)}
            assert len(verdicts) == 1

    def test_positive_weights(self, cubic04):
        with pytest.raises(DomainError):
            classify_stepwise(cubic04, 0.0, 1.0, 0.1)

    def test_heteroclinic_witness(self, cubic04):
        result = classify_stepwise(cubic04, 1.0, 0.21875, 0.1)
        samples = result.profile.samples
        assert samples[0].v < 1e-6
        assert samples[-1].v > 1.0 - 1e-6
        assert all(b.v >= a.v for a, b in zip(samples, samples[1:]))
        assert result.diagnostics['glue_jump']['v'] == 0.0
        assert result.diagnostics['glue_jump']['w'] == pytest.approx(0.0, abs=1e-12)

    def test_homoclinic_witness(self, cubic04):
        result = classify_stepwise(cubic04, 1.0, 1.0, 0.1)
        assert result.peak == cubic04.v0
        assert max(result.profile.v) == pytest.approx(cubic04.v0)
        assert result.profile.samples[0].v < 1e-6
        assert result.profile.samples[-1].v < 1e-6

    def test_periodic_witness(self, cubic04):
        result = classify_stepwise(cubic04, 1.0, 2.0, 0.1)
        assert result.period > 0.0
        assert result.diagnostics['measured_period'] == pytest.approx(result.period, rel=1e-4)

    def test_exit_witness(self, cubic04):
        result = classify_stepwise(cubic04, 1.0, 0.5, 0.1)
        assert result.diagnostics['exit']['exited']

    def test_grid(self, cubic04):
        cells = classify_grid(cubic04, [1.0], [0.21875, 1.0, 1e-20], deltas=(0.1, 1.0))
        assert len(cells) == 6
        assert [c.classification for c in cells[:3]] == ['heteroclinic', 'homoclinic', None]
        assert cells[2].to_row()[3] == 'degenerate'
        assert cells[0].rho_star == pytest.approx(0.2, abs=1e-9)

    def test_jump_away_from_origin(self, cubic04):
        result = classify_stepwise(cubic04, 1.0, 0.21875, 0.1, t0=5.0)
        assert result.profile.at(5.0).v == pytest.approx(0.2, abs=1e-9)
        assert result.diagnostics['glue_jump']['t0'] == 5.0

    def test_boundary_within_rounding(self, cubic04):
        top = stepwise_family(cubic04, cubic04.alpha)
        result = classify_stepwise(cubic04, 3.0, 3.0 * top, 0.1, construct=False)
        assert result.classification == Classification.HETEROCLINIC
        assert result.rho_star == cubic04.alpha


class TestConstructiveAgreement(object):
    @pytest.mark.slow
    @pytest.mark.parametrize('nonlinearity', ['cubic04', 'cubic05'])
    def test_grid_matches_construction(self, nonlinearity, request):
        n = request.getfixturevalue(nonlinearity)
        seen = set()
        for c1 in GRID_WEIGHTS:
            for c2 in GRID_WEIGHTS:
                predicted = classify_stepwise(n, c1, c2, 0.1, construct=False)
                seen.add(predicted.classification)
                assert constructed_classification(n, c1, c2, 0.1, predicted) == predicted.classification
        expected = 3 if n.is_balanced else 4
        assert len(seen) == expected


class TestScaling(object):
    def test_orbits_depend_on_weight_over_delta(self, cubic04, rng):
        for _ in range(10):
            factor = rng.uniform(0.2, 5.0)
            delta = rng.uniform(0.05, 1.0)
            w = WeightProfile.stepwise(rng.uniform(0.5, 2.0), rng.uniform(0.1, 2.0))
            start = PhaseState(-1.0, rng.uniform(0.05, 0.95), rng.uniform(-0.5, 0.5))
            plain = integrate_t(cubic04, w, delta, start, t_max=2.0).final
            scaled = integrate_t(cubic04, w.scaled(factor), factor * delta, start, t_max=2.0).final
            assert scaled.v == pytest.approx(plain.v, abs=1e-9)
            assert scaled.w == pytest.approx(plain.w, abs=1e-9)

    def test_classification_is_scale_free(self, cubic04):
        for c1, c2 in [(1.0, 0.1), (1.0, 0.5), (1.0, 1.0), (1.0, 3.0)]:
            base = classify_stepwise(cubic04, c1, c2, 0.1, construct=False)
            scaled = classify_stepwise(cubic04, 7.0 * c1, 7.0 * c2, 0.7, construct=False)
            assert scaled.classification == base.classification
            if base.rho_star is None:
                assert scaled.rho_star is None
            else:
                assert scaled.rho_star == pytest.approx(base.rho_star, abs=1e-12)


class TestExit(object):
    def test_fast_orbit_leaves(self, cubic04, unit_weight):
        report = detect_exit(cubic04, unit_weight, 0.1, PhaseState(0.0, 0.5, 2.0), horizon=50.0)
        assert report.exited
        assert report.exit_state.v == pytest.approx(1.0, abs=1e-9)

    def test_periodic_orbit_stays(self, cubic04, unit_weight):
        report = detect_exit(cubic04, unit_weight, 0.1, PhaseState(0.0, 0.5, 0.0), horizon=20.0)
        assert not report.exited
        assert report.to_dict()['exit_state'] is None


class TestHeteroclinicSearch(object):
    def test_stepwise_weight(self, cubic04):
        w = WeightProfile.stepwise(1.0, 0.21875)
        result = find_heteroclinic(cubic04, w, 0.1, grid_points=20)
        assert result.classification == Classification.HETEROCLINIC
        assert result.rho_star == pytest.approx(0.2, abs=1e-6)
        assert result.conditions.holds('cond-c')
        assert result.diagnostics['glue_jump']['v'] < 1e-9

    def test_above_threshold_is_certified(self, cubic04):
        result = find_heteroclinic(cubic04, WeightProfile.stepwise(1.0, 0.5), 0.1, grid_points=20)
        assert result.classification == Classification.NONEXISTENCE_CERTIFIED
        assert not result.conditions.holds('cond-c')
        assert result.profile is None

    def test_needs_constant_tail(self, cubic04):
        w = WeightProfile([
            WeightPiece(None, 0.0, expression='1 + 0.5*abs(sin(t))', period=np.pi, origin=0.0),
            WeightPiece(0.0, None, expression='1 + 0.5*abs(sin(t))', period=np.pi, origin=0.0),
        ])
        with pytest.raises(HypothesisViolation):
            find_heteroclinic(cubic04, w, 0.1)

    @pytest.mark.slow
    def test_benchmark(self, cubic04, benchmark_weight):
        result = find_heteroclinic(cubic04, benchmark_weight, 0.1)
        assert result.classification == Classification.HETEROCLINIC
        assert result.conditions.holds('cond-c')
        assert 0.0 < result.rho_star < cubic04.alpha
        assert result.diagnostics['glue_jump']['v'] < 1e-9
        assert result.profile.samples[0].v < 1e-5
        assert result.profile.samples[-1].v > 1.0 - 1e-5

    @pytest.mark.slow
    def test_nonexistence_benchmark(self, cubic04):
        result = find_heteroclinic(cubic04, near_constant_weight(0.5), 0.1, grid_points=40)
        assert result.classification == Classification.NONEXISTENCE_CERTIFIED
        assert 'brackets' not in result.diagnostics or not result.diagnostics['brackets']


class TestHomoclinicSearch(object):
    def test_constant_left_weight_glues_at_peak(self, cubic04):
        result = find_homoclinic(cubic04, WeightProfile.stepwise(1.0, 0.8), 0.1)
        assert result.classification == Classification.HOMOCLINIC
        assert result.conditions.holds('cond-c-eta')
        assert result.rho_star == cubic04.v0
        assert result.diagnostics['glue'] == 'peak'
        assert max(result.profile.v) == pytest.approx(cubic04.v0)

    def test_needs_positive_potential_at_one(self, cubic05):
        with pytest.raises(HypothesisViolation):
            find_homoclinic(cubic05, WeightProfile.stepwise(1.0, 0.8), 0.1)

    def test_heavier_right_weight_is_undetermined(self, cubic04):
        result = find_homoclinic(cubic04, WeightProfile.stepwise(1.0, 1.5), 0.1)
        assert result.classification == Classification.UNDETERMINED
        assert not result.conditions.holds('cond-c-eta')


class TestDefinitivelyPeriodic(object):
    @pytest.mark.slow
    def test_stepwise_weight(self, cubic04):
        result = find_definitively_periodic(cubic04, WeightProfile.stepwise(1.0, 2.0), 0.1, grid_points=20)
        assert result.classification == Classification.DEFINITIVELY_PERIODIC
        assert result.diagnostics['measured_period'] == pytest.approx(result.period, rel=1e-4)
        assert cubic04.alpha < result.diagnostics['w_bar'] < cubic04.v0
