import numpy as np
import pytest

from minkowski_orbits.analysis.nonlinearity import (Balance, Nonlinearity,
                                                    find_v0, gamma_of_level,
                                                    nonlinearity_table,
                                                    potential_family, zeta)
from minkowski_orbits.exceptions import (ConfigurationError, DomainError,
                                         InvalidNonlinearity, NoRootError)


class TestCubicBistable(object):
    def test_potential_values(self, cubic04):
        assert cubic04.F(0.4) == pytest.approx(-0.00853333, abs=1e-7)
        assert cubic04.F(0.2) == pytest.approx(-0.00466667, abs=1e-7)
        assert cubic04.F(1.0) == pytest.approx(0.0166667, abs=1e-7)

    def test_structural_roots(self, cubic04):
        assert cubic04.alpha == pytest.approx(0.4, abs=1e-10)
        assert cubic04.beta == pytest.approx(0.4, abs=1e-10)
        assert cubic04.is_bistable
        assert cubic04.balance == Balance.POSITIVE
        assert cubic04.v0 == pytest.approx(2.0 / 3.0, abs=1e-5)

    def test_balanced(self, cubic05):
        assert cubic05.is_balanced
        assert find_v0(cubic05) == 1.0

    def test_extension_by_zero(self, cubic04):
        assert cubic04.f(-0.5) == 0.0
        assert cubic04.f(1.5) == 0.0
        assert cubic04.F(1.5) == cubic04.F(1.0)
        assert list(cubic04.f(np.array([-1.0, 2.0]))) == [0.0, 0.0]

    def test_lipschitz(self, cubic04):
        assert cubic04.lipschitz == pytest.approx(0.6, abs=1e-12)

    def test_vectorized_matches_scalar(self, cubic04):
        grid = np.linspace(0.0, 1.0, 11)
        assert np.allclose(cubic04.F(grid), [cubic04.F(float(v)) for v in grid], atol=1e-15)

    def test_negative_potential_at_one_is_rejected(self):
        with pytest.raises(NoRootError) as error:
            Nonlinearity.cubic_bistable(0.6)
        assert error.value.clause == '(f2)'

    def test_root_outside_unit_interval(self):
        with pytest.raises(DomainError):
            Nonlinearity.cubic_bistable(1.2)

    def test_config_round_trip(self, cubic04):
        assert Nonlinearity.from_config(cubic04.to_config()).to_config() == {'kind': 'cubic-bistable', 'a': 0.4}

    def test_unknown_kind(self):
        with pytest.raises(ConfigurationError):
            Nonlinearity.from_config({'kind': 'quartic'})


class TestZeta(object):
    def test_level_pair(self, cubic04):
        gamma = gamma_of_level(cubic04, -0.002)
        assert gamma == pytest.approx(0.115724, abs=1e-5)
        assert zeta(cubic04, gamma) == pytest.approx(0.631374, abs=1e-5)

    def test_zero_gamma_is_v0(self, cubic04):
        assert zeta(cubic04, 0.0) == cubic04.v0

    def test_gamma_past_alpha(self, cubic04):
        with pytest.raises(DomainError):
            zeta(cubic04, 0.5)

    def test_level_outside_well(self, cubic04):
        with pytest.raises(DomainError):
            gamma_of_level(cubic04, 0.001)


class TestTabulated(object):
    nodes = [[0.0, 0.0], [0.25, -0.25], [0.5, 0.0], [0.75, 0.5], [1.0, 0.0]]

    def test_roots_and_potential(self):
        n = Nonlinearity.tabulated(self.nodes)
        assert n.alpha == pytest.approx(0.5, abs=1e-10)
        assert n.F(0.5) == pytest.approx(-0.0625, abs=1e-10)
        assert n.F(1.0) == pytest.approx(0.0625, abs=1e-10)
        assert n.v0 == pytest.approx(0.75, abs=1e-8)

    def test_nodes_must_span_unit_interval(self):
        with pytest.raises(ConfigurationError):
            Nonlinearity.tabulated([[0.0, 0.0], [0.5, 0.0]])

    def test_missing_sign_change(self):
        with pytest.raises(InvalidNonlinearity) as error:
            Nonlinearity.tabulated([[0.0, 0.0], [0.5, 0.3], [1.0, 0.0]])
        assert error.value.clause == '(f1)'

    def test_non_strict_skips_structure(self):
        n = Nonlinearity.tabulated([[0.0, 0.0], [0.5, 0.3], [1.0, 0.0]], strict=False)
        assert n.F(1.0) == pytest.approx(0.15, abs=1e-10)
        with pytest.raises(InvalidNonlinearity):
            n.require_structure()


class TestTables(object):
    def test_nonlinearity_table(self, cubic04):
        grid, f, F = nonlinearity_table(cubic04, points=5)
        assert list(grid) == [0.0, 0.25, 0.5, 0.75, 1.0]
        assert f[0] == 0.0 and f[-1] == 0.0
        assert F[-1] == pytest.approx(cubic04.F(1.0))

    def test_potential_family_vanishes_at_gamma_and_zeta(self, cubic04):
        _, family = potential_family(cubic04, [-0.002, -0.004], points=11)
        assert len(family) == 2
        for gamma, top, _ in family:
            assert cubic04.F_gamma(gamma, gamma) == 0.0
            assert cubic04.F_gamma(gamma, top) == pytest.approx(0.0, abs=1e-10)
            assert 0.0 < gamma < cubic04.alpha < top < cubic04.v0


class TestInvariants(object):
    def test_potential_is_primitive(self, cubic04, rng):
        step = 1e-6
        for v in rng.uniform(1e-3, 1.0 - 1e-3, 200):
            slope = (cubic04.F(v + step) - cubic04.F(v - step)) / (2.0 * step)
            assert slope == pytest.approx(cubic04.f(v), abs=1e-6)

    def test_minimum_at_alpha(self, cubic04):
        grid = np.linspace(0.0, 1.0, 1001)
        assert cubic04.F(cubic04.alpha) < 0.0
        assert np.all(cubic04.F(grid) >= cubic04.F(cubic04.beta) - 1e-15)

    def test_equilibria_are_exact(self, cubic04):
        assert cubic04.f(1.0) == 0.0
        assert cubic04.f(0.4) == 0.0
        assert list(cubic04.f(np.array([0.0, 0.4, 1.0]))) == [0.0, 0.0, 0.0]

    def test_residual_family_vanishes(self, cubic04, rng):
        for gamma in rng.uniform(1e-3, cubic04.alpha - 1e-3, 50):
            assert cubic04.F_gamma(gamma, gamma) == 0.0
            assert cubic04.F_gamma(gamma, zeta(cubic04, gamma)) == pytest.approx(0.0, abs=1e-10)

    def test_zeta_decreases(self, cubic04, rng):
        gammas = np.sort(rng.uniform(1e-3, cubic04.alpha - 1e-3, 20))
        tops = [zeta(cubic04, g) for g in gammas]
        assert all(b < a for a, b in zip(tops, tops[1:]))
        assert all(cubic04.alpha < top < cubic04.v0 for top in tops)

    def test_polynomial_v0(self):
        n = Nonlinearity.polynomial([0.0, -0.45, 1.45, -1.0])
        assert n.alpha == pytest.approx(0.45, abs=1e-10)
        assert 0.45 < n.v0 < 1.0
        assert n.F(n.v0) == pytest.approx(0.0, abs=1e-12)

    def test_tabulated_lipschitz(self):
        assert Nonlinearity.tabulated([[0.0, 0.0], [0.5, -1.0], [1.0, 0.0]], strict=False).lipschitz == 2.0
        assert Nonlinearity.tabulated([[0.0, 0.0], [1.0, 0.0]], strict=False).lipschitz == 0.0
