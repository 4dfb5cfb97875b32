'''
Runs one scenario: builds the nonlinearity and weight, dispatches to the
analysis operation behind the command, and writes summary.json, timings.json
and the CSV tables of the run.
'''

import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from minkowski_orbits.analysis.asymptotics import (delta_sweep,
                                                   limit_profile_heteroclinic,
                                                   limit_profile_homoclinic)
from minkowski_orbits.analysis.autonomous import (HOMOCLINIC_WINDOW, LimitScenario,
                                                  autonomous_heteroclinic_orbit,
                                                  autonomous_special_orbit,
                                                  limit_profile_autonomous,
                                                  period_T)
from minkowski_orbits.analysis.connections import (Classification,
                                                   certify_nonexistence,
                                                   classify_grid,
                                                   classify_stepwise,
                                                   find_definitively_periodic,
                                                   find_heteroclinic,
                                                   find_homoclinic,
                                                   measured_period)
from minkowski_orbits.analysis.nonlinearity import (nonlinearity_table,
                                                    potential_family)
from minkowski_orbits.analysis.shooting import (HalfLine, HalfLineMethod,
                                                halfline_solution,
                                                kappa_branch, max_rho_bound,
                                                poincare_image,
                                                shoot_mixed_left,
                                                shoot_mixed_right)
from minkowski_orbits.commands.writers import (GRID_HEADER, KAPPA_HEADER,
                                               NONLINEARITY_HEADER,
                                               POINCARE_HEADER,
                                               POTENTIAL_HEADER,
                                               PROFILE_HEADER, SWEEP_HEADER,
                                               OutputWriter, file_stem)
from minkowski_orbits.config.diff import (print_classification_grid,
                                          print_conditions)
from minkowski_orbits.config.logging import log, log_bold, log_warning
from minkowski_orbits.constants import (DEFAULT_GRID_POINTS, SCHEMA_VERSION,
                                        SWEEP_HALF_WINDOW)
from minkowski_orbits.exceptions import EXIT_UNDETERMINED, ConfigurationError
from minkowski_orbits.version import VERSION

SUCCESS = 0
PROFILE_POINTS = 401


@dataclass
class Outcome:
    result: dict
    conditions: Optional[object] = None
    determinate: bool = True
    tables: list = field(default_factory=list)


class ScenarioRunner(object):
    def __init__(self, config, quiet=False):
        self.config = config
        self.quiet = quiet
        self.n = config.build_nonlinearity()
        self.writer = None
        self._handlers = {
            'autonomous-orbit': self.autonomous_orbit,
            'period': self.period,
            'shoot': self.shoot,
            'halfline': self.halfline,
            'kappa-branch': self.kappa_branch,
            'heteroclinic': self.heteroclinic,
            'homoclinic': self.homoclinic,
            'periodic-tail': self.periodic_tail,
            'classify-stepwise': self.classify_stepwise,
            'classify-grid': self.classify_grid,
            'nonexistence': self.nonexistence,
            'sweep': self.sweep,
            'limit-profile': self.limit_profile,
            'nonlinearity-table': self.nonlinearity_table,
            'potential-family': self.potential_family,
        }

    @property
    def parallel(self):
        return self.config.parallel > 1

    @property
    def workers(self):
        return self.config.parallel if self.parallel else None

    @property
    def method(self):
        return HalfLineMethod(self.config.param('method', HalfLineMethod.DOUBLING.value))

    @property
    def connection_method(self):
        return HalfLineMethod(self.config.param('method', HalfLineMethod.REDUCED.value))

    def run(self):
        handler = self._handlers.get(self.config.command)
        if handler is None:
            raise ConfigurationError(f"unknown command {self.config.command}")
        self.writer = OutputWriter(self.config.output_directory, self.config.output_format)
        log_bold(f"Running {self.config.command} ({self.config.run_name})")
        started = time.perf_counter()
        outcome = handler()
        elapsed = time.perf_counter() - started

        summary = {
            'schema_version': SCHEMA_VERSION,
            'command': self.config.command,
            'version': VERSION,
            'config': self.config.to_dict(),
            'result': outcome.result,
        }
        if outcome.conditions is not None:
            summary['conditions'] = outcome.conditions.to_dict()
            if not self.quiet:
                print_conditions(outcome.conditions)
        self.writer.write_json('summary.json', summary, always=True)
        self.writer.write_json('timings.json', {'command': self.config.command, 'seconds': elapsed},
                               always=True)
        log(f"{len(self.writer.written)} files in {self.config.output_directory}")
        if not outcome.determinate:
            log_warning("Classification undetermined")
            return EXIT_UNDETERMINED
        return SUCCESS

    # autonomous problem

    def autonomous_orbit(self):
        gammas = self.config.param('gammas', [self.config.param('gamma', 0.0)])
        window = self.config.param('window')
        heteroclinic = self.config.param('heteroclinic', False)
        orbits = []
        for delta in self.config.deltas:
            for gamma in gammas:
                if heteroclinic:
                    orbit = autonomous_heteroclinic_orbit(self.n, delta, gamma,
                                                         window=window or HOMOCLINIC_WINDOW)
                else:
                    orbit = autonomous_special_orbit(self.n, delta, gamma, window=window)
                level = self.n.F(gamma) / delta
                drift = float(np.max(np.abs(orbit.energies(self.n, delta, 1.0) - level)))
                stem = file_stem('orbit', ('delta', delta), ('gamma', gamma))
                self.writer.write_orbit(stem, orbit)
                orbits.append({'delta': delta, 'gamma': gamma, 'energy_drift': drift,
                               'orbit': orbit.to_dict(), 'file': stem + '.csv'})
        return Outcome({'orbits': orbits})

    def period(self):
        gammas = self.config.param('gammas', [self.config.param('gamma')])
        if gammas == [None]:
            raise ConfigurationError("command period needs parameters.gamma or parameters.gammas")
        measure = self.config.param('measure', False)
        rows = []
        for delta in self.config.deltas:
            for gamma in gammas:
                half = period_T(self.n, gamma, delta)
                row = {'delta': delta, 'gamma': gamma, 'half_period': half, 'period': 2.0 * half}
                if measure:
                    orbit = autonomous_special_orbit(self.n, delta, gamma, window=4.0 * half)
                    row['measured_period'] = measured_period(orbit)
                rows.append(row)
        self.writer.write_csv('periods', ['delta', 'gamma', 'half_period', 'period'],
                              [(r['delta'], r['gamma'], r['half_period'], r['period']) for r in rows])
        return Outcome({'periods': rows})

    def limit_profile(self):
        scenario = self.config.required('scenario')
        t0 = self.config.param('t0', 0.0)
        if scenario == 'heteroclinic':
            profile = limit_profile_heteroclinic(self.config.required('v_star'), t0)
        elif scenario == 'homoclinic':
            profile = limit_profile_homoclinic(self.config.required('v_star'), self.n.v0, t0)
        else:
            profile = limit_profile_autonomous(self.n, LimitScenario(scenario),
                                               gamma=self.config.param('gamma'))
        lo, hi = self.config.param('window', [t0 - SWEEP_HALF_WINDOW, t0 + SWEEP_HALF_WINDOW])
        times = np.linspace(lo, hi, self.config.param('points', PROFILE_POINTS))
        values = profile.evaluate(times)
        self.writer.write_csv(file_stem('limit_profile', scenario), PROFILE_HEADER, zip(times, values))
        knots = list(profile.breakpoints)
        peak = float(max(profile.evaluate(np.array(knots))))
        return Outcome({'scenario': scenario, 'profile': profile.to_dict(), 'peak': peak})

    # shooting

    def _side(self):
        return HalfLine(self.config.param('side', HalfLine.LEFT.value))

    def _t0(self, w):
        return self.config.param('t0', w.t0)

    def shoot(self):
        w = self.config.build_weight()
        delta = self.config.single_delta
        t0, side = self._t0(w), self._side()
        rho, T = self.config.required('rho'), self.config.required('T')
        shooter = shoot_mixed_left if side == HalfLine.LEFT else shoot_mixed_right
        result = shooter(self.n, w, delta, t0, T, rho)
        self.writer.write_orbit('shoot', result.orbit)
        outcome = {'shot': result.to_dict(), 'residual': abs(result.orbit.at(t0).v - rho)}
        omegas = self.config.param('poincare_omegas')
        if omegas:
            t_from = t0 - T if side == HalfLine.LEFT else t0 + T
            image = poincare_image(self.n, w, delta, t_from, t0, omegas)
            self.writer.write_csv('poincare', POINCARE_HEADER, image.tolist())
            outcome['poincare_points'] = len(omegas)
        return Outcome(outcome)

    def halfline(self):
        w = self.config.build_weight()
        delta = self.config.single_delta
        options = {}
        if 'T1' in self.config.parameters:
            options['T1'] = self.config.parameters['T1']
        result = halfline_solution(self.n, w, delta, self._t0(w), self._side(),
                                   self.config.required('rho'), method=self.method, **options)
        self.writer.write_orbit('halfline', result.orbit)
        return Outcome({'halfline': result.to_dict()})

    def _rho_grid(self):
        if 'rho_grid' in self.config.parameters:
            return self.config.grid('rho_grid')
        points = self.config.param('rho_points', 20)
        if self._side() == HalfLine.LEFT:
            lo, hi = 0.0, self.n.alpha
        else:
            lo, hi = self.n.beta, 1.0
        return [lo + (hi - lo) * k / (points + 1) for k in range(1, points + 1)]

    def kappa_branch(self):
        w = self.config.build_weight()
        delta = self.config.single_delta
        points = kappa_branch(self.n, w, delta, self._t0(w), self._side(), self._rho_grid(),
                              method=self.method, parallel=self.parallel, workers=self.workers)
        self.writer.write_csv('kappa_branch', KAPPA_HEADER, [p.to_row() for p in points])
        failed = [p.rho for p in points if not p.converged]
        if failed:
            log_warning(f"{len(failed)} branch points did not converge")
        return Outcome({'points': [p.to_row() for p in points], 'failed_rho': failed})

    # connections

    def _connection(self, finder):
        w = self.config.build_weight()
        delta = self.config.single_delta
        result = finder(self.n, w, delta,
                        grid_points=self.config.param('grid_points', DEFAULT_GRID_POINTS),
                        method=self.connection_method, parallel=self.parallel,
                        window=self.config.param('window'))
        return self._connection_outcome(result)

    def _connection_outcome(self, result):
        if result.profile is not None:
            self.writer.write_orbit(file_stem(result.classification.value, 'profile'), result.profile)
        return Outcome(result.to_dict(), conditions=result.conditions,
                       determinate=result.classification != Classification.UNDETERMINED)

    def heteroclinic(self):
        return self._connection(find_heteroclinic)

    def homoclinic(self):
        return self._connection(find_homoclinic)

    def periodic_tail(self):
        return self._connection(find_definitively_periodic)

    def classify_stepwise(self):
        result = classify_stepwise(self.n, self.config.required('c1'), self.config.required('c2'),
                                   self.config.single_delta,
                                   construct=self.config.param('construct', True),
                                   window=self.config.param('window'), t0=self.config.param('t0', 0.0))
        return self._connection_outcome(result)

    def classify_grid(self):
        cells = classify_grid(self.n, self.config.grid('c1_values'), self.config.grid('c2_values'),
                              self.config.deltas, parallel=self.parallel, workers=self.workers)
        if not self.quiet:
            print_classification_grid(cells)
        self.writer.write_csv('classification_grid', GRID_HEADER, [c.to_row() for c in cells])
        return Outcome({'cells': [c.to_row() for c in cells]})

    def nonexistence(self):
        w = self.config.build_weight()
        delta = self.config.single_delta
        M = self.config.param('M')
        extra = {}
        if M is None and self.config.param('estimate_m', False):
            report = max_rho_bound(self.n, w, delta, method=self.connection_method)
            M = report.empirical
            extra['max_rho'] = report.to_dict()
        conditions = certify_nonexistence(self.n, w, delta, M=M,
                                          grid_points=self.config.param('grid_points', DEFAULT_GRID_POINTS))
        return Outcome(dict(extra, certified=conditions.certified), conditions=conditions)

    # asymptotics

    def sweep(self):
        w = self.config.build_weight()
        report = delta_sweep(self.n, w, self.config.param('kind', 'heteroclinic'), self.config.deltas,
                             method=self.connection_method,
                             grid_points=self.config.param('grid_points', DEFAULT_GRID_POINTS),
                             parallel=self.parallel, workers=self.workers)
        self.writer.write_csv('sweep', SWEEP_HEADER, report.rows())
        if self.config.param('profiles', True):
            for delta, profile in zip(report.deltas, report.profiles):
                self.writer.write_orbit(file_stem('sweep_profile', ('delta', delta)), profile)
        return Outcome({'sweep': report.to_dict()})

    # nonlinearity

    def nonlinearity_table(self):
        grid, f, F = nonlinearity_table(self.n, self.config.param('points', 201))
        self.writer.write_csv('nonlinearity', NONLINEARITY_HEADER, zip(grid, f, F))
        return Outcome({'alpha': self.n.alpha, 'beta': self.n.beta, 'v0': self.n.v0,
                        'lipschitz': self.n.lipschitz, 'balance': self.n.balance.value,
                        'F_alpha': self.n.F(self.n.alpha), 'F_one': self.n.F(1.0)})

    def potential_family(self):
        grid, family = potential_family(self.n, self.config.grid('levels'),
                                        self.config.param('points', 201))
        members = []
        for gamma, top, values in family:
            stem = file_stem('potential', ('gamma', gamma))
            self.writer.write_csv(stem, POTENTIAL_HEADER, zip(grid, values))
            members.append({'gamma': gamma, 'zeta': top, 'file': stem + '.csv'})
        return Outcome({'family': members})
