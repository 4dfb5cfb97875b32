'''
The reaction term f, its potential F(v) = integral of f from 0 to v, and
the structural roots derived from them (alpha, beta, v0, zeta(gamma)).
'''

from bisect import bisect_right
from enum import Enum

import numpy as np
from numpy.polynomial import Polynomial
from scipy import integrate, optimize

from minkowski_orbits.constants import (BALANCE_TOLERANCE, ROOT_TOLERANCE,
                                        SIGN_SCAN_SAMPLES,
                                        TABULATED_QUADRATURE_TOLERANCE)
from minkowski_orbits.exceptions import (ConfigurationError, DomainError,
                                         InvalidNonlinearity, NoRootError)


class NonlinearityKind(Enum):
    CUBIC_BISTABLE = 'cubic-bistable'
    POLYNOMIAL = 'polynomial'
    TABULATED = 'tabulated'


class Balance(Enum):
    POSITIVE = 'positive'
    BALANCED = 'balanced'


def _horner(coefficients, x):
    result = 0.0
    for c in reversed(coefficients):
        result = result * x + c
    return result


class Nonlinearity(object):
    '''
        Reaction term on [0, 1], extended by zero outside.

        With strict=True (the default) the hypotheses (f1) and (f2)/(f2')
        are enforced and alpha, beta, v0 and balance are populated. A
        non-strict instance only evaluates f and F.
    '''

    def __init__(self, kind, a=None, coefficients=None, nodes=None, strict=True):
        self.kind = NonlinearityKind(kind)
        self.a = None
        self.coefficients = None
        self.nodes = None
        if self.kind == NonlinearityKind.CUBIC_BISTABLE:
            if a is None or not 0.0 < a < 1.0:
                raise DomainError(f"cubic-bistable root a must lie in ]0,1[, got {a!r}")
            self.a = float(a)
            self.coefficients = (0.0, -self.a, 1.0 + self.a, -1.0)
        elif self.kind == NonlinearityKind.POLYNOMIAL:
            if not coefficients:
                raise ConfigurationError("polynomial nonlinearity needs coefficients")
            self.coefficients = tuple(float(c) for c in coefficients)
        else:
            self.nodes = self._checked_nodes(nodes)

        if self.coefficients is not None:
            polynomial = Polynomial(self.coefficients)
            self._f_coefficients = tuple(polynomial.coef)
            self._F_coefficients = tuple(polynomial.integ().coef)
            self._polynomial = polynomial
        else:
            self._xs = [s for s, _ in self.nodes]
            self._ys = [y for _, y in self.nodes]

        self.lipschitz = estimate_lipschitz(self)
        self.alpha = None
        self.beta = None
        self.v0 = None
        self.balance = None
        self.strict = strict
        if strict:
            self._check_hypotheses()

    @staticmethod
    def _checked_nodes(nodes):
        if not nodes or len(nodes) < 2:
            raise ConfigurationError("tabulated nonlinearity needs at least two nodes")
        pairs = [(float(s), float(y)) for s, y in nodes]
        xs = [s for s, _ in pairs]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ConfigurationError("tabulated nodes must have strictly increasing abscissae")
        if xs[0] != 0.0 or xs[-1] != 1.0:
            raise ConfigurationError("tabulated nodes must span exactly [0, 1]")
        return tuple(pairs)

    @classmethod
    def cubic_bistable(cls, a, strict=True):
        return cls(NonlinearityKind.CUBIC_BISTABLE, a=a, strict=strict)

    @classmethod
    def polynomial(cls, coefficients, strict=True):
        return cls(NonlinearityKind.POLYNOMIAL, coefficients=coefficients, strict=strict)

    @classmethod
    def tabulated(cls, nodes, strict=True):
        return cls(NonlinearityKind.TABULATED, nodes=nodes, strict=strict)

    @classmethod
    def from_config(cls, record, strict=True):
        kind = record.get('kind')
        try:
            kind = NonlinearityKind(kind)
        except ValueError:
            raise ConfigurationError(f"unknown nonlinearity kind {kind!r}")
        return cls(kind, a=record.get('a'), coefficients=record.get('coefficients'),
                   nodes=record.get('nodes'), strict=strict)

    def to_config(self):
        if self.kind == NonlinearityKind.CUBIC_BISTABLE:
            return {'kind': self.kind.value, 'a': self.a}
        if self.kind == NonlinearityKind.POLYNOMIAL:
            return {'kind': self.kind.value, 'coefficients': list(self.coefficients)}
        return {'kind': self.kind.value, 'nodes': [list(node) for node in self.nodes]}

    def __repr__(self):
        return f"Nonlinearity({self.to_config()!r})"

    def __getstate__(self):
        return {'config': self.to_config(), 'strict': self.strict}

    def __setstate__(self, state):
        record = state['config']
        self.__init__(record['kind'], a=record.get('a'), coefficients=record.get('coefficients'),
                      nodes=record.get('nodes'), strict=state['strict'])

    # evaluation

    def _factored(self, s):
        return s * (1.0 - s) * (s - self.a)

    def _raw_f(self, s):
        if self.kind == NonlinearityKind.CUBIC_BISTABLE:
            return self._factored(s)
        if self.coefficients is not None:
            return _horner(self._f_coefficients, s)
        i = bisect_right(self._xs, s) - 1
        if i >= len(self._xs) - 1:
            return self._ys[-1]
        x0, x1 = self._xs[i], self._xs[i + 1]
        y0, y1 = self._ys[i], self._ys[i + 1]
        return y0 + (y1 - y0) * (s - x0) / (x1 - x0)

    def _raw_F(self, v):
        if self.coefficients is not None:
            return _horner(self._F_coefficients, v)
        if v <= 0.0:
            return 0.0
        inner = [x for x in self._xs if 0.0 < x < v]
        value, _ = integrate.quad(self._raw_f, 0.0, v, points=inner or None,
                                  epsabs=TABULATED_QUADRATURE_TOLERANCE, epsrel=0.0,
                                  limit=max(50, 4 * len(self._xs)))
        return value

    def f(self, s):
        if np.ndim(s) == 0:
            s = float(s)
            if s < 0.0 or s > 1.0:
                return 0.0
            return self._raw_f(s)
        s = np.asarray(s, dtype=float)
        if self.kind == NonlinearityKind.CUBIC_BISTABLE:
            values = self._factored(s)
        elif self.coefficients is not None:
            values = self._polynomial(s)
        else:
            values = np.interp(s, self._xs, self._ys)
        return np.where((s >= 0.0) & (s <= 1.0), values, 0.0)

    def F(self, v):
        if np.ndim(v) == 0:
            return self._raw_F(min(max(float(v), 0.0), 1.0))
        clipped = np.clip(np.asarray(v, dtype=float), 0.0, 1.0)
        if self.coefficients is not None:
            return Polynomial(self._F_coefficients)(clipped)
        return np.array([self._raw_F(x) for x in clipped.ravel()]).reshape(clipped.shape)

    def F_gamma(self, gamma, v):
        return self.F(v) - self.F(gamma)

    # structure

    @property
    def is_bistable(self):
        return self.alpha is not None and abs(self.beta - self.alpha) <= 1e-9

    @property
    def is_balanced(self):
        return self.balance == Balance.BALANCED

    def require_structure(self):
        if self.alpha is None:
            raise InvalidNonlinearity('(f1)', 'structural roots unavailable for a non-strict nonlinearity')

    def _check_hypotheses(self):
        if abs(self._raw_f(0.0)) > ROOT_TOLERANCE or abs(self._raw_f(1.0)) > ROOT_TOLERANCE:
            raise InvalidNonlinearity('(f1)', 'f(0) and f(1) must vanish')
        grid = np.linspace(0.0, 1.0, SIGN_SCAN_SAMPLES + 1)
        values = np.array([self._raw_f(s) for s in grid])
        interior = values[1:-1]
        if interior[0] >= 0.0:
            raise InvalidNonlinearity('(f1)', 'f has no sign change: it must be negative right of 0')
        if interior[-1] <= 0.0:
            raise InvalidNonlinearity('(f1)', 'f has no sign change: it must be positive left of 1')

        i = int(np.nonzero(interior >= 0.0)[0][0]) + 1
        if values[i] == 0.0:
            self.alpha = float(grid[i])
        else:
            self.alpha = float(optimize.brentq(self._raw_f, grid[i - 1], grid[i], xtol=ROOT_TOLERANCE))
        j = int(np.nonzero(interior <= 0.0)[0][-1]) + 1
        if values[j] == 0.0:
            self.beta = float(grid[j])
        else:
            self.beta = float(optimize.brentq(self._raw_f, grid[j], grid[j + 1], xtol=ROOT_TOLERANCE))

        potential_at_one = self._raw_F(1.0)
        if abs(potential_at_one) <= BALANCE_TOLERANCE:
            self.balance = Balance.BALANCED
        elif potential_at_one > 0.0:
            self.balance = Balance.POSITIVE
        else:
            raise NoRootError('(f2)', f"F(1) = {potential_at_one!r} < 0, F has no zero in ]alpha, 1]")
        self.v0 = find_v0(self)


def find_v0(n):
    '''
        Unique zero of F in ]alpha, 1]; exactly 1 in the balanced case.
    '''
    n.require_structure()
    if n.balance == Balance.BALANCED:
        return 1.0
    low, high = n.F(n.alpha), n.F(1.0)
    if not (low < 0.0 < high):
        raise NoRootError('(f2)', 'F does not change sign on ]alpha, 1]')
    return float(optimize.brentq(n.F, n.alpha, 1.0, xtol=ROOT_TOLERANCE))


def zeta(n, gamma):
    n.require_structure()
    if not 0.0 <= gamma < n.alpha:
        raise DomainError(f"gamma must lie in [0, alpha[ = [0, {n.alpha!r}[, got {gamma!r}")
    if gamma == 0.0:
        return n.v0
    level = n.F(gamma)
    return float(optimize.brentq(lambda v: n.F(v) - level, n.alpha, n.v0, xtol=ROOT_TOLERANCE))


def gamma_of_level(n, level):
    '''
        The gamma in ]0, alpha[ with F(gamma) = level, for F(alpha) < level < 0.
    '''
    n.require_structure()
    if not n.F(n.alpha) < level < 0.0:
        raise DomainError(f"level {level!r} outside ]F(alpha), 0[")
    return float(optimize.brentq(lambda v: n.F(v) - level, 0.0, n.alpha, xtol=ROOT_TOLERANCE))


def estimate_lipschitz(n):
    if n.coefficients is not None:
        derivative = Polynomial(n.coefficients).deriv()
        candidates = [0.0, 1.0]
        for root in derivative.deriv().roots():
            if abs(np.imag(root)) < 1e-14 and 0.0 <= np.real(root) <= 1.0:
                candidates.append(float(np.real(root)))
        return float(max(abs(derivative(c)) for c in candidates))
    slopes = [abs((y1 - y0) / (x1 - x0))
              for (x0, y0), (x1, y1) in zip(n.nodes, n.nodes[1:])]
    return float(max(slopes)) if slopes else 0.0


def nonlinearity_table(n, points=201):
    grid = np.linspace(0.0, 1.0, points)
    return grid, n.f(grid), n.F(grid)


def potential_family(n, levels, points=201):
    '''
        F_gamma on [0, 1] for each gamma with F(gamma) in levels.
    '''
    grid = np.linspace(0.0, 1.0, points)
    family = []
    for level in levels:
        gamma = gamma_of_level(n, level)
        family.append((gamma, zeta(n, gamma), n.F(grid) - level))
    return grid, family
