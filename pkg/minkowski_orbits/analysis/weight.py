'''
The weight q as an ordered list of pieces tiling the real line. Pieces carry
a constant, an explicit uniform sample grid, or an expression in t that is
sampled for bounds and masses. Sampled and expression payloads may be
periodic so that they can cover a half-line.
'''

import math
from bisect import bisect_right
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.integrate import trapezoid

from minkowski_orbits.exceptions import (ConfigurationError, DomainError,
                                         HypothesisViolation)

_EXPRESSION_NAMESPACE = {
    'sin': np.sin, 'cos': np.cos, 'tan': np.tan, 'tanh': np.tanh,
    'exp': np.exp, 'log': np.log, 'sqrt': np.sqrt, 'abs': np.abs,
    'minimum': np.minimum, 'maximum': np.maximum, 'where': np.where,
    'pi': np.pi, 'e': np.e,
}

DEFAULT_EXPRESSION_STEP = 1e-3


class VaryingSide(Enum):
    LEFT_VARYING = 'left-varying'
    RIGHT_VARYING = 'right-varying'


def _bound(value, default):
    return default if value is None else float(value)


def _linear_integral(grid, values, a, b):
    inside = grid[(grid > a) & (grid < b)]
    ts = np.concatenate(([a], inside, [b]))
    return float(trapezoid(np.interp(ts, grid, values), ts))


class WeightPiece(object):
    def __init__(self, start, end, constant=None, samples=None, expression=None,
                 step=None, period=None, origin=None):
        self.start = _bound(start, -math.inf)
        self.end = _bound(end, math.inf)
        if not self.start < self.end:
            raise ConfigurationError(f"weight piece [{start}, {end}] is empty")
        payloads = [p is not None for p in (constant, samples, expression)]
        if sum(payloads) != 1:
            raise ConfigurationError("a weight piece needs exactly one of constant, samples, expression")
        self.constant = None if constant is None else float(constant)
        self.expression = expression
        self.step = step
        self.period = None if period is None else float(period)
        self.origin = origin
        self._code = None
        self.grid = None
        self.values = None

        if self.constant is not None:
            return
        finite = math.isfinite(self.start) and math.isfinite(self.end)
        if self.period is None and not finite:
            raise ConfigurationError("sampled or expression payloads on an unbounded piece need a period")
        if self.period is not None:
            anchor = origin if origin is not None else (self.start if math.isfinite(self.start) else 0.0)
            self.origin = float(anchor)
            span = (self.origin, self.origin + self.period)
        else:
            span = (self.start, self.end)
        if expression is not None:
            self._code = compile(expression, '<weight expression>', 'eval')
            self.step = float(step) if step is not None else DEFAULT_EXPRESSION_STEP
            count = int(math.ceil((span[1] - span[0]) / self.step)) + 1
            self.grid = np.linspace(span[0], span[1], max(count, 2))
            self.values = np.asarray(self._evaluate_expression(self.grid), dtype=float) * np.ones_like(self.grid)
        else:
            self.values = np.asarray(samples, dtype=float)
            self.grid = np.linspace(span[0], span[1], len(self.values))

    def __reduce__(self):
        return (WeightPiece.from_config, (self.to_config(),))

    def _evaluate_expression(self, t):
        namespace = dict(_EXPRESSION_NAMESPACE)
        namespace['t'] = t
        return eval(self._code, {'__builtins__': {}}, namespace)

    @property
    def is_constant(self):
        return self.constant is not None

    def _reduce(self, t):
        if self.period is None:
            return t
        return self.origin + (t - self.origin) % self.period

    def value(self, t):
        if self.constant is not None:
            return self.constant
        if self._code is not None:
            return float(self._evaluate_expression(t))
        return float(np.interp(self._reduce(t), self.grid, self.values))

    def extrema(self, a=-math.inf, b=math.inf):
        '''
            Lower and upper bound of the payload on the piece intersected with [a, b].
        '''
        if self.constant is not None:
            return self.constant, self.constant
        lo, hi = max(a, self.start), min(b, self.end)
        if self.period is not None and hi - lo >= self.period:
            return float(self.values.min()), float(self.values.max())
        if self.period is not None:
            points = np.linspace(lo, hi, max(3, int(math.ceil((hi - lo) / (self.grid[1] - self.grid[0]))) + 1))
            values = np.interp(self._reduce(points), self.grid, self.values)
        else:
            inside = self.grid[(self.grid >= lo) & (self.grid <= hi)]
            points = np.concatenate(([lo], inside, [hi]))
            values = np.interp(points, self.grid, self.values)
        return float(values.min()), float(values.max())

    def _primitive(self, x):
        cycle = _linear_integral(self.grid, self.values, self.origin, self.origin + self.period)
        turns = math.floor((x - self.origin) / self.period)
        remainder = x - self.origin - turns * self.period
        return turns * cycle + _linear_integral(self.grid, self.values, self.origin, self.origin + remainder)

    def integral(self, a, b):
        lo, hi = max(a, self.start), min(b, self.end)
        if hi <= lo:
            return 0.0
        if self.constant is not None:
            return self.constant * (hi - lo)
        if self.period is None:
            return _linear_integral(self.grid, self.values, lo, hi)
        return self._primitive(hi) - self._primitive(lo)

    def scaled(self, factor):
        record = self.to_config()
        for key in ('constant',):
            if key in record:
                record[key] = record[key] * factor
        if 'samples' in record:
            record['samples'] = [v * factor for v in record['samples']]
        if 'expression' in record:
            record['expression'] = f"({factor!r}) * ({record['expression']})"
        return WeightPiece.from_config(record)

    @classmethod
    def from_config(cls, record):
        return cls(record.get('from'), record.get('to'), constant=record.get('constant'),
                   samples=record.get('samples'), expression=record.get('expression'),
                   step=record.get('step'), period=record.get('period'), origin=record.get('origin'))

    def to_config(self):
        record = {
            'from': None if math.isinf(self.start) else self.start,
            'to': None if math.isinf(self.end) else self.end,
        }
        if self.constant is not None:
            record['constant'] = self.constant
        elif self.expression is not None:
            record['expression'] = self.expression
            record['step'] = self.step
        else:
            record['samples'] = [float(v) for v in self.values]
        if self.period is not None:
            record['period'] = self.period
            record['origin'] = self.origin
        return record


@dataclass(frozen=True)
class HypothesisReport:
    eta: float
    sup_norm: float
    c: float
    t0: float
    side: VaryingSide

    def to_dict(self):
        return {'eta': self.eta, 'sup_norm': self.sup_norm, 'c': self.c,
                't0': self.t0, 'side': self.side.value}


class WeightProfile(object):
    def __init__(self, pieces, t0=0.0):
        pieces = sorted(pieces, key=lambda p: p.start)
        if not pieces:
            raise ConfigurationError("a weight needs at least one piece")
        if pieces[0].start != -math.inf or pieces[-1].end != math.inf:
            raise ConfigurationError("weight pieces must cover the whole real line")
        for left, right in zip(pieces, pieces[1:]):
            if left.end != right.start:
                raise ConfigurationError(
                    f"weight pieces must tile the line: gap or overlap at {left.end} / {right.start}")
        self.pieces = tuple(pieces)
        self.t0 = float(t0)
        self._starts = [p.start for p in self.pieces]

    @classmethod
    def constant(cls, value, t0=0.0):
        return cls([WeightPiece(None, None, constant=value)], t0=t0)

    @classmethod
    def stepwise(cls, c1, c2, t0=0.0):
        return cls([WeightPiece(None, t0, constant=c1), WeightPiece(t0, None, constant=c2)], t0=t0)

    @classmethod
    def from_config(cls, record):
        if record is None:
            return cls.constant(1.0)
        return cls([WeightPiece.from_config(p) for p in record['pieces']], t0=record.get('t0', 0.0))

    def to_config(self):
        return {'t0': self.t0, 'pieces': [p.to_config() for p in self.pieces]}

    def __repr__(self):
        return f"WeightProfile({self.to_config()!r})"

    def __reduce__(self):
        return (WeightProfile.from_config, (self.to_config(),))

    def scaled(self, factor):
        return WeightProfile([p.scaled(factor) for p in self.pieces], t0=self.t0)

    @property
    def breakpoints(self):
        return [p.start for p in self.pieces[1:]]

    def piece_at(self, t):
        return self.pieces[bisect_right(self._starts, t) - 1]

    def eval_q(self, t):
        return self.piece_at(t).value(t)

    __call__ = eval_q

    def l1_mass(self, a, b):
        if not (math.isfinite(a) and math.isfinite(b)) or a > b:
            raise DomainError(f"l1_mass needs finite a <= b, got [{a}, {b}]")
        return sum(p.integral(a, b) for p in self.pieces if p.end > a and p.start < b)

    def _pieces_on(self, a, b):
        return [p for p in self.pieces if p.end > a and p.start < b]

    def _constant_on(self, a, b):
        pieces = self._pieces_on(a, b)
        if all(p.is_constant for p in pieces) and len({p.constant for p in pieces}) == 1:
            return pieces[0].constant
        return None

    @property
    def tail_constant_right(self):
        return self._constant_on(self.t0, math.inf)

    @property
    def tail_constant_left(self):
        return self._constant_on(-math.inf, self.t0)

    @property
    def is_constant(self):
        return self._constant_on(-math.inf, math.inf) is not None

    def constant_between(self, a, b):
        '''
            The value of q if it is constant on [a, b], None otherwise.
        '''
        lo, hi = min(a, b), max(a, b)
        if lo == hi:
            return self.eval_q(lo) if self.piece_at(lo).is_constant else None
        return self._constant_on(lo, hi)

    @property
    def varying_side(self):
        if self.tail_constant_right is not None:
            return VaryingSide.LEFT_VARYING
        if self.tail_constant_left is not None:
            return VaryingSide.RIGHT_VARYING
        return None

    def sup_on(self, a, b):
        return max(p.extrema(a, b)[1] for p in self._pieces_on(a, b))

    def inf_on(self, a, b):
        return min(p.extrema(a, b)[0] for p in self._pieces_on(a, b))

    def bounds(self, side=None):
        side = side or self.varying_side or VaryingSide.LEFT_VARYING
        if side == VaryingSide.LEFT_VARYING:
            a, b = -math.inf, self.t0
        else:
            a, b = self.t0, math.inf
        return self.inf_on(a, b), self.sup_on(a, b)

    @property
    def eta(self):
        return self.bounds()[0]

    @property
    def sup_norm(self):
        return self.bounds()[1]


def check_hypotheses(w, side):
    side = VaryingSide(side)
    for piece in w.pieces:
        low, _ = piece.extrema()
        if not low > 0.0:
            raise HypothesisViolation('positivity', f"q reaches {low!r} on [{piece.start}, {piece.end}]")
    if side == VaryingSide.LEFT_VARYING:
        c = w.tail_constant_right
        if c is None:
            raise HypothesisViolation('constant right tail', f"q is not constant on [{w.t0}, +inf[")
    else:
        c = w.tail_constant_left
        if c is None:
            raise HypothesisViolation('constant left tail', f"q is not constant on ]-inf, {w.t0}]")
    eta, sup_norm = w.bounds(side)
    for horizon in (10.0, 100.0, 1000.0):
        if side == VaryingSide.LEFT_VARYING:
            mass = w.l1_mass(w.t0 - horizon, w.t0)
        else:
            mass = w.l1_mass(w.t0, w.t0 + horizon)
        if mass < eta * horizon * (1.0 - 1e-12):
            raise HypothesisViolation('divergent L1 mass', f"mass {mass!r} over {horizon} below eta*T")
    return HypothesisReport(eta=eta, sup_norm=sup_norm, c=c, t0=w.t0, side=side)
