'''
    Handles numpy and dataclass conversion to json with floats written
    at full (17 significant digit) precision
'''

import dataclasses
import enum
import json
import math

import numpy as np


def format_float(value):
    '''
        Shortest repr that round-trips; at most 17 significant digits
    '''
    return repr(float(value))


class FloatEncoder(json.JSONEncoder):
    '''
      Handles numpy scalars, arrays, enums and dataclasses
    '''

    def default(self, o):
        if isinstance(o, np.integer):
            return int(o)
        if isinstance(o, np.floating):
            return _finite_or_string(float(o))
        if isinstance(o, np.bool_):
            return bool(o)
        if isinstance(o, np.ndarray):
            return [self.default(x) if isinstance(x, np.generic) else x for x in o.tolist()]
        if isinstance(o, enum.Enum):
            return o.value
        if hasattr(o, 'to_dict'):
            return o.to_dict()
        if dataclasses.is_dataclass(o):
            return dataclasses.asdict(o)
        if isinstance(o, (set, frozenset)):
            return sorted(o)
        return super(FloatEncoder, self).default(o)

    def iterencode(self, o, _one_shot=False):
        return super(FloatEncoder, self).iterencode(_sanitize(o), _one_shot)


def _finite_or_string(value):
    if math.isfinite(value):
        return value
    return 'inf' if value > 0 else ('-inf' if value < 0 else 'nan')


def _sanitize(o):
    if isinstance(o, float):
        return _finite_or_string(o)
    if isinstance(o, dict):
        return {str(k): _sanitize(v) for k, v in o.items()}
    if isinstance(o, np.ndarray):
        return _sanitize(o.tolist())
    if isinstance(o, (list, tuple)):
        return [_sanitize(v) for v in o]
    return o


def dumps(payload):
    return json.dumps(payload, indent=2, sort_keys=True, cls=FloatEncoder)
