'''
Persistence of command outputs: CSV tables and JSON documents in the run's
output directory.
'''

import csv
import os

from stringcase import snakecase

from minkowski_orbits.config.float_encoder import dumps, format_float
from minkowski_orbits.config.logging import log_intent
from minkowski_orbits.exceptions import ConfigurationError

ORBIT_HEADER = ['t', 'v', 'w', 'vprime']
KAPPA_HEADER = ['rho', 'kappa', 'converged', 'lower_bound', 'upper_bound']
PROFILE_HEADER = ['t', 'v']
NONLINEARITY_HEADER = ['s', 'f', 'F']
POTENTIAL_HEADER = ['v', 'F_gamma']
SWEEP_HEADER = ['delta', 'v_t0', 'sup_distance', 'flattening']
POINCARE_HEADER = ['omega', 'v', 'w']
GRID_HEADER = ['c1', 'c2', 'delta', 'classification', 'rho_star']


def _csv_value(value):
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return format_float(value)
    if value is None:
        return ''
    if hasattr(value, 'dtype'):
        return _csv_value(value.item())
    return str(value)


def file_stem(*parts):
    '''
        snake_case stem from a command name and labelled values,
        e.g. ('orbit', ('delta', 0.1)) -> orbit_delta-0.1
    '''
    pieces = []
    for part in parts:
        if isinstance(part, tuple):
            label, value = part
            pieces.append(f"{snakecase(label)}-{_csv_value(float(value))}")
        else:
            pieces.append(snakecase(part))
    return '_'.join(pieces)


class OutputWriter(object):
    def __init__(self, directory, output_format='both'):
        self.directory = directory
        self.output_format = output_format
        self.written = []
        try:
            os.makedirs(directory, exist_ok=True)
        except OSError as error:
            raise ConfigurationError(f"output directory {directory} is not writable: {error.strerror}")
        if not os.access(directory, os.W_OK):
            raise ConfigurationError(f"output directory {directory} is not writable")

    @property
    def csv_enabled(self):
        return self.output_format in ('csv', 'both')

    @property
    def json_enabled(self):
        return self.output_format in ('json', 'both')

    def path(self, name):
        return os.path.join(self.directory, name)

    def write_csv(self, stem, header, rows):
        if not self.csv_enabled:
            return None
        name = stem + '.csv'
        with open(self.path(name), 'w', newline='') as file:
            writer = csv.writer(file, lineterminator='\n')
            writer.writerow(header)
            for row in rows:
                writer.writerow([_csv_value(value) for value in row])
        self._record(name)
        return name

    def write_orbit(self, stem, segment):
        return self.write_csv(stem, ORBIT_HEADER, segment.to_rows())

    def write_json(self, name, payload, always=False):
        if not (always or self.json_enabled):
            return None
        with open(self.path(name), 'w') as file:
            file.write(dumps(payload))
            file.write('\n')
        self._record(name)
        return name

    def _record(self, name):
        self.written.append(name)
        log_intent(f"wrote {self.path(name)}", 1)
