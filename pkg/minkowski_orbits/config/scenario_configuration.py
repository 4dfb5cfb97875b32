'''
This module abstracts loading, validating and echoing scenario
configuration.
'''

import copy
import os

from jsonschema import validate
from jsonschema.exceptions import ValidationError
from stringcase import spinalcase

from minkowski_orbits.analysis.nonlinearity import Nonlinearity
from minkowski_orbits.analysis.weight import WeightProfile
from minkowski_orbits.config.logging import log_err, log_intent
from minkowski_orbits.config.utils import ConfigUtils
from minkowski_orbits.constants import SCHEMA_VERSION, scenario_json_schema
from minkowski_orbits.exceptions import ConfigurationError

DEFAULT_OUTPUT_ROOT = 'output'


def validate_scenario(configuration):
    try:
        validate(configuration, scenario_json_schema)
    except ValidationError as validation_error:
        log_err("Schema validation failed!")
        if validation_error.relative_path:
            relative_path = ".".join(str(item) for item in validation_error.relative_path)
            raise ConfigurationError(f"{validation_error.message} in {relative_path}",
                                     {'path': relative_path})
        raise ConfigurationError(validation_error.message)
    version = configuration.get('schema_version', SCHEMA_VERSION)
    if version > SCHEMA_VERSION:
        raise ConfigurationError(f"scenario schema_version {version} is newer than the supported "
                                 f"version {SCHEMA_VERSION}; upgrade minkowski-orbits")
    log_intent("Schema valid!", 1)


class ScenarioConfig(object):
    '''
        One command run: the nonlinearity, the weight, delta (one value or a
        list), the command parameters and where outputs go.
    '''

    def __init__(self, command, nonlinearity, delta, weight=None, parameters=None, name=None,
                 output=None, parallel=1, seed=0, schema_version=SCHEMA_VERSION):
        self.command = command
        self.nonlinearity = copy.deepcopy(nonlinearity)
        self.delta = delta
        self.weight = copy.deepcopy(weight)
        self.parameters = copy.deepcopy(parameters or {})
        self.name = name
        self.output = dict(output or {})
        self.parallel = parallel
        self.seed = seed
        self.schema_version = schema_version

    @classmethod
    def from_dict(cls, record):
        validate_scenario(record)
        return cls(record['command'], record['nonlinearity'], record['delta'],
                   weight=record.get('weight'), parameters=record.get('parameters'),
                   name=record.get('name'), output=record.get('output'),
                   parallel=record.get('parallel', 1), seed=record.get('seed', 0),
                   schema_version=record.get('schema_version', SCHEMA_VERSION))

    @classmethod
    def from_file(cls, path):
        return cls.from_dict(ConfigUtils().load(path))

    def to_dict(self):
        record = {
            'schema_version': self.schema_version,
            'command': self.command,
            'nonlinearity': copy.deepcopy(self.nonlinearity),
            'delta': copy.deepcopy(self.delta),
            'parameters': copy.deepcopy(self.parameters),
            'output': dict(self.output),
            'parallel': self.parallel,
            'seed': self.seed,
        }
        if self.name is not None:
            record['name'] = self.name
        if self.weight is not None:
            record['weight'] = copy.deepcopy(self.weight)
        return record

    def __eq__(self, other):
        return isinstance(other, ScenarioConfig) and self.to_dict() == other.to_dict()

    def __repr__(self):
        return f"ScenarioConfig({self.to_dict()!r})"

    @property
    def run_name(self):
        return '-'.join(spinalcase(word) for word in self.name.split()) if self.name else self.command

    @property
    def output_directory(self):
        return self.output.get('directory') or os.path.join(DEFAULT_OUTPUT_ROOT, self.run_name)

    @property
    def output_format(self):
        return self.output.get('format', 'both')

    @property
    def deltas(self):
        return list(self.delta) if isinstance(self.delta, list) else [self.delta]

    @property
    def single_delta(self):
        if isinstance(self.delta, list):
            if len(self.delta) != 1:
                raise ConfigurationError(f"command {self.command} takes a single delta, got {self.delta!r}")
            return self.delta[0]
        return self.delta

    def build_nonlinearity(self):
        return Nonlinearity.from_config(self.nonlinearity)

    def build_weight(self):
        return WeightProfile.from_config(self.weight)

    def param(self, key, default=None):
        return self.parameters.get(key, default)

    def required(self, key):
        if key not in self.parameters:
            raise ConfigurationError(f"command {self.command} needs parameters.{key}")
        return self.parameters[key]

    def grid(self, key, default=None):
        values = self.parameters.get(key, default)
        if values is None:
            raise ConfigurationError(f"command {self.command} needs parameters.{key}")
        if not isinstance(values, list) or not values:
            raise ConfigurationError(f"parameters.{key} must be a nonempty list")
        return [float(v) for v in values]
