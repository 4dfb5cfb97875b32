import json
import os

import numpy as np
import pytest

from minkowski_orbits.analysis.dynamics import OrbitSegment, PhaseState, Termination
from minkowski_orbits.commands.writers import (ORBIT_HEADER, OutputWriter,
                                               file_stem)


class TestFileStem(object):
    def test_labelled_values(self):
        assert file_stem('orbit', ('delta', 0.1), ('gamma', 0)) == 'orbit_delta-0.1_gamma-0.0'

    def test_names_are_snake_case(self):
        assert file_stem('definitively-periodic', 'profile') == 'definitively_periodic_profile'
        assert file_stem('sweepProfile') == 'sweep_profile'


class TestOutputWriter(object):
    def test_csv_values(self, tmp_path):
        writer = OutputWriter(str(tmp_path), 'csv')
        name = writer.write_csv('table', ['x', 'ok', 'missing'], [(0.1, True, None), (np.float64(2.5), False, 'a')])
        assert name == 'table.csv'
        assert (tmp_path / 'table.csv').read_text() == 'x,ok,missing\n0.1,true,\n2.5,false,a\n'

    def test_orbit(self, tmp_path):
        segment = OrbitSegment([PhaseState(0.0, 0.5, 0.0), PhaseState(1.0, 0.25, -0.5)], Termination.TIME_LIMIT)
        writer = OutputWriter(str(tmp_path))
        writer.write_orbit('orbit', segment)
        lines = (tmp_path / 'orbit.csv').read_text().splitlines()
        assert lines[0] == ','.join(ORBIT_HEADER)
        assert lines[1] == '0.0,0.5,0.0,0.0'
        assert len(lines) == 3

    def test_json_format_skips_tables(self, tmp_path):
        writer = OutputWriter(str(tmp_path), 'json')
        assert writer.write_csv('table', ['x'], [(1.0,)]) is None
        writer.write_json('result.json', {'b': 1.0, 'a': float('nan')})
        assert not (tmp_path / 'table.csv').exists()
        assert json.loads((tmp_path / 'result.json').read_text()) == {'a': 'nan', 'b': 1.0}

    def test_forced_json(self, tmp_path):
        writer = OutputWriter(str(tmp_path), 'csv')
        assert writer.write_json('skipped.json', {}) is None
        assert writer.write_json('summary.json', {'x': 0.1}, always=True) == 'summary.json'
        assert writer.written == ['summary.json']

    def test_sorted_keys_and_exact_floats(self, tmp_path):
        writer = OutputWriter(str(tmp_path))
        writer.write_json('summary.json', {'z': 0.1 + 0.2, 'a': [np.float64(1 / 3)]})
        text = (tmp_path / 'summary.json').read_text()
        assert text.index('"a"') < text.index('"z"')
        assert '0.30000000000000004' in text
        assert repr(1 / 3) in text

    def test_creates_directory(self, tmp_path):
        directory = os.path.join(str(tmp_path), 'nested', 'run')
        OutputWriter(directory)
        assert os.path.isdir(directory)

    def test_paths(self, tmp_path):
        writer = OutputWriter(str(tmp_path))
        assert writer.path('a.csv') == os.path.join(str(tmp_path), 'a.csv')
        assert writer.csv_enabled and writer.json_enabled

    @pytest.mark.parametrize('output_format, csv_enabled, json_enabled', [
        ('csv', True, False), ('json', False, True), ('both', True, True)])
    def test_format_switches(self, tmp_path, output_format, csv_enabled, json_enabled):
        writer = OutputWriter(str(tmp_path), output_format)
        assert writer.csv_enabled == csv_enabled
        assert writer.json_enabled == json_enabled
