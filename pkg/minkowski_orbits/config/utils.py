"""
utilities for loading scenario files and applying command-line overrides
"""

import copy
import json

import dictdiffer
from click import style

from minkowski_orbits.config.logging import log_err
from minkowski_orbits.exceptions import ConfigurationError


class ConfigUtils(object):
    def __init__(self, validation_function=None):
        self.validation_function = validation_function

    def load(self, path):
        try:
            with open(path, 'r') as file:
                content = file.read()
        except OSError as error:
            raise ConfigurationError(f"Unable to read scenario file {path}: {error.strerror}")
        return self.loads(content, source=path)

    def loads(self, content, source='<string>'):
        try:
            configuration = json.loads(content)
        except json.JSONDecodeError as error:
            self._report_json_decode_error(content, error)
            raise ConfigurationError(
                f"Error in the JSON configuration {source}: {error.msg} "
                f"(line {error.lineno}, column {error.colno})",
                {'line': error.lineno, 'column': error.colno})
        if self.validation_function is not None:
            self.validation_function(configuration)
        return configuration

    def _report_json_decode_error(self, content, error):
        highlighted = self._highlight_error_location(content, error.lineno, error.colno)
        log_err(f"Invalid JSON content:\n{highlighted}")
        log_err(f"Error occurred in line {error.lineno}: {self._get_line_by_number(content, error.lineno)}")

    def _highlight_error_location(self, json_content, error_line, error_column):
        lines = json_content.splitlines()
        highlighted_lines = []
        for line_number, line in enumerate(lines, start=1):
            if line_number == error_line:
                line = self._highlight_error_position(line, error_column)
            highlighted_lines.append(f"{line_number}: {line}")
        return "\n".join(highlighted_lines)

    def _highlight_error_position(self, line, error_column):
        highlighted_line = ""
        for i, char in enumerate(line):
            if i == error_column - 1:
                highlighted_line += style(char, fg="red")
            else:
                highlighted_line += char
        return highlighted_line

    def _get_line_by_number(self, content, line_number):
        lines = content.splitlines()
        if 1 <= line_number <= len(lines):
            return lines[line_number - 1]
        return ""


def parse_override(assignment):
    '''
        'a.b=value' -> (['a', 'b'], value); the value is read as JSON when it
        parses, as a plain string otherwise.
    '''
    if '=' not in assignment:
        raise ConfigurationError(f"override '{assignment}' must look like key=value")
    key, raw = assignment.split('=', 1)
    path = [part for part in key.strip().split('.') if part]
    if not path:
        raise ConfigurationError(f"override '{assignment}' has an empty key")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return path, value


def apply_overrides(configuration, assignments):
    '''
        Copy of configuration with the dotted-key assignments applied, and the
        dictdiffer differences they introduce.
    '''
    updated = copy.deepcopy(configuration)
    for assignment in assignments:
        path, value = assignment if isinstance(assignment, tuple) else parse_override(assignment)
        node = updated
        for part in path[:-1]:
            child = node.get(part)
            if child is None:
                child = node[part] = {}
            elif not isinstance(child, dict):
                raise ConfigurationError(f"cannot set {'.'.join(path)}: {part} is not an object")
            node = child
        node[path[-1]] = value
    return updated, list(dictdiffer.diff(configuration, updated))
