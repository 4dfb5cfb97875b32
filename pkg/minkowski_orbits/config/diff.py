from colorclass import Color
from terminaltables import SingleTable

from minkowski_orbits.config.float_encoder import format_float
from minkowski_orbits.config.logging import log_bold

_VERDICT_COLORS = {
    'holds': 'autogreen',
    'fails': 'autored',
    'inapplicable': 'autoyellow',
}


def _cell(value):
    if isinstance(value, float):
        return format_float(value)
    if value is None:
        return '-'
    return str(value)


def _dotted(path):
    if isinstance(path, (list, tuple)):
        return '.'.join(str(p) for p in path)
    return str(path)


def _header(*titles):
    return [Color('{autoyellow}' + title + '{/autoyellow}') for title in titles]


def override_rows(differences):
    '''
        Rows for a dictdiffer diff between the file config and the config
        with command-line overrides applied.
    '''
    rows = []
    for kind, path, change in differences:
        if kind == 'change':
            rows.append(['change', _dotted(path), _cell(change[0]), _cell(change[1])])
        elif kind == 'add':
            for key, value in sorted(change, key=lambda x: str(x[0])):
                rows.append(['add', _dotted([path, key] if path else [key]), '', _cell(value)])
        elif kind == 'remove':
            for key, value in sorted(change, key=lambda x: str(x[0])):
                rows.append(['remove', _dotted([path, key] if path else [key]), _cell(value), ''])
    return rows


def print_override_changes(differences):
    rows = override_rows(differences)
    if not rows:
        return
    log_bold("Overrides applied to the scenario:")
    print(SingleTable([_header("Type", "Setting", "File value", "Used value")] + rows).table)


def print_conditions(report, title="Conditions"):
    table = [_header("Condition", "Value", "Relation", "Bound", "Verdict")]
    for condition in report:
        color = _VERDICT_COLORS[condition.verdict]
        name, value, relation, bound, verdict = condition.to_row()
        table.append([name, _cell(value), relation, _cell(bound),
                      Color('{' + color + '}' + verdict + '{/' + color + '}')])
    if len(table) > 1:
        log_bold(title + ":")
        print(SingleTable(table).table)


def print_classification_grid(cells):
    table = [_header("c1", "c2", "delta", "Classification", "rho*")]
    for cell in cells:
        table.append([_cell(value) for value in cell.to_row()])
    log_bold("Stepwise classification:")
    print(SingleTable(table).table)
