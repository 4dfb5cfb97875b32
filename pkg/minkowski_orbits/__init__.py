import functools
import os

import click
import numpy as np

from minkowski_orbits.commands.scenario_runner import ScenarioRunner
from minkowski_orbits.config.diff import print_override_changes
from minkowski_orbits.config.float_encoder import dumps
from minkowski_orbits.config.logging import log_err, log_intent_err, set_verbosity
from minkowski_orbits.config.scenario_configuration import ScenarioConfig
from minkowski_orbits.config.utils import ConfigUtils, apply_overrides
from minkowski_orbits.constants import COMMANDS, OUTPUT_FORMATS
from minkowski_orbits.exceptions import NumericalFailure, UnrecoverableException
from minkowski_orbits.version import VERSION

_run_context = {'output_directory': None}


def _write_failure(error):
    directory = _run_context['output_directory']
    if directory is None:
        return
    try:
        os.makedirs(directory, exist_ok=True)
        with open(os.path.join(directory, 'failure.json'), 'w') as file:
            file.write(dumps(error.payload()))
            file.write('\n')
    except OSError as os_error:
        log_intent_err(f"could not write failure.json: {os_error.strerror}")


class CommandWrapper(click.Group):
    def invoke(self, ctx):
        try:
            return super(CommandWrapper, self).invoke(ctx)
        except UnrecoverableException as e:
            log_err(e.value)
            _write_failure(e)
            ctx.exit(e.exit_code)
        except (ArithmeticError, ValueError, np.linalg.LinAlgError) as e:
            failure = NumericalFailure(f"{type(e).__name__}: {e}")
            log_err(failure.value)
            _write_failure(failure)
            ctx.exit(failure.exit_code)


def _scenario_options(func):
    @click.option('--out', 'out', default=None, type=click.Path(file_okay=False),
                  help='Directory the outputs are written to')
    @click.option('--format', 'output_format', default=None, type=click.Choice(OUTPUT_FORMATS),
                  help='Which tables to write; summary.json is always written')
    @click.option('--parallel', default=None, type=click.IntRange(min=1),
                  help='Worker processes for grid evaluations')
    @click.option('--seed', default=None, type=click.IntRange(min=0),
                  help='Seed recorded with the run')
    @click.option('--set', 'assignments', multiple=True,
                  help='Override a scenario value, e.g. --set parameters.rho=0.2. Supports multiple.')
    @click.option('--quiet', '-q', is_flag=True, help='Only print errors')
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        return func(*args, **kwargs)

    return wrapper


def _flag_assignments(out, output_format, parallel, seed):
    assignments = []
    if out is not None:
        assignments.append((['output', 'directory'], out))
    if output_format is not None:
        assignments.append((['output', 'format'], output_format))
    if parallel is not None:
        assignments.append((['parallel'], parallel))
    if seed is not None:
        assignments.append((['seed'], seed))
    return assignments


def run_scenario(record, out=None, output_format=None, parallel=None, seed=None, assignments=(),
                 quiet=False):
    set_verbosity(quiet)
    overrides = _flag_assignments(out, output_format, parallel, seed) + list(assignments)
    record, differences = apply_overrides(record, overrides)
    if not quiet:
        print_override_changes(differences)
    _run_context['output_directory'] = (record.get('output') or {}).get('directory')
    config = ScenarioConfig.from_dict(record)
    _run_context['output_directory'] = config.output_directory
    return ScenarioRunner(config, quiet=quiet).run()


@click.group(cls=CommandWrapper)
@click.version_option(version=VERSION, prog_name="minkowski-orbits")
def cli():
    """
        Heteroclinic, homoclinic and periodic solutions of the prescribed
        Minkowski-curvature equation with indefinite weight.
    """


@cli.command(help="Run the scenario described by a JSON config file.")
@click.option('--config', 'config_path', required=True, type=click.Path(dir_okay=False),
              help='Scenario file')
@_scenario_options
@click.pass_context
def run(ctx, config_path, out, output_format, parallel, seed, assignments, quiet):
    _run_context['output_directory'] = out
    record = ConfigUtils().load(config_path)
    code = run_scenario(record, out, output_format, parallel, seed, assignments, quiet)
    ctx.exit(code)


@cli.command(help="Check a scenario file against the schema without running it.")
@click.option('--config', 'config_path', required=True, type=click.Path(dir_okay=False),
              help='Scenario file')
def validate(config_path):
    config = ScenarioConfig.from_file(config_path)
    click.secho(f"{config_path}: {config.command} scenario is valid", fg="green")


@cli.command(name='commands', help="List the scenario commands.")
def list_commands():
    for command in COMMANDS:
        click.echo(command)


if __name__ == '__main__':
    cli()
