import click

_verbosity = {'quiet': False}


def set_verbosity(quiet):
    _verbosity['quiet'] = bool(quiet)


def log_err(text):
    click.secho(text, fg='red', bold=True, err=True)

def log(text):
    if not _verbosity['quiet']:
        click.secho(text, fg='green')

def log_warning(text):
    if not _verbosity['quiet']:
        click.secho(text, fg='yellow')

def log_bold(text):
    if not _verbosity['quiet']:
        click.secho(text, fg='green',  bold=True)

def log_intent(text, level=1):
    if not _verbosity['quiet']:
        click.secho(''.join(['  '] * level + [text]), fg='green')

def log_intent_err(text, level=1):
    click.secho(''.join(['  '] * level + [text]), fg='red')
