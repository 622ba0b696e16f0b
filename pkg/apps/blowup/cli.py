"""
Command-line entry point.

`dispatch(argv)` runs one toolkit subcommand through Django's `call_command`
and turns its outcome into the process exit code:

    0  success / certified-consistent
    1  usage or config error
    2  hypothesis-failed
    3  numerical-breakdown
    4  domain-exhausted
    5  inconsistent (a monitored inequality failed)
"""

import json
import logging
import sys

from django.core.exceptions import ValidationError
from django.core.management import call_command, execute_from_command_line, load_command_class
from django.core.management.base import CommandError

from . import helper
from .validators import ConfigValidator, serialize_config

logger = logging.getLogger(__name__)

SUBCOMMANDS = ('thresholds', 'verify', 'simulate', 'certify', 'monitor')

# Django's own commands stay reachable, so `manage.py test` keeps working:
PASSTHROUGH = ('test', 'check', 'shell')

USAGE = """usage: manage.py <subcommand> [options]

subcommands:
  thresholds --n N --gamma G [--q Q] [--mhd] [--momentum P] [--mass M] [--A A] [--json]
  verify     --config run.json (--check NAME ... | --all) [--out DIR]
  simulate   --config run.json --out DIR
  certify    --config run.json [--out DIR]
  monitor    --series series.csv --cert cert.json [--out DIR]

Run `manage.py <subcommand> --help` for the options of one subcommand.
"""


def parse_config(path, purpose='simulate'):
    """
    Reads and validates a JSON run config.

    Parameters:
    - `path` - Config file.
    - `purpose` - `simulate`, `certify` or `verify`.

    Raises `ValidationError` whose `message_dict` maps dotted config paths to
    messages.
    """

    try:
        with open(path) as handle:
            data = json.load(handle)
    except OSError as err:
        raise ValidationError({'__all__': ['cannot read {}: {}'.format(path, err.strerror)]})
    except ValueError as err:
        raise ValidationError({'__all__': ['{} is not valid JSON: {}'.format(path, err)]})
    return ConfigValidator().validate(data, purpose)


def config_hash(sim):
    """Content hash of a `SimConfig`, stable under key reordering of the source file."""

    return helper.config_hash(serialize_config(sim))


def load_config(path, purpose):
    """`parse_config` for commands: validation problems become a usage error."""

    try:
        return parse_config(path, purpose)
    except ValidationError as err:
        problems = ['{}: {}'.format(key, '; '.join(messages)) for key, messages in sorted(err.message_dict.items())]
        raise CommandError('invalid config {}\n  {}'.format(path, '\n  '.join(problems)), returncode=1)


def dispatch(argv, stdout=None, stderr=None):
    """
    Runs `argv[0]` as a subcommand and returns the exit code.

    Parameters:
    - `argv` - Arguments without the program name.
    - `stdout`, `stderr` - Streams (default: the process streams).
    """

    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    if not argv:
        stderr.write(USAGE)
        return 1
    name = argv[0]
    if name in ('-h', '--help', 'help'):
        stdout.write(USAGE)
        return 0
    if name in PASSTHROUGH:
        execute_from_command_line(['manage.py'] + list(argv))
        return 0
    if name not in SUBCOMMANDS:
        stderr.write('Unknown subcommand {!r}\n\n'.format(name))
        stderr.write(USAGE)
        return 1

    command = load_command_class('apps.blowup', name)
    try:
        call_command(command, *argv[1:], stdout=stdout, stderr=stderr)
    except CommandError as err:
        stderr.write('Error: {}\n'.format(err))
        return err.returncode
    except SystemExit as err:
        # argparse exits directly for --help
        return err.code if isinstance(err.code, int) else 1
    return getattr(command, 'exit_code', 0)
