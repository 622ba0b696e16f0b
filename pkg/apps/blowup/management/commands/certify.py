import json
import os

from django.core.management.base import BaseCommand, CommandError

from apps.blowup import helper
from apps.blowup.certifier import certify, disposition, exit_code, write_report
from apps.blowup.cli import config_hash, load_config
from apps.blowup.exceptions import BlowupError
from apps.blowup.solver import build_initial_state


class Command(BaseCommand):
    help = 'Issues the blow-up certificate for the configured initial data (no simulation).'

    exit_code = 0

    def add_arguments(self, parser):
        parser.add_argument('--config', required=True, help='JSON run config.')
        parser.add_argument('--out', help='Directory for cert.json, report.json and summary.txt.')

    def handle(self, *args, **options):
        parsed = load_config(options['config'], 'certify')
        sim = parsed.sim
        try:
            state0 = build_initial_state(sim)
        except BlowupError as err:
            raise CommandError(str(err), returncode=1)
        cert = certify(sim.params, state0, parsed.is_mhd, model=sim.model, config_hash=config_hash(sim))

        if options['out']:
            helper.dump_json(cert.to_dict(), os.path.join(options['out'], 'cert.json'))
            write_report(cert, None, options['out'])
        self.stdout.write(json.dumps(cert.to_dict(), indent=2, sort_keys=True))
        self.exit_code = exit_code(disposition(cert))
