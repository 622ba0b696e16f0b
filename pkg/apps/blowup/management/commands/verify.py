import json
import os

from django.core.management.base import BaseCommand, CommandError

from apps.blowup import helper
from apps.blowup.cli import load_config
from apps.blowup.exceptions import BlowupError, HypothesisError, ParameterDomainError
from apps.blowup.inequality_lab import CheckName, run_check, verify_all
from apps.blowup.solver import build_initial_state


class Command(BaseCommand):
    help = 'Evaluates functional inequalities on the configured initial data.'

    exit_code = 0

    def add_arguments(self, parser):
        parser.add_argument('--config', required=True, help='JSON run config.')
        group = parser.add_mutually_exclusive_group(required=True)
        group.add_argument('--check', action='append', choices=[name.value for name in CheckName],
                           help='Check to run (repeatable).')
        group.add_argument('--all', action='store_true', help='Run every applicable check.')
        parser.add_argument('--out', help='Directory for verify.json.')

    def handle(self, *args, **options):
        parsed = load_config(options['config'], 'verify')
        sim = parsed.sim
        try:
            state = build_initial_state(sim)
        except BlowupError as err:
            raise CommandError(str(err), returncode=1)

        if options['all']:
            reports = verify_all(state, sim.params, parsed.sigma, parsed.gradient_choice, sim.tolerances)
        else:
            reports = []
            for name in options['check']:
                try:
                    reports.append(run_check(name, state, sim.params, parsed.sigma, parsed.gradient_choice,
                                             sim.tolerances))
                except HypothesisError as err:
                    raise CommandError('{}: {}'.format(name, err), returncode=2)
                except ParameterDomainError as err:
                    raise CommandError('{}: {}'.format(name, err), returncode=1)

        # One --check prints a single report, --all or repeated checks a list:
        payload = [report.to_dict() for report in reports]
        single = not options['all'] and len(options['check']) == 1
        self.stdout.write(json.dumps(payload[0] if single else payload, indent=2, sort_keys=True))
        if options['out']:
            helper.dump_json(payload, os.path.join(options['out'], 'verify.json'))
        # A failed inequality is an inconsistency, not a usage error:
        self.exit_code = 0 if all(report.passed for report in reports) else 5
