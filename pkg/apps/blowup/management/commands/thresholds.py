import json

from django.core.management.base import BaseCommand, CommandError

from apps.blowup import thresholds
from apps.blowup.exceptions import ParameterDomainError


class Command(BaseCommand):
    help = 'Prints the threshold exponents and constants for a dimension and heat ratio.'

    def add_arguments(self, parser):
        parser.add_argument('--n', type=int, required=True, help='Spatial dimension (>= 2).')
        parser.add_argument('--gamma', type=float, required=True, help='Heat ratio (> 1).')
        parser.add_argument('--q', type=float, help='Coercivity exponent; enables K and the admissibility checks.')
        parser.add_argument('--mhd', action='store_true', help='Use the MHD exponent range.')
        parser.add_argument('--momentum', type=float, help='|P| of the initial data.')
        parser.add_argument('--mass', type=float, help='Total mass; enables K1.')
        parser.add_argument('--A', dest='A', type=float, default=1.0, help='Pressure coefficient.')
        parser.add_argument('--json', action='store_true', help='Print JSON instead of text.')

    def handle(self, *args, **options):
        n, gamma, q = options['n'], options['gamma'], options['q']
        try:
            result = thresholds.threshold_set(n, gamma, q=q, m=options['mass'], A=options['A'])
            data = {'n': n, 'gamma': gamma, 'q': q}
            data.update(result.to_dict())
            if q is not None:
                if not q < n:
                    self.stderr.write('Warning: q < n is required for K; theorem quantities are undefined')
                data['finite_energy_class'] = thresholds.finite_energy_class(n, gamma, q)
                if q < n:
                    data['condition15'] = thresholds.condition15(n, gamma, q)
                    data['jensen_gamma_floor'] = thresholds.jensen_gamma_floor(n, q)
                    data['energy_exponent'] = thresholds.energy_exponent(n, gamma, q)
                params = thresholds.ExponentParams(n=n, gamma=gamma, A=options['A'], q=q)
                P = [0.0 if options['momentum'] is None else options['momentum']]
                report = thresholds.admissibility(params, P, mhd=options['mhd'])
                data['admissibility'] = report.to_dict()
                if options['momentum'] is None:
                    # Without a momentum only the exponent hypotheses are meaningful:
                    data['admissibility'].pop('momentum_nonzero')
                    data['admissibility'].pop('theorem_applies')
                    data['admissibility'].pop('which_theorem')
                    data['admissibility']['failed'] = [
                        name for name in report.failed if name != 'momentum_nonzero']
        except ParameterDomainError as err:
            raise CommandError(str(err), returncode=1)

        if options['json']:
            self.stdout.write(json.dumps(data, indent=2, sort_keys=True))
            return
        for key in ('q0', 'q1', 'mhd_lo', 'K', 'K1', 'condition15', 'jensen_gamma_floor', 'energy_exponent'):
            if data.get(key) is not None:
                self.stdout.write('{} = {:.12g}'.format(key, data[key]))
        if 'finite_energy_class' in data:
            self.stdout.write('finite_energy_class = {}'.format(data['finite_energy_class']))
        for key, value in sorted(data.get('admissibility', {}).items()):
            self.stdout.write('admissibility.{} = {}'.format(key, value))
