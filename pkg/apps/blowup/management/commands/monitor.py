import os

from django.core.management.base import BaseCommand, CommandError

from apps.blowup import helper
from apps.blowup.certifier import BlowupCertificate, disposition, exit_code, monitor, write_report
from apps.blowup.exceptions import BlowupError


class Command(BaseCommand):
    help = 'Checks a recorded series against a certificate of the same config.'

    exit_code = 0

    def add_arguments(self, parser):
        parser.add_argument('--series', required=True, help='series.csv written by simulate.')
        parser.add_argument('--cert', required=True, help='cert.json written by simulate or certify.')
        parser.add_argument('--out', help='Directory for monitor.json, report.json and summary.txt.')

    def handle(self, *args, **options):
        try:
            series = helper.read_series_csv(options['series'])
            cert = BlowupCertificate.from_dict(helper.load_json(options['cert']))
            report = monitor(series, cert, cert.params)
        except (OSError, ValueError, KeyError, TypeError, BlowupError) as err:
            raise CommandError('cannot monitor: {}'.format(err), returncode=1)

        if options['out']:
            helper.dump_json(report.to_dict(), os.path.join(options['out'], 'monitor.json'))
            write_report(cert, report, options['out'], termination=series.termination, exit_time=series.exit_time)
        outcome = disposition(cert, report, series.termination)
        self.stdout.write('verdict: {} ({} violations)'.format(report.verdict, len(report.violations)))
        for violation in report.violations[:10]:
            self.stdout.write('  {check} at t={time!r}: {value!r}'.format(**violation))
        self.stdout.write('disposition: {}'.format(outcome))
        self.exit_code = exit_code(outcome)
