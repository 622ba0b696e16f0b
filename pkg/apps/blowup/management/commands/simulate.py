import os
import time

from django.core.management.base import BaseCommand, CommandError

from apps.blowup import __version__, helper, solver
from apps.blowup.certifier import certify, monitor, write_report, exit_code
from apps.blowup.cli import config_hash, load_config
from apps.blowup.exceptions import BlowupError
from apps.blowup.validators import serialize_config


class Command(BaseCommand):
    help = 'Runs a simulation and writes the series, snapshots, certificate, monitor report and manifest.'

    exit_code = 0

    def add_arguments(self, parser):
        parser.add_argument('--config', required=True, help='JSON run config.')
        parser.add_argument('--out', required=True, help='Output directory.')

    def handle(self, *args, **options):
        parsed = load_config(options['config'], 'simulate')
        sim = parsed.sim
        digest = config_hash(sim)
        out = options['out']
        started = time.perf_counter()

        try:
            result = solver.run(sim, snapshot_dir=os.path.join(out, 'snapshots'), config_hash=digest)
        except BlowupError as err:
            raise CommandError(str(err), returncode=1)

        written = [helper.write_series_csv(result.series, os.path.join(out, 'series.csv'))]
        cert = certify(sim.params, result.initial_state, parsed.is_mhd, model=sim.model, config_hash=digest)
        written.append(helper.dump_json(cert.to_dict(), os.path.join(out, 'cert.json')))
        report = monitor(result.series, cert, sim.params, sim.tolerances)
        written.append(helper.dump_json(report.to_dict(), os.path.join(out, 'monitor.json')))
        outcome = write_report(cert, report, out, termination=result.termination, exit_time=result.exit_time)
        written += [os.path.join(out, 'report.json'), os.path.join(out, 'summary.txt')]
        written += result.snapshot_files

        manifest = helper.RunManifest(
            config=serialize_config(sim),
            version=__version__,
            config_hash=digest,
            outputs=sorted(os.path.relpath(path, out) for path in written),
            duration=time.perf_counter() - started,
            disposition=outcome,
        )
        helper.write_manifest(manifest, out)

        if not result.conservation_guaranteed:
            self.stderr.write('Warning: {} density floor clamps fired; conservation not guaranteed'.format(
                result.clamp_events))
        self.stdout.write('{} ({} at t = {!r}, {} steps)'.format(
            outcome, result.termination, result.exit_time, result.steps))
        self.exit_code = exit_code(outcome)
