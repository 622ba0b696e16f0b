import json
import os
import shutil
import tempfile
from io import StringIO

from django.conf import settings
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase

from apps.blowup.cli import config_hash, dispatch, parse_config
from apps.blowup.validators import ConfigValidator, serialize_config


def _config(**overrides):
    data = {
        'grid': {'n': 2, 'cells': 16, 'L': 8.0},
        'params': {'gamma': 2.0, 'q': 1.5},
        'model': {'type': 'power_law'},
        't_end': 1.0,
        'initial_condition': {'name': 'gaussian_drift'},
        'vacuum_ratio': 1e-3,
        'max_steps': 5,
    }
    data.update(overrides)
    return data


class CommandTestCase(SimpleTestCase):

    def setUp(self):
        self.directory = tempfile.mkdtemp()
        self.addCleanup(shutil.rmtree, self.directory, True)

    def write_config(self, data, name='run.json'):
        path = os.path.join(self.directory, name)
        with open(path, 'w') as handle:
            json.dump(data, handle)
        return path

    def call(self, *argv):
        stdout, stderr = StringIO(), StringIO()
        code = dispatch(list(argv), stdout=stdout, stderr=stderr)
        return code, stdout.getvalue(), stderr.getvalue()


class DispatchTests(CommandTestCase):

    def test_missing_subcommand_prints_usage(self):
        code, _, err = self.call()
        self.assertEqual(code, 1)
        self.assertIn('usage:', err)

    def test_unknown_subcommand(self):
        code, _, err = self.call('explode')
        self.assertEqual(code, 1)
        self.assertIn("Unknown subcommand 'explode'", err)

    def test_thresholds_text(self):
        code, out, _ = self.call('thresholds', '--n', '3', '--gamma', '1.4')
        self.assertEqual(code, 0)
        self.assertIn('q0 = 2.1\n', out)
        self.assertIn('mhd_lo = 2.1\n', out)

    def test_thresholds_json_with_momentum(self):
        code, out, _ = self.call('thresholds', '--n', '3', '--gamma', '1.4', '--q', '2.5', '--momentum', '1.0',
                                 '--mass', '2.0', '--json')
        self.assertEqual(code, 0)
        data = json.loads(out)
        self.assertEqual(data['K'], 5.0)
        self.assertTrue(data['admissibility']['theorem_applies'])
        self.assertIsNotNone(data['K1'])

    def test_thresholds_warns_at_critical_exponent(self):
        code, out, err = self.call('thresholds', '--n', '3', '--gamma', '1.4', '--q', '3')
        self.assertEqual(code, 0)
        self.assertIn('q < n is required', err)
        self.assertNotIn('K =', out)
        self.assertNotIn('momentum_nonzero', out)

    def test_thresholds_rejects_one_dimension(self):
        code, _, err = self.call('thresholds', '--n', '1', '--gamma', '1.4')
        self.assertEqual(code, 1)
        self.assertIn('n >= 2', err)


class ConfigTests(CommandTestCase):

    def test_defaults_are_filled_in(self):
        sim = parse_config(self.write_config(_config())).sim
        self.assertEqual(sim.cfl, 0.4)
        self.assertEqual(sim.support_margin, 0.4)
        self.assertEqual(sim.output_every, 10)
        self.assertEqual(sim.model.law.eps_reg, 1e-2)
        thick = parse_config(self.write_config(_config(params={'gamma': 2.0, 'q': 2.5}))).sim
        self.assertEqual(thick.model.law.eps_reg, 0.0)

    def test_errors_name_their_path(self):
        data = _config(params={'gamma': 1.0}, colour='red')
        with self.assertRaises(ValidationError) as ctx:
            parse_config(self.write_config(data))
        errors = ctx.exception.message_dict
        self.assertEqual(errors['params.gamma'], ['gamma must exceed 1'])
        self.assertIn('colour', errors)

    def test_critical_exponent_depends_on_purpose(self):
        path = self.write_config(_config(grid={'n': 3, 'cells': 8, 'L': 4.0}, params={'gamma': 1.4, 'q': 3.0}))
        self.assertEqual(parse_config(path, 'simulate').params.q, 3.0)
        with self.assertRaises(ValidationError) as ctx:
            parse_config(path, 'certify')
        self.assertIn('params.q', ctx.exception.message_dict)

    def test_magnetic_data_needs_three_dimensions(self):
        path = self.write_config(_config(initial_condition={'name': 'mhd_loop'}))
        with self.assertRaises(ValidationError) as ctx:
            parse_config(path)
        self.assertIn('initial_condition.name', ctx.exception.message_dict)

    def test_shipped_configs_validate(self):
        directory = os.path.join(settings.BASE_DIR, 'configs')
        names = sorted(name for name in os.listdir(directory) if name.endswith('.json'))
        self.assertTrue(names)
        for name in names:
            parse_config(os.path.join(directory, name))

    def test_flat_model_matches_nested_form(self):
        nested = _config(params={'gamma': 2.0, 'A': 1.5, 'q': 1.5, 'nu': 0.3},
                         model={'type': 'power_law', 'eps_reg': 0.02})
        flat = _config(model='power_law', nu=0.3, q=1.5, eps_reg=0.02, A=1.5, gamma=2.0)
        del flat['params']
        first = parse_config(self.write_config(nested, 'nested.json')).sim
        second = parse_config(self.write_config(flat, 'flat.json')).sim
        self.assertEqual(serialize_config(first), serialize_config(second))
        self.assertEqual(second.model.law.nu, 0.3)
        self.assertEqual(second.model.pressure.A, 1.5)

    def test_flat_newtonian_model(self):
        data = _config(model='newtonian', mu=0.5, gamma=1.4, params={'q': 2.0})
        sim = parse_config(self.write_config(data)).sim
        self.assertEqual(sim.model.law.mu, 0.5)
        self.assertEqual(sim.model.law.lam, 0.0)
        self.assertEqual(sim.params.gamma, 1.4)

    def test_flat_model_errors_name_their_key(self):
        data = _config(model='power_law', mu=0.5, q=2.5)
        with self.assertRaises(ValidationError) as ctx:
            parse_config(self.write_config(data))
        errors = ctx.exception.message_dict
        self.assertIn('mu', errors)
        self.assertEqual(errors['q'], ['conflicts with params.q'])

    def test_unreadable_file(self):
        with self.assertRaises(ValidationError):
            parse_config(os.path.join(self.directory, 'missing.json'))

    def test_serialized_config_validates_back(self):
        sim = parse_config(self.write_config(_config(hyperdiffusion=0.02))).sim
        self.assertEqual(ConfigValidator().validate(serialize_config(sim)).sim, sim)

    def test_hash_ignores_key_order(self):
        data = _config()
        reordered = dict(reversed(list(data.items())))
        first = config_hash(parse_config(self.write_config(data, 'a.json')).sim)
        second = config_hash(parse_config(self.write_config(reordered, 'b.json')).sim)
        self.assertEqual(first, second)
        self.assertEqual(len(first), 40)
        other = config_hash(parse_config(self.write_config(_config(t_end=2.0), 'c.json')).sim)
        self.assertNotEqual(first, other)


class CertifyCommandTests(CommandTestCase):

    def test_zero_momentum_exits_with_hypothesis_failure(self):
        path = self.write_config(_config(initial_condition={'name': 'colliding_bumps'}))
        code, out, _ = self.call('certify', '--config', path)
        self.assertEqual(code, 2)
        self.assertIn('momentum_nonzero = false', json.loads(out)['reason'])

    def test_drifting_bump_is_certified(self):
        out_dir = os.path.join(self.directory, 'cert')
        code, out, _ = self.call('certify', '--config', self.write_config(_config()), '--out', out_dir)
        self.assertEqual(code, 0)
        self.assertIsNotNone(json.loads(out)['T_star'])
        for name in ('cert.json', 'report.json', 'summary.txt'):
            self.assertTrue(os.path.exists(os.path.join(out_dir, name)))

    def test_invalid_config_is_a_usage_error(self):
        code, _, err = self.call('certify', '--config', self.write_config(_config(t_end=-1.0)))
        self.assertEqual(code, 1)
        self.assertIn('t_end', err)


class VerifyCommandTests(CommandTestCase):

    def test_single_check(self):
        code, out, _ = self.call('verify', '--config', self.write_config(_config()), '--check', 'Holder11')
        self.assertEqual(code, 0)
        report = json.loads(out)
        self.assertEqual(report['name'], 'Holder11')
        self.assertTrue(report['passed'])

    def test_repeated_checks_print_a_list(self):
        code, out, _ = self.call('verify', '--config', self.write_config(_config()), '--check', 'Holder11',
                                 '--check', 'Holder13')
        self.assertEqual(code, 0)
        self.assertEqual([report['name'] for report in json.loads(out)], ['Holder11', 'Holder13'])

    def test_failed_hypothesis(self):
        data = _config(grid={'n': 3, 'cells': 8, 'L': 4.0}, params={'gamma': 1.05, 'q': 1.5})
        code, _, err = self.call('verify', '--config', self.write_config(data), '--check', 'Jensen14')
        self.assertEqual(code, 2)
        self.assertIn('Jensen14', err)

    def test_all_checks_written(self):
        out_dir = os.path.join(self.directory, 'verify')
        code, out, _ = self.call('verify', '--config', self.write_config(_config()), '--all', '--out', out_dir)
        with open(os.path.join(out_dir, 'verify.json')) as handle:
            reports = json.load(handle)
        self.assertEqual(json.loads(out), reports)
        self.assertEqual(code, 0 if all(r['passed'] for r in reports) else 5)


class SimulateCommandTests(CommandTestCase):

    def simulate(self, name):
        out_dir = os.path.join(self.directory, name)
        code, out, _ = self.call('simulate', '--config', self.write_config(_config()), '--out', out_dir)
        return code, out, out_dir

    def test_outputs_and_monitor_replay(self):
        code, out, out_dir = self.simulate('run')
        # Five steps stay finite and inside the gate, so only the monitor verdict is open:
        self.assertIn(code, (0, 5))
        self.assertIn('step-limit', out)
        for name in ('series.csv', 'cert.json', 'monitor.json', 'report.json', 'summary.txt', 'manifest.json'):
            self.assertTrue(os.path.exists(os.path.join(out_dir, name)), name)
        with open(os.path.join(out_dir, 'manifest.json')) as handle:
            manifest = json.load(handle)
        self.assertIn('series.csv', manifest['outputs'])
        self.assertIn('snapshots/rho_000000.bin', manifest['outputs'])
        with open(os.path.join(out_dir, 'report.json')) as handle:
            self.assertEqual(json.load(handle)['exit_code'], code)

        replay, _, _ = self.call('monitor', '--series', os.path.join(out_dir, 'series.csv'),
                                 '--cert', os.path.join(out_dir, 'cert.json'))
        self.assertEqual(replay, code)

    def test_runs_are_reproducible(self):
        self.simulate('first')
        self.simulate('second')
        for name in ('series.csv', 'cert.json', 'monitor.json'):
            with open(os.path.join(self.directory, 'first', name)) as a, \
                    open(os.path.join(self.directory, 'second', name)) as b:
                self.assertEqual(a.read(), b.read(), name)

    def test_monitor_rejects_missing_files(self):
        code, _, err = self.call('monitor', '--series', os.path.join(self.directory, 'none.csv'),
                                 '--cert', os.path.join(self.directory, 'none.json'))
        self.assertEqual(code, 1)
        self.assertIn('cannot monitor', err)
