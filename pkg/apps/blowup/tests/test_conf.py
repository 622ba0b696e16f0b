from django.conf import settings
from django.test import SimpleTestCase, override_settings

from apps.blowup.conf import DEFAULTS, blowup_setting, tolerance


class BlowupSettingTests(SimpleTestCase):

    def test_project_settings_only_override(self):
        self.assertEqual(blowup_setting('CFL'), DEFAULTS['CFL'])
        self.assertEqual(blowup_setting('TOLERANCES'), DEFAULTS['TOLERANCES'])

    @override_settings(BLOWUP={'CFL': 0.2, 'TOLERANCES': {'drift': 1e-8}})
    def test_settings_entries_replace_defaults(self):
        self.assertEqual(blowup_setting('CFL'), 0.2)
        self.assertEqual(blowup_setting('SUPPORT_MARGIN'), DEFAULTS['SUPPORT_MARGIN'])
        tolerances = blowup_setting('TOLERANCES')
        self.assertEqual(tolerances['drift'], 1e-8)
        self.assertEqual(tolerances['sobolev'], DEFAULTS['TOLERANCES']['sobolev'])

    @override_settings()
    def test_missing_dict_falls_back_to_defaults(self):
        del settings.BLOWUP
        self.assertEqual(blowup_setting('VACUUM_RATIO'), 1e-6)

    @override_settings(BLOWUP={'TOLERANCES': {'drift': 1e-8}})
    def test_run_overrides_win(self):
        self.assertEqual(tolerance('drift'), 1e-8)
        self.assertEqual(tolerance('drift', {'drift': 1e-3}), 1e-3)
        self.assertEqual(tolerance('algebraic', {'drift': 1e-3}), 1e-10)

    def test_unknown_name(self):
        with self.assertRaises(KeyError):
            blowup_setting('COLOUR')
