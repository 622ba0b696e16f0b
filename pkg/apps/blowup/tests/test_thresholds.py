import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from apps.blowup import thresholds
from apps.blowup.exceptions import HypothesisError, ParameterDomainError
from apps.blowup.thresholds import ExponentParams, Theorem


class ExponentTests(SimpleTestCase):

    def test_q0_examples(self):
        self.assertAlmostEqual(thresholds.q0(3, 1.4), 2.1, places=12)
        self.assertAlmostEqual(thresholds.q0(2, 2.0), 4.0 / 3.0, places=12)
        self.assertAlmostEqual(thresholds.q0(3, 1e6), 1.2, delta=1e-5)

    def test_q0_matches_mhd_endpoint_in_three_dimensions(self):
        for gamma in np.linspace(1.01, 5.0, 50):
            self.assertAlmostEqual(thresholds.q0(3, gamma), 6 * gamma / (5 * gamma - 3), delta=1e-12)
            self.assertAlmostEqual(thresholds.q0(3, gamma), thresholds.mhd_lower_endpoint(gamma), delta=1e-12)

    def test_q1_examples(self):
        self.assertAlmostEqual(thresholds.q1(3, 1.4), 4.2 / 2.6, places=12)
        self.assertAlmostEqual(thresholds.q1(2, 2.0), 1.0, places=12)

    @settings(max_examples=100, deadline=None)
    @given(n=st.integers(2, 10), gamma=st.floats(1.05, 10.0))
    def test_ordering_and_jensen_condition_at_q0(self, n, gamma):
        q0 = thresholds.q0(n, gamma)
        self.assertLess(thresholds.q1(n, gamma), q0)
        self.assertLess(q0, n)
        # At q0 the Jensen exponent reduces to gamma + 1:
        self.assertAlmostEqual(thresholds.condition15(n, gamma, q0), gamma + 1.0, delta=1e-9 * gamma)

    def test_q_sigma_decreases_inside_unit_to_n(self):
        values = [thresholds.q_sigma(3, sigma) for sigma in (1.1, 1.5, 2.0, 4.0, 10.0)]
        self.assertEqual(values, sorted(values, reverse=True))
        self.assertTrue(all(1 < v < 3 for v in values))

    def test_constants(self):
        self.assertAlmostEqual(thresholds.sobolev_K(3, 2.5), 5.0, places=12)
        self.assertAlmostEqual(thresholds.condition15(3, 1.4, 2.5), 5.6, places=12)
        self.assertAlmostEqual(thresholds.jensen_gamma_floor(3, 2.5), 7.5 / 7.0, places=12)
        self.assertAlmostEqual(thresholds.energy_exponent(3, 1.4, 2.5), 0.5 / 3.0, places=12)

    def test_domain_errors(self):
        with self.assertRaises(ParameterDomainError):
            thresholds.q0(1, 1.4)
        with self.assertRaises(ParameterDomainError):
            thresholds.q0(3, 1.0)
        with self.assertRaises(ParameterDomainError):
            thresholds.sobolev_K(3, 3.0)

    def test_k1_refuses_failed_jensen_condition(self):
        self.assertLess(thresholds.condition15(3, 1.05, 1.5), 1)
        with self.assertRaises(ParameterDomainError):
            thresholds.momentum_K1(3, 1.05, 1.5, 1.0, 1.0)

    def test_k1_closed_form(self):
        n, gamma, q, m, A = 3, 1.4, 2.5, 2.0, 1.5
        e = (n - q) / (q * n * (gamma - 1))
        expected = m ** ((n * (q - 1) + q) / (q * n)) * ((gamma - 1) / (m * A)) ** e
        self.assertAlmostEqual(thresholds.momentum_K1(n, gamma, q, m, A), expected, delta=1e-12 * expected)

    def test_threshold_set_leaves_undefined_constants_empty(self):
        result = thresholds.threshold_set(3, 1.4, q=3.0, m=1.0, A=1.0)
        self.assertIsNone(result.K)
        self.assertIsNone(result.K1)
        self.assertAlmostEqual(result.mhd_lo, result.q0, delta=1e-12)
        self.assertIsNone(thresholds.threshold_set(2, 1.4).mhd_lo)

    def test_params_reject_gamma_one(self):
        with self.assertRaisesMessage(ParameterDomainError, 'gamma must exceed 1'):
            ExponentParams(n=3, gamma=1.0)


class AdmissibilityTests(SimpleTestCase):

    def test_fluid_theorem_applies(self):
        report = thresholds.admissibility(ExponentParams(n=3, gamma=1.4, q=2.5), [1.0, 0.0, 0.0])
        self.assertTrue(report.theorem_applies)
        self.assertIs(report.which_theorem, Theorem.FLUID)
        self.assertEqual(report.failed, [])

    def test_failed_hypotheses_are_named(self):
        below = thresholds.admissibility(ExponentParams(n=3, gamma=1.4, q=2.0), [1.0, 0.0, 0.0])
        self.assertEqual(below.failed, ['in_q_range'])
        still = thresholds.admissibility(ExponentParams(n=3, gamma=1.4, q=2.5), [0.0, 0.0, 0.0])
        self.assertEqual(still.failed, ['momentum_nonzero'])
        self.assertIs(still.which_theorem, Theorem.NONE)

    def test_left_endpoint_is_closed_only_for_mhd(self):
        lo = thresholds.mhd_lower_endpoint(1.4)
        mhd = thresholds.admissibility(ExponentParams(n=3, gamma=1.4, q=lo), [1.0, 0, 0], mhd=True)
        self.assertTrue(mhd.theorem_applies)
        self.assertIs(mhd.which_theorem, Theorem.MHD)
        q0 = thresholds.q0(3, 1.4)
        fluid = thresholds.admissibility(ExponentParams(n=3, gamma=1.4, q=q0), [1.0, 0, 0])
        self.assertFalse(fluid.in_open_range)
        self.assertIn('in_q_range', fluid.failed)

    def test_mhd_needs_three_dimensions(self):
        report = thresholds.admissibility(ExponentParams(n=2, gamma=2.0, q=1.5), [1.0, 0.0], mhd=True)
        self.assertEqual(report.failed, ['dimension'])


class CertificateConstantsTests(SimpleTestCase):

    def setUp(self):
        self.params = ExponentParams(n=3, gamma=1.4, q=2.5, nu=1.0)

    def test_lifespan_is_energy_over_rate(self):
        constants = thresholds.certificate_constants(self.params, 2.0, [0.3, 0.1, 0.0], 1.7)
        self.assertGreater(constants.C, 0)
        self.assertEqual(constants.T_star, 1.7 / constants.C)
        self.assertEqual(constants.T_star_chain, 1.7 / constants.C_chain)

    def test_scaling_in_momentum_and_energy(self):
        q = self.params.q
        e = thresholds.energy_exponent(3, 1.4, q)
        base = thresholds.certificate_constants(self.params, 2.0, [0.3, 0.0, 0.0], 1.7)
        doubled_P = thresholds.certificate_constants(self.params, 2.0, [0.6, 0.0, 0.0], 1.7)
        doubled_E = thresholds.certificate_constants(self.params, 2.0, [0.3, 0.0, 0.0], 3.4)
        self.assertAlmostEqual(doubled_P.C / base.C, 2 ** q, delta=1e-10 * 2 ** q)
        self.assertAlmostEqual(doubled_E.C / base.C, 2 ** (-e), delta=1e-10)
        self.assertAlmostEqual(doubled_E.C_chain / base.C_chain, 2 ** (-q * e), delta=1e-10)

    def test_lifespan_monotone_in_momentum(self):
        small = thresholds.certificate_constants(self.params, 2.0, [0.3, 0.0, 0.0], 1.7)
        large = thresholds.certificate_constants(self.params, 2.0, [0.31, 0.0, 0.0], 1.7)
        self.assertLess(large.T_star, small.T_star)

    def test_zero_momentum_has_no_certificate(self):
        with self.assertRaises(HypothesisError) as ctx:
            thresholds.certificate_constants(self.params, 2.0, [0.0, 0.0, 0.0], 1.7)
        self.assertEqual(ctx.exception.failed, ['momentum_nonzero'])
