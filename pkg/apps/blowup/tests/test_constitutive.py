import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from apps.blowup import constitutive as cm
from apps.blowup.exceptions import ParameterDomainError
from apps.blowup.grid_fields import ScalarField, VectorField, make_grid, sample


def _constant_rate(D, shape):
    return np.broadcast_to(np.asarray(D, dtype=float)[:, :, None, None], D.shape + shape).copy()


class StressTests(SimpleTestCase):

    def setUp(self):
        self.shape = (8, 8)
        self.D = np.array([[0.3, -0.2], [-0.2, 0.5]])
        self.rho = np.ones(self.shape)

    def test_newtonian_stress(self):
        law = cm.NewtonianLaw(lam=0.4, mu=1.5)
        D = _constant_rate(self.D, self.shape)
        tr = np.trace(self.D)
        P = cm.viscous_stress_from_rate(law, self.rho, D, np.full(self.shape, tr))
        expected = 0.4 * tr * np.eye(2) + 3.0 * self.D
        assert_allclose(P[:, :, 3, 3], expected, rtol=1e-14)

    def test_power_law_stress(self):
        law = cm.PowerLawModel(nu=2.0, q=2.5)
        D = _constant_rate(self.D, self.shape)
        P = cm.viscous_stress_from_rate(law, self.rho, D, np.full(self.shape, np.trace(self.D)))
        mag = np.sqrt(np.sum(self.D ** 2))
        assert_allclose(P[:, :, 0, 0], 2.0 * mag ** 0.5 * self.D, rtol=1e-14)

    def test_shear_thinning_law_is_finite_at_rest(self):
        law = cm.PowerLawModel(nu=1.0, q=1.5)
        D = np.zeros((2, 2) + self.shape)
        P = cm.viscous_stress_from_rate(law, self.rho, D, np.zeros(self.shape))
        self.assertTrue(np.all(P == 0.0))

    def test_power_law_stress_is_homogeneous(self):
        for q in (1.5, 2.5, 3.5):
            law = cm.PowerLawModel(nu=1.3, q=q, eps_reg=0.0)
            base = cm.viscous_stress_from_rate(law, self.rho, _constant_rate(self.D, self.shape),
                                               np.full(self.shape, np.trace(self.D)))
            for scale in (0.5, 2.0, 7.0):
                scaled = cm.viscous_stress_from_rate(law, self.rho, _constant_rate(scale * self.D, self.shape),
                                                     np.full(self.shape, scale * np.trace(self.D)))
                assert_allclose(scaled, scale ** (q - 1.0) * base, rtol=1e-13)

    def test_pressure(self):
        grid = make_grid(2, 8, 1.0)
        rho = ScalarField(grid, np.full(grid.shape, 2.0))
        assert_allclose(cm.pressure(rho, 3.0, 1.4).values, 3.0 * 2.0 ** 1.4)
        with self.assertRaises(ParameterDomainError):
            cm.pressure(ScalarField(grid, -np.ones(grid.shape)), 1.0, 1.4)

    def test_full_stress_at_rest_is_the_pressure(self):
        grid = make_grid(3, 8, 1.0)
        model = cm.ConstitutiveModel(cm.PowerLawModel(nu=1.0, q=2.5), cm.PressureLaw(A=1.0, gamma=1.4))
        rho = ScalarField(grid, np.ones(grid.shape))
        u = VectorField(grid, np.zeros((3,) + grid.shape))
        S = cm.full_stress(model, rho, u).values
        assert_allclose(np.moveaxis(S, (0, 1), (-2, -1)), np.broadcast_to(-np.eye(3), grid.shape + (3, 3)))

    def test_full_stress_in_vacuum_is_viscous(self):
        grid = make_grid(2, 16, 2.0)
        model = cm.ConstitutiveModel(cm.NewtonianLaw(lam=0.2, mu=0.7), cm.PressureLaw(A=3.0, gamma=2.0))
        rho = ScalarField(grid, np.zeros(grid.shape))
        u = sample(grid, lambda x: np.array([np.sin(np.pi * x[1] / 2), x[0] * x[1]]))
        assert_allclose(cm.full_stress(model, rho, u).values, cm.viscous_stress(model, rho, u).values,
                        rtol=0, atol=0)

    def test_full_stress_adds_pressure_on_the_diagonal(self):
        grid = make_grid(2, 16, 2.0)
        model = cm.ConstitutiveModel(cm.PowerLawModel(nu=1.0, q=2.5), cm.PressureLaw(A=2.0, gamma=1.4))
        rho = sample(grid, lambda x: np.exp(-x[0] ** 2 - x[1] ** 2))
        u = sample(grid, lambda x: np.array([np.sin(np.pi * x[1] / 2), np.cos(np.pi * x[0] / 2)]))
        S = cm.full_stress(model, rho, u).values
        P = cm.viscous_stress(model, rho, u).values
        p = 2.0 * rho.values ** 1.4
        assert_allclose(S, P - p * np.eye(2)[:, :, None, None], rtol=1e-14, atol=1e-15)

    def test_dissipation_density_is_nonnegative(self):
        grid = make_grid(2, 16, 2.0)
        model = cm.ConstitutiveModel(cm.PowerLawModel(nu=1.0, q=2.5), cm.PressureLaw(A=1.0, gamma=1.4))
        rho = sample(grid, lambda x: np.exp(-x[0] ** 2 - x[1] ** 2))
        u = sample(grid, lambda x: np.array([np.sin(np.pi * x[1] / 2), np.cos(np.pi * x[0] / 2)]))
        self.assertTrue(np.all(cm.dissipation_density(model, rho, u).values >= 0))

    def test_parameter_checks(self):
        with self.assertRaises(ParameterDomainError):
            cm.NewtonianLaw(lam=0.0, mu=0.0)
        with self.assertRaises(ParameterDomainError):
            cm.PowerLawModel(nu=1.0, q=1.0)
        with self.assertRaises(ParameterDomainError):
            cm.PressureLaw(A=1.0, gamma=1.0)
        model = cm.ConstitutiveModel(cm.NewtonianLaw(lam=-1.0, mu=1.0), cm.PressureLaw(A=1.0, gamma=1.4))
        with self.assertRaises(ParameterDomainError):
            model.check_dimension(3)


class CoercivityTests(SimpleTestCase):

    def setUp(self):
        self.samples = cm.coercivity_samples(3, count=32, seed=7)

    def test_exact_power_law_is_coercive(self):
        report = cm.coercivity_check(cm.PowerLawModel(nu=1.0, q=2.5), [0.0, 1.0], self.samples, 1.0, 2.5)
        self.assertTrue(report.passed)
        self.assertEqual(report.samples_checked, 2 * len(self.samples))
        self.assertEqual(report.caveats, [])

    def test_newtonian_with_nonnegative_lambda_is_coercive(self):
        report = cm.coercivity_check(cm.NewtonianLaw(lam=0.0, mu=1.0), [1.0], self.samples, 2.0, 2.0)
        self.assertTrue(report.passed)

    def test_negative_lambda_fails_with_caveat(self):
        report = cm.coercivity_check(cm.NewtonianLaw(lam=-0.5, mu=1.0), [1.0], self.samples, 2.0, 2.0)
        self.assertFalse(report.passed)
        self.assertEqual(len(report.caveats), 1)

    def test_regularized_shear_thinning_law_fails_with_caveat(self):
        law = cm.PowerLawModel(nu=1.0, q=1.5, eps_reg=1e-2)
        report = cm.coercivity_check(law, [1.0], self.samples, 1.0, 1.5)
        self.assertFalse(report.passed)
        self.assertEqual(len(report.caveats), 1)

    def test_generalized_law_boundedness(self):
        bounded = cm.GeneralizedLaw(lambda g, tr: 0.0 * tr, lambda g, m: 1.0 + m)
        singular = cm.GeneralizedLaw(lambda g, tr: 0.0 * tr, lambda g, m: np.asarray(m, dtype=float) ** -0.5)
        self.assertTrue(bounded.check_bounded_at_zero())
        with np.errstate(divide='ignore'):
            self.assertFalse(singular.check_bounded_at_zero())

    def test_empty_samples_are_rejected(self):
        with self.assertRaises(ParameterDomainError):
            cm.coercivity_check(cm.PowerLawModel(nu=1.0, q=2.5), [], self.samples, 1.0, 2.5)
