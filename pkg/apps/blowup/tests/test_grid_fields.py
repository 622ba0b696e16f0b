import math

import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from apps.blowup import grid_fields as gf
from apps.blowup.exceptions import GridMismatchError, ParameterDomainError
from apps.blowup.thresholds import ExponentParams


class GridTests(SimpleTestCase):

    def test_grid_invariants(self):
        with self.assertRaises(ParameterDomainError):
            gf.make_grid(2, (4, 16), 1.0)
        with self.assertRaises(ParameterDomainError):
            gf.make_grid(4, 16, 1.0)
        with self.assertRaises(ParameterDomainError):
            gf.make_grid(2, 16, 0.0)

    def test_cell_centres_are_symmetric(self):
        grid = gf.make_grid(1, 16, 2.0)
        x = grid.axis_points(0)
        assert_allclose(x, -x[::-1], atol=1e-15)
        self.assertAlmostEqual(grid.spacing[0], 0.25)
        self.assertAlmostEqual(grid.volume, 4.0)

    def test_integrate_constant(self):
        grid = gf.make_grid(2, (16, 32), 3.0)
        self.assertAlmostEqual(gf.integrate(np.full(grid.shape, 2.5), grid), 2.5 * 36.0, places=10)


class OperatorTests(SimpleTestCase):

    def setUp(self):
        self.grid2 = gf.make_grid(2, 32, 4.0)
        self.grid3 = gf.make_grid(3, 16, math.pi)

    def test_central_difference_of_sine(self):
        grid = gf.make_grid(1, 32, math.pi)
        x = grid.axis_points(0)
        h = grid.spacing[0]
        assert_allclose(gf.partial(np.sin(x), grid, 0), np.cos(x) * math.sin(h) / h, atol=1e-12)

    def test_exact_on_quadratics_away_from_seam(self):
        field = gf.sample(self.grid2, lambda x: x[0] ** 2 + 3 * x[0] * x[1])
        grad = gf.gradient(field).values
        x = self.grid2.coordinates()
        inner = (slice(2, -2), slice(2, -2))
        assert_allclose(grad[0][inner], (2 * x[0] + 3 * x[1])[inner], atol=1e-10)
        assert_allclose(grad[1][inner], (3 * x[0])[inner], atol=1e-10)

    def test_curl_of_gradient_and_divergence_of_curl_vanish(self):
        phi = gf.sample(self.grid3, lambda x: np.sin(x[0]) * np.cos(2 * x[1]) + np.sin(x[2]))
        assert_allclose(gf.curl(gf.gradient(phi)).values, 0.0, atol=1e-12)
        A = gf.sample(self.grid3, lambda x: np.array([np.sin(x[1]), np.cos(x[2]), np.sin(x[0] + x[1])]))
        self.assertLess(gf.divergence_residual(gf.curl(A)), 1e-12)

    def test_curl_needs_three_dimensions(self):
        with self.assertRaises(GridMismatchError):
            gf.curl(gf.zeros_vector(self.grid2))

    def test_shear_rate_is_symmetric(self):
        u = gf.sample(self.grid2, lambda x: np.array([np.sin(x[1] * math.pi / 4), np.zeros_like(x[0])]))
        self.assertTrue(gf.shear_rate(u).is_symmetric())

    def test_laplacian_matches_div_grad(self):
        f = gf.sample(self.grid2, lambda x: np.exp(-x[0] ** 2 - x[1] ** 2))
        assert_allclose(gf.laplacian(f).values, gf.divergence(gf.gradient(f)).values, atol=1e-12)

    def test_lp_norm(self):
        grid = gf.make_grid(1, 16, 1.0)
        field = gf.ScalarField(grid, np.full(grid.shape, 3.0))
        self.assertAlmostEqual(gf.lp_norm(field, 2), 3.0 * math.sqrt(2.0), places=12)
        with self.assertRaises(ParameterDomainError):
            gf.lp_norm(field, 0.5)

    def test_fields_on_different_grids_are_rejected(self):
        rho = gf.zeros_scalar(self.grid2)
        with self.assertRaises(GridMismatchError):
            gf.FluidState(rho=rho, u=gf.zeros_vector(gf.make_grid(2, 16, 4.0)))
        with self.assertRaises(ParameterDomainError):
            gf.FluidState(rho=gf.ScalarField(self.grid2, -np.ones(self.grid2.shape)), u=gf.zeros_vector(self.grid2))


class FunctionalTests(SimpleTestCase):

    def setUp(self):
        self.grid = gf.make_grid(2, 64, 6.0)
        self.params = ExponentParams(n=2, gamma=1.4, A=2.0, q=1.5)

    def test_constant_density_internal_energy(self):
        rho = gf.ScalarField(self.grid, np.full(self.grid.shape, 0.7))
        state = gf.FluidState(rho=rho, u=gf.zeros_vector(self.grid))
        breakdown = gf.functionals(state, self.params)
        expected = 2.0 * 0.7 ** 1.4 * self.grid.volume / 0.4
        self.assertAlmostEqual(breakdown.E_i, expected, delta=1e-12 * expected)
        self.assertEqual(breakdown.E_k, 0.0)
        self.assertEqual(breakdown.D_q, 0.0)

    def test_uniform_velocity_momentum_and_kinetic_energy(self):
        rho = gf.sample(self.grid, lambda x: np.exp(-x[0] ** 2 - x[1] ** 2))
        u = gf.VectorField(self.grid, np.stack([np.ones(self.grid.shape), np.zeros(self.grid.shape)]))
        breakdown = gf.functionals(gf.FluidState(rho=rho, u=u), self.params)
        self.assertAlmostEqual(breakdown.P[0], breakdown.m, delta=1e-12)
        self.assertEqual(breakdown.P[1], 0.0)
        self.assertAlmostEqual(breakdown.E_k, breakdown.m / 2.0, delta=1e-12)
        self.assertAlmostEqual(breakdown.m, math.pi, delta=1e-6)

    def test_mass_is_additive_over_disjoint_bumps(self):
        left = gf.sample(self.grid, lambda x: np.where((x[0] + 3) ** 2 + x[1] ** 2 < 1, 1.0, 0.0))
        right = gf.sample(self.grid, lambda x: np.where((x[0] - 3) ** 2 + x[1] ** 2 < 1, 2.0, 0.0))
        zero = gf.zeros_vector(self.grid)
        total = gf.functionals(gf.FluidState(gf.ScalarField(self.grid, left.values + right.values), zero), self.params)
        parts = [gf.functionals(gf.FluidState(f, zero), self.params) for f in (left, right)]
        self.assertAlmostEqual(total.m, parts[0].m + parts[1].m, delta=1e-10 * total.m)
        self.assertAlmostEqual(total.E_i, parts[0].E_i + parts[1].E_i, delta=1e-10 * total.E_i)

    def test_support_radius_of_gaussian(self):
        rho = gf.sample(self.grid, lambda x: np.exp(-x[0] ** 2 - x[1] ** 2))
        state = gf.FluidState(rho=rho, u=gf.zeros_vector(self.grid))
        h = self.grid.spacing[0]
        self.assertAlmostEqual(gf.support_radius(state, 1e-3), math.sqrt(math.log(1000.0)), delta=2 * h)

    def test_support_radius_of_point_mass(self):
        grid = gf.make_grid(2, 16, 1.0)
        values = np.zeros(grid.shape)
        values[8, 8] = 1.0
        state = gf.FluidState(rho=gf.ScalarField(grid, values), u=gf.zeros_vector(grid))
        self.assertAlmostEqual(gf.support_radius(state, 0.5), grid.spacing[0] / math.sqrt(2.0), places=12)
