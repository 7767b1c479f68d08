import numpy as np
from django.test import SimpleTestCase, tag
from scipy import linalg

from cemstokes.apps.auxiliary.spaces import block_dofs, build_aux_space
from cemstokes.apps.basis.cem import (
    compute_basis_table, compute_global_basis, compute_ms_basis, decay_factor_bound,
    decay_profile, divergence_residual, localization_error, region_components,
    region_dofs
)
from cemstokes.apps.fem.assembly import build_pou, build_spaces
from cemstokes.apps.mesh.generators import (
    build_coarse_grid, build_fine_grid, oversample_region
)
from cemstokes.apps.mesh.models import PerforationSpec, Rect

from .base import BaseTest


class RegionTest(BaseTest):
    def test_region_dofs_stay_off_the_region_boundary(self):
        region = oversample_region(self.grid, self.interior, 1)
        dofs = region_dofs(self.space, self.grid, region)
        # 6x6 cells touching the left and bottom side: 11 free nodes per axis
        self.assertEqual(len(dofs), 2 * 11 * 11)

    def test_whole_domain_keeps_every_free_dof(self):
        dofs = region_dofs(self.space, self.grid, range(self.grid.N))
        np.testing.assert_array_equal(dofs, np.arange(self.space.n_u))

    def test_corner_contact_counts_as_connected(self):
        self.assertEqual(len(region_components(self.grid, {0, 5})), 1)
        self.assertEqual(len(region_components(self.grid, {0, 2})), 2)

    def test_components_split_by_a_perforation(self):
        # column 7 of a 16x16 grid cut from the bottom up to row 11
        spec = PerforationSpec(shapes=(Rect(0.45, 0.01, 0.49, 0.76),))
        grid = build_coarse_grid(build_fine_grid(16, spec), 2)
        self.assertEqual(len(region_components(grid, {0})), 1)
        self.assertEqual(len(region_components(grid, {0, 1})), 2)
        self.assertEqual(len(region_components(grid, range(grid.N))), 1)

    def test_rhs_lives_on_the_block(self):
        columns = np.unique(self.aux.projector[self.aux.coordinates(self.interior)].nonzero()[1])
        dofs = block_dofs(self.space, self.grid, self.interior)
        self.assertTrue(set(columns) <= set(dofs))


class MsBasisTest(BaseTest):
    def setUp(self):
        super(MsBasisTest, self).setUp()
        self.psi = compute_ms_basis(self.aux, self.interior, 0, 1, self.operators)

    def test_metadata(self):
        self.assertEqual((self.psi.i, self.psi.j, self.psi.k), (self.interior, 0, 1))
        self.assertFalse(self.psi.is_global)
        self.assertEqual(self.psi.region, oversample_region(self.grid, self.interior, 1))

    def test_divergence_free(self):
        self.assertLessEqual(divergence_residual(self.aux, self.psi, self.operators), 1e-9)
        vector = self.psi.full(self.space.n_u)
        residual = self.operators.B @ vector
        self.assertLessEqual(np.abs(residual).max(), 1e-9 * np.sqrt(self.energy(vector)))

    def test_minimizes_the_constrained_energy(self):
        n_u = self.space.n_u
        dofs = self.psi.dofs
        B = self.operators.B[self.psi.vertices][:, dofs].toarray()
        kernel = linalg.null_space(B)
        self.assertGreater(kernel.shape[1], 0)

        target = np.zeros(self.aux.n_aux)
        target[self.aux.coordinates(self.interior)[0]] = 1.0

        def objective(w):
            return float(w @ (self.operators.A @ w)
                         + np.sum((self.aux.project(w) - target) ** 2))

        vector = self.psi.full(n_u)
        best = objective(vector)
        for _ in range(10):
            delta = np.zeros(n_u)
            delta[dofs] = 0.1 * kernel @ self.random.randn(kernel.shape[1])
            self.assertGreaterEqual(objective(vector + delta), best - 1e-12)

    def test_saturated_basis_is_the_global_one(self):
        psi = compute_ms_basis(self.aux, self.interior, 1, self.saturated, self.operators)
        psi_global = compute_global_basis(self.aux, self.interior, 1, self.operators)
        energy, mass = localization_error(self.aux, psi_global, psi, self.operators)
        self.assertLessEqual(energy, 1e-9)
        self.assertLessEqual(mass, 1e-9)

    def test_localization_error_does_not_grow_with_k(self):
        psi_global = compute_global_basis(self.aux, self.interior, 2, self.operators)
        combined = []
        for k in range(self.saturated + 1):
            psi = compute_ms_basis(self.aux, self.interior, 2, k, self.operators)
            energy, mass = localization_error(self.aux, psi_global, psi, self.operators)
            self.assertGreaterEqual(energy, 0.0)
            combined.append(np.hypot(energy, mass))

        self.assertTrue(np.all(np.diff(combined) <= 1e-10))
        self.assertGreater(combined[0], combined[-1])
        self.assertLessEqual(combined[-1], 1e-9)


class GlobalBasisTest(BaseTest):
    def setUp(self):
        super(GlobalBasisTest, self).setUp()
        self.psi = compute_global_basis(self.aux, self.interior, 0, self.operators)

    def test_variational_identity(self):
        vector = self.psi.full(self.space.n_u)
        left = self.energy(vector)
        right = self.aux.project(vector)[self.aux.coordinates(self.interior)[0]]
        self.assertAlmostEqual(left, right, delta=1e-9 * abs(right))
        self.assertTrue(self.psi.is_global)

    def test_decay_profile(self):
        profile = decay_profile(self.aux, self.psi, self.interior)
        layers, values = zip(*profile)
        self.assertEqual(layers, (0, 1, 2))
        self.assertTrue(np.all(np.diff(values) <= 1e-14))
        self.assertLessEqual(values[0], self.energy(self.psi.full(self.space.n_u)) + 1e-14)
        self.assertEqual(values[-1], 0.0)

    def test_decay_on_a_finer_coarse_grid(self):
        mesh = build_fine_grid(16)
        space = build_spaces(mesh)
        grid = build_coarse_grid(mesh, 8)
        aux = build_aux_space(space, build_pou(grid, space), 3)

        # coarse position (3, 3)
        psi = compute_global_basis(aux, 27, 0)
        values = [value for _, value in decay_profile(aux, psi, 27)]
        self.assertTrue(np.all(np.diff(values) <= 1e-14))
        self.assertLess(values[2], values[1])
        self.assertLess(values[3], values[2])

    def test_decay_factor_bound(self):
        Lambda = 0.5
        self.assertAlmostEqual(decay_factor_bound(Lambda, 1), 9.0)
        bounds = [decay_factor_bound(Lambda, k) for k in range(1, 6)]
        self.assertTrue(np.all(np.diff(bounds) < 0))
        ratio = bounds[1] / bounds[0]
        self.assertAlmostEqual(ratio, 1 / (1 + 18 ** -0.5))


class BasisTableTest(BaseTest):
    def test_table_matches_single_solves(self):
        table = compute_basis_table(self.aux, 1)
        self.assertEqual(len(table), 16 * self.ell)
        self.assertEqual(table.matrix.shape, (self.space.n_u, 48))

        psi = compute_ms_basis(self.aux, self.interior, 2, 1)
        np.testing.assert_allclose(table.get(self.interior, 2).values, psi.values, atol=1e-12)
        np.testing.assert_allclose(table.matrix[:, 17].toarray().ravel(),
                                   psi.full(self.space.n_u), atol=1e-12)

    def test_threads_do_not_change_the_table(self):
        serial = compute_basis_table(self.aux, 1, threads=1)
        threaded = compute_basis_table(self.aux, 1, threads=3)
        np.testing.assert_array_equal(serial.matrix.toarray(), threaded.matrix.toarray())

    def test_global_table(self):
        table = compute_basis_table(self.aux, None)
        self.assertTrue(all(psi.is_global for psi in table.functions))
        psi = compute_global_basis(self.aux, 3, 1)
        np.testing.assert_allclose(table.get(3, 1).values, psi.values, atol=1e-12)

    def test_per_block_layers(self):
        layers = [0] * 8 + [1] * 8
        table = compute_basis_table(self.aux, layers)
        self.assertEqual(table.get(0, 0).k, 0)
        self.assertEqual(table.get(15, 0).k, 1)

        with self.assertRaises(ValueError):
            compute_basis_table(self.aux, [1, 2])

    def test_field_is_the_column_sum(self):
        table = compute_basis_table(self.aux, 1)
        coefficients = self.random.randn(table.n_ms)
        expected = sum(c * psi.full(self.space.n_u)
                       for c, psi in zip(coefficients, table.functions))
        np.testing.assert_allclose(table.field(coefficients), expected, atol=1e-12)


@tag('slow')
class ExponentialDecayTest(SimpleTestCase):
    def test_factor_two_per_layer(self):
        mesh = build_fine_grid(32)
        space = build_spaces(mesh)
        grid = build_coarse_grid(mesh, 8)
        aux = build_aux_space(space, build_pou(grid, space), 3)
        table = compute_basis_table(aux, None)

        # coarse positions (3, 3), (4, 3) and (3, 4)
        for i in (27, 28, 35):
            for j in range(3):
                values = [value for _, value in decay_profile(aux, table.get(i, j), i)]
                for m in (1, 2, 3):
                    self.assertGreaterEqual(values[m - 1], 2 * values[m], (i, j, m))
                self.assertGreater(values[3], 0.0)
