import numpy as np
from django.test import tag

from cemstokes.apps.fem.assembly import (
    assemble_divergence, assemble_load, assemble_pressure_mass,
    assemble_scalar_forms, assemble_stiffness, assemble_weighted_mass,
    block_pressure_numbering, build_pou, build_spaces, cell_energies, energy_error_exact,
    inf_sup_constant, pressure_mean_row, region_norms
)
from cemstokes.apps.mesh.generators import build_coarse_grid, build_fine_grid

from .base import BaseTest


class BuildSpacesTest(BaseTest):
    def test_unperforated_node_counts(self):
        space = build_spaces(build_fine_grid(4))

        self.assertEqual(space.n_nodes, 81)
        self.assertEqual(space.n_p, 25)
        # the 32 nodes of the outer ring, both components
        self.assertEqual(space.dirichlet.sum(), 64)
        self.assertEqual(space.n_u, space.n_v - 64)

    def test_perforated_cell_adds_its_rim(self):
        space = build_spaces(build_fine_grid(8, self.hole))

        # the center node of the removed cell does not exist
        self.assertEqual(space.n_nodes, 17 * 17 - 1)
        self.assertEqual(space.dirichlet.sum(), 2 * (64 + 8))

    def test_free_numbering_is_consistent(self):
        np.testing.assert_array_equal(
            self.space.free_index[self.space.free], np.arange(self.space.n_u))
        self.assertTrue(np.all(self.space.free_index[self.space.dirichlet] == -1))


class StiffnessTest(BaseTest):
    def test_constants_are_in_the_null_space(self):
        A = assemble_stiffness(self.space, free_only=False)
        np.testing.assert_allclose(A @ np.ones(self.space.n_v), 0.0, atol=1e-12)

    def test_symmetric(self):
        A = assemble_stiffness(self.space)
        self.assertLess(abs(A - A.T).max(), 1e-14)

    def test_positive_definite_on_free_dofs(self):
        A = assemble_stiffness(build_spaces(build_fine_grid(4))).toarray()
        self.assertGreater(np.linalg.eigvalsh(A).min(), 0.0)

    def test_higher_quadrature_changes_nothing(self):
        A = assemble_stiffness(self.space)
        A5 = assemble_stiffness(build_spaces(self.mesh, quadrature_order=5))
        self.assertLess(abs(A - A5).max(), 1e-12 * abs(A).max())


class DivergenceTest(BaseTest):
    def test_zero_field(self):
        B = assemble_divergence(self.space)
        np.testing.assert_array_equal(B @ np.zeros(self.space.n_u), 0.0)

    def test_solenoidal_field_is_orthogonal_to_every_pressure(self):
        B = assemble_divergence(self.space, free_only=False)
        u = self.space.interpolate(lambda x, y: (x, -y))
        np.testing.assert_allclose(B @ u, 0.0, atol=1e-13)

    def test_total_divergence_is_the_area(self):
        mesh = build_fine_grid(8, self.hole)
        space = build_spaces(mesh)
        B = assemble_divergence(space, free_only=False)
        u = space.interpolate(lambda x, y: (x, np.zeros_like(x)))
        self.assertAlmostEqual((B @ u).sum(), mesh.area, places=12)

    def test_shape(self):
        B = assemble_divergence(self.space)
        self.assertEqual(B.shape, (self.space.n_p, self.space.n_u))


class PartitionOfUnityTest(BaseTest):
    def test_hats_sum_to_one_and_stay_in_range(self):
        chi = self.pou.chi.toarray()
        np.testing.assert_allclose(chi.sum(axis=0), 1.0, atol=1e-14)
        self.assertGreaterEqual(chi.min(), 0.0)
        self.assertLessEqual(chi.max(), 1.0 + 1e-14)

    def test_hats_are_nodal_on_coarse_vertices(self):
        nodes = self.space.mesh.node_coords
        chi = self.pou.chi.toarray()
        for j, vertex in enumerate(self.grid.vertices):
            node = np.flatnonzero(np.all(np.isclose(nodes, vertex), axis=1))[0]
            expected = np.zeros(len(self.grid.vertices))
            expected[j] = 1.0
            np.testing.assert_allclose(chi[:, node], expected, atol=1e-14)

    def test_kappa_from_closed_form_gradients(self):
        # H = 1/2: kappa = 2((1-eta)^2 + eta^2 + (1-xi)^2 + xi^2) / H^2
        self.assertAlmostEqual(self.pou.kappa_at([0.5, 0.5])[0], 16.0, places=12)
        self.assertAlmostEqual(self.pou.kappa_at([0.3, 0.2])[0], 8.32, places=12)

    def test_kappa_scales_like_inverse_coarse_size_squared(self):
        mesh = build_fine_grid(16)
        space = build_spaces(mesh)
        scaled = []
        for Nx in (2, 4, 8):
            pou = build_pou(build_coarse_grid(mesh, Nx), space)
            scaled.append(pou.kappa.max() * pou.H ** 2)
        self.assertLess(max(scaled) / min(scaled), 2.0)
        self.assertGreaterEqual(min(scaled), 0.0)


class WeightedMassTest(BaseTest):
    def test_symmetric_semidefinite(self):
        S = assemble_weighted_mass(self.space, self.pou)
        self.assertLess(abs(S - S.T).max(), 1e-13)
        u = np.random.RandomState(0).randn(self.space.n_u)
        self.assertGreaterEqual(u @ S @ u, 0.0)

    def test_zero_field(self):
        self.assertEqual(region_norms(self.space, self.pou, np.zeros(self.space.n_v)),
                         (0.0, 0.0))

    def test_constant_field_on_one_block(self):
        # int over an unperforated block of kappa is 8/3 for every H
        u = self.constant_field(3.0, 0.0)
        energy, mass = region_norms(self.space, self.pou, u, region={1})
        self.assertEqual(energy, 0.0)
        self.assertAlmostEqual(mass ** 2, 9.0 * 8 / 3, places=10)

        S = assemble_weighted_mass(self.space, self.pou, free_only=False)
        self.assertAlmostEqual(u @ S @ u, 4 * 9.0 * 8 / 3, places=9)

    def test_small_gradients_are_resolved(self):
        u = self.space.interpolate(lambda x, y: (3.0 + 1e-6 * x, np.zeros_like(x)))
        energies = cell_energies(self.space, u)
        # |grad ux|^2 = 1e-12 integrated over a cell of area h^2
        np.testing.assert_allclose(energies, 1e-12 * self.space.mesh.h ** 2, rtol=1e-6)

    def test_region_norms_add_over_disjoint_regions(self):
        u = self.space.interpolate(lambda x, y: (np.sin(3 * x) * y, x * x))
        first = region_norms(self.space, self.pou, u, region={0, 1})
        second = region_norms(self.space, self.pou, u, region={2, 3})
        total = region_norms(self.space, self.pou, u)
        self.assertAlmostEqual(first[0] ** 2 + second[0] ** 2, total[0] ** 2, places=10)
        self.assertAlmostEqual(first[1] ** 2 + second[1] ** 2, total[1] ** 2, places=10)

    def test_region_norms_match_global_matrices(self):
        u = self.space.interpolate(lambda x, y: (x * (1 - x) * y, np.cos(x + y)))
        A = assemble_stiffness(self.space, free_only=False)
        S = assemble_weighted_mass(self.space, self.pou, free_only=False)
        energy, mass = region_norms(self.space, self.pou, u)
        self.assertAlmostEqual(energy ** 2, u @ A @ u, places=10)
        self.assertAlmostEqual(mass ** 2, u @ S @ u, places=10)


class LoadTest(BaseTest):
    def test_zero_force(self):
        load = assemble_load(self.space, lambda x, y: (0.0, 0.0))
        np.testing.assert_array_equal(load, 0.0)

    def test_horizontal_force(self):
        mesh = build_fine_grid(8, self.hole)
        space = build_spaces(mesh)
        load = assemble_load(space, lambda x, y: (1.0, 0.0), free_only=False)

        np.testing.assert_array_equal(load[space.n_nodes:], 0.0)
        self.assertAlmostEqual(load[:space.n_nodes].sum(), mesh.area, places=13)


class PressureFormsTest(BaseTest):
    def test_mean_row_integrates_constants(self):
        mean = pressure_mean_row(self.space)
        self.assertAlmostEqual(mean.sum(), 1.0, places=14)

        M = assemble_pressure_mass(self.space)
        np.testing.assert_allclose(M @ np.ones(self.space.n_p), mean, atol=1e-15)

    def test_scalar_forms_on_a_block(self):
        A, S, vertices = assemble_scalar_forms(self.space, self.grid, 0)

        self.assertEqual(len(vertices), 25)
        np.testing.assert_allclose(A @ np.ones(25), 0.0, atol=1e-13)
        np.testing.assert_allclose(A, A.T, atol=1e-14)
        self.assertAlmostEqual(np.ones(25) @ S @ np.ones(25), 8 / 3, places=12)

    def test_block_numbering_gives_every_block_its_own_copy(self):
        cell_dofs, offsets, vertices = block_pressure_numbering(self.grid)

        self.assertEqual(offsets[-1], 4 * 25)
        for i, cells in enumerate(self.grid.elements):
            local = cell_dofs[cells]
            self.assertTrue(np.all((local >= offsets[i]) & (local < offsets[i + 1])))
            np.testing.assert_array_equal(
                vertices[i][local - offsets[i]], self.mesh.cell_vertices[cells])


class DiagnosticsTest(BaseTest):
    def test_energy_error_of_a_representable_field_vanishes(self):
        u = self.space.interpolate(lambda x, y: (x * x, x * y))

        def gradient(x, y):
            return np.stack((np.stack((2 * x, 0 * x), axis=-1),
                             np.stack((y, x), axis=-1)), axis=-2)

        self.assertLess(energy_error_exact(self.space, u, gradient), 1e-12)

    def test_inf_sup_constant_is_mesh_independent(self):
        coarse = inf_sup_constant(build_spaces(build_fine_grid(8)))
        fine = inf_sup_constant(build_spaces(build_fine_grid(16)))

        self.assertGreater(coarse, 0.1)
        self.assertLess(abs(coarse - fine), 0.2 * coarse)

    @tag('slow')
    def test_inf_sup_constant_holds_on_a_finer_grid(self):
        medium = inf_sup_constant(build_spaces(build_fine_grid(16)))
        fine = inf_sup_constant(build_spaces(build_fine_grid(32)))

        self.assertGreater(fine, 0.1)
        self.assertLess(abs(medium - fine), 0.15 * medium)
