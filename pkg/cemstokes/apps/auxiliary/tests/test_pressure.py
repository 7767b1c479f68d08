import numpy as np

from cemstokes.apps.auxiliary.exceptions import EmptyConstraintSpace
from cemstokes.apps.auxiliary.spaces import (
    _block_forms, build_QH, constraint_dimension, constraint_matrix,
    local_pressure_eigenbasis
)
from cemstokes.apps.fem.assembly import assemble_scalar_forms, block_pressure_numbering
from cemstokes.apps.linalg.solvers import null_space_basis

from .base import BaseTest


class PressureSpaceTest(BaseTest):
    def setUp(self):
        super(PressureSpaceTest, self).setUp()
        self.QH = build_QH(self.aux)
        self.numbering = block_pressure_numbering(self.grid)

    def test_dimension_matches_the_auxiliary_space(self):
        self.assertEqual(self.QH.n, self.aux.n_aux)
        self.assertEqual(self.QH.basis.shape, (self.QH.n_broken, self.aux.n_aux))

    def test_modes_have_zero_block_mean(self):
        for i, block in enumerate(self.QH.blocks):
            _, mean = _block_forms(self.aux, i, self.numbering)
            np.testing.assert_allclose(mean @ block.vectors, 0.0, atol=1e-10)

    def test_modes_are_orthonormal_and_ascending(self):
        for i, block in enumerate(self.QH.blocks):
            _, S, vertices = assemble_scalar_forms(self.space, self.grid, i)
            np.testing.assert_array_equal(vertices, block.vertices)
            np.testing.assert_allclose(block.vectors.T @ S @ block.vectors,
                                       np.eye(self.ell), atol=1e-10)
            self.assertTrue(np.all(np.diff(block.values) >= 0))
            self.assertGreaterEqual(block.values[0], -1e-10)

    def test_block_diagonal_gram(self):
        # disjoint supports on the broken numbering
        gram = (self.QH.basis.T @ self.QH.basis).toarray()
        offsets = self.QH.coordinate_offsets
        for i in range(self.grid.N):
            for k in range(self.grid.N):
                if i != k:
                    block = gram[offsets[i]:offsets[i + 1], offsets[k]:offsets[k + 1]]
                    self.assertEqual(np.abs(block).max(), 0.0)

    def test_relaxed_modes_minimize_the_constraint_residual(self):
        block = self.QH.blocks[self.interior]
        B, mean = _block_forms(self.aux, self.interior, self.numbering)
        C = constraint_matrix(self.aux, self.interior, B)
        Z = null_space_basis(mean[None, :])
        singular = np.sort(np.linalg.svd(C @ Z, compute_uv=False))

        # every mode lies in the span of the 2 * ell weakest directions
        count = 2 * self.ell
        for vector in block.vectors.T:
            ratio = np.linalg.norm(C @ vector) / np.linalg.norm(vector)
            self.assertLessEqual(ratio, singular[count - 1] * (1 + 1e-8))

    def test_rank_oracles_agree(self):
        for i in range(self.grid.N):
            svd_dimension, qr_dimension = constraint_dimension(self.aux, i, self.numbering)
            self.assertEqual(svd_dimension, qr_dimension)
            self.assertEqual(self.QH.blocks[i].strict_dimension, svd_dimension)

    def test_strict_space_too_small(self):
        i = self.interior
        dimension = self.QH.blocks[i].strict_dimension
        with self.assertRaises(EmptyConstraintSpace) as context:
            local_pressure_eigenbasis(self.aux, i, dimension + 1, self.numbering, mode='strict')
        self.assertEqual(context.exception.context['dimension'], dimension)

    def test_global_scope_gives_the_same_constraints(self):
        i = self.interior
        B, mean = _block_forms(self.aux, i, self.numbering)
        Z = null_space_basis(mean[None, :])

        patch = np.linalg.svd(constraint_matrix(self.aux, i, B, 'patch') @ Z, compute_uv=False)
        full = np.linalg.svd(constraint_matrix(self.aux, i, B, 'global') @ Z, compute_uv=False)
        np.testing.assert_allclose(full, patch, rtol=1e-10, atol=1e-12 * patch.max())

    def test_unknown_modes(self):
        with self.assertRaises(ValueError):
            local_pressure_eigenbasis(self.aux, 0, self.ell, self.numbering, mode='loose')
        with self.assertRaises(ValueError):
            constraint_matrix(self.aux, 0, _block_forms(self.aux, 0, self.numbering)[0], 'wide')

    def test_field_lives_on_the_broken_numbering(self):
        coefficients = self.random.randn(self.QH.n)
        self.assertEqual(self.QH.field(coefficients).shape, (self.QH.n_broken,))
