import numpy as np
from django.test import SimpleTestCase

from cemstokes.apps.auxiliary.spaces import build_aux_space, build_QH
from cemstokes.apps.basis.cem import compute_basis_table
from cemstokes.apps.experiments.forcing import manufactured
from cemstokes.apps.fem.assembly import FineOperators, build_pou, build_spaces
from cemstokes.apps.mesh.generators import build_coarse_grid, build_fine_grid
from cemstokes.apps.solver.reference import solve_reference


class BaseTest(SimpleTestCase):
    """ BaseTest: reference and one-layer multiscale setting on the 8x8 grid
    with 4x4 coarse blocks and three modes per block
    """
    ell = 3
    nx = 8
    Nx = 4
    k = 1

    def setUp(self):
        self.random = np.random.RandomState(3)
        self.forcing = manufactured()
        self.mesh = build_fine_grid(self.nx)
        self.space = build_spaces(self.mesh)
        self.grid = build_coarse_grid(self.mesh, self.Nx)
        self.pou = build_pou(self.grid, self.space)
        self.operators = FineOperators(self.space)
        self.aux = build_aux_space(self.space, self.pou, self.ell)
        self.QH = build_QH(self.aux)
        self.table = compute_basis_table(self.aux, self.k, operators=self.operators)
        self.reference = solve_reference(self.space, self.forcing.f, self.operators)

    def a_norm(self, u):
        return float(np.sqrt(max(u @ (self.operators.A @ u), 0.0)))
