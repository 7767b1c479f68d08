import numpy as np
from django.test import SimpleTestCase

from cemstokes.apps.auxiliary.spaces import build_aux_space
from cemstokes.apps.fem.assembly import build_pou, build_spaces
from cemstokes.apps.mesh.generators import build_coarse_grid, build_fine_grid


class BaseTest(SimpleTestCase):
    """ BaseTest: three modes per block on an unperforated 8x8 grid split
    into 4x4 coarse blocks of 2x2 cells
    """
    ell = 3

    def setUp(self):
        self.random = np.random.RandomState(7)
        self.mesh = build_fine_grid(8)
        self.space = build_spaces(self.mesh)
        self.grid = build_coarse_grid(self.mesh, 4)
        self.pou = build_pou(self.grid, self.space)
        self.aux = build_aux_space(self.space, self.pou, self.ell)

        # coarse positions (1, 1) and (1, 0)
        self.interior = 5
        self.bottom = 1
