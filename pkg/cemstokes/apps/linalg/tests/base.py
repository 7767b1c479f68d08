import numpy as np
from django.test import SimpleTestCase


class BaseTest(SimpleTestCase):
    """ BaseTest: seeded random matrices for the solver tests """

    def setUp(self):
        self.random = np.random.RandomState(20)

    def spd(self, n):
        M = self.random.randn(n, n)
        return M.T @ M + np.eye(n)

    def full_rank(self, rows, columns):
        return self.random.randn(rows, columns)
