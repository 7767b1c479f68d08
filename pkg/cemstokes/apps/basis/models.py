from dataclasses import dataclass
from functools import cached_property
from typing import Any, Optional

import numpy as np
from scipy import sparse


@dataclass(frozen=True, eq=False)
class CemBasisFunction:
    """
    One multiscale basis function psi_j^i with its divergence multiplier.

    `values` are the velocity values on the free DOFs `dofs` of the region
    interior, `multiplier` the values of xi on the pressure nodes `vertices`
    of the region. `k` is None for the global basis function. Modes are
    numbered from 0.
    """
    i: int
    j: int
    k: Optional[int]
    region: frozenset
    dofs: np.ndarray
    values: np.ndarray
    vertices: np.ndarray
    multiplier: np.ndarray

    @property
    def is_global(self):
        return self.k is None

    def full(self, n_u):
        vector = np.zeros(n_u)
        vector[self.dofs] = self.values
        return vector


@dataclass(frozen=True, eq=False)
class BasisTable:
    """ all basis functions of one oversampling setting, block by block """
    aux: Any
    k: Any
    functions: tuple

    def __len__(self):
        return len(self.functions)

    @property
    def n_ms(self):
        return len(self.functions)

    @cached_property
    def matrix(self):
        """ sparse (n_u, n_ms) with one basis function per column """
        rows = np.concatenate([psi.dofs for psi in self.functions])
        cols = np.concatenate([np.full(len(psi.dofs), column)
                               for column, psi in enumerate(self.functions)])
        values = np.concatenate([psi.values for psi in self.functions])
        return sparse.csc_matrix((values, (rows, cols)),
                                 shape=(self.aux.space.n_u, self.n_ms))

    def get(self, i, j):
        return self.functions[int(self.aux.offsets[i]) + j]

    def field(self, coefficients):
        return self.matrix @ coefficients
