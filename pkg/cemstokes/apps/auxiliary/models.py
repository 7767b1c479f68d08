from dataclasses import dataclass
from functools import cached_property
from typing import Any

import numpy as np
from scipy import sparse


@dataclass(frozen=True, eq=False)
class LocalEigenbasis:
    """
    Velocity eigenpairs of one coarse block.

    `dofs` are the free velocity DOFs touched by the block's cells, in
    increasing order; `A` and `S` are the block's stiffness and weighted
    mass on those DOFs. `values` holds ell + n_extra eigenvalues, `vectors`
    the first ell S-orthonormal eigenvectors in local coordinates.
    """
    i: int
    dofs: np.ndarray
    A: Any
    S: Any
    values: np.ndarray
    vectors: np.ndarray

    @property
    def ell(self):
        return self.vectors.shape[1]

    @property
    def included(self):
        return self.values[:self.ell]

    @property
    def excluded(self):
        """ lambda_{ell + 1}, the first eigenvalue left out """
        return float(self.values[self.ell])

    def coefficients(self, local):
        """ s_i(v, phi_j) for local vectors v (one per column) """
        return self.vectors.T @ (self.S @ local)


@dataclass(frozen=True, eq=False)
class AuxSpace:
    """
    The auxiliary velocity space: the direct sum of the block eigenspaces.

    Auxiliary coordinates are numbered block by block, `offsets[i]` being
    the first coordinate of block i. Since every block basis is
    s_i-orthonormal, s(pi u, pi v) is the Euclidean product of the
    coordinates.
    """
    space: Any
    pou: Any
    blocks: tuple

    @property
    def grid(self):
        return self.pou.grid

    @property
    def ell(self):
        return tuple(block.ell for block in self.blocks)

    @cached_property
    def offsets(self):
        return np.concatenate(([0], np.cumsum(self.ell))).astype(np.int64)

    @property
    def n_aux(self):
        return int(self.offsets[-1])

    @property
    def Lambda(self):
        """ smallest excluded eigenvalue over all blocks """
        return min(block.excluded for block in self.blocks)

    @property
    def Gamma(self):
        """ largest included eigenvalue over all blocks """
        return max(float(block.included.max()) for block in self.blocks)

    def coordinates(self, i):
        return np.arange(self.offsets[i], self.offsets[i + 1])

    @cached_property
    def projector(self):
        """ sparse (n_aux, n_u) map from free velocity values to pi-coefficients """
        rows, cols, values = [], [], []
        for block in self.blocks:
            weighted = (block.S @ block.vectors).T
            local_rows = self.coordinates(block.i)
            rows.append(np.repeat(local_rows, len(block.dofs)))
            cols.append(np.tile(block.dofs, block.ell))
            values.append(weighted.ravel())
        matrix = sparse.coo_matrix(
            (np.concatenate(values), (np.concatenate(rows), np.concatenate(cols))),
            shape=(self.n_aux, self.space.n_u)).tocsr()
        matrix.eliminate_zeros()
        return matrix

    @cached_property
    def embedding(self):
        """ sparse (n_u, n_aux): every phi_j^i as a continuous fine field with
        its nodal values on K_i and zero elsewhere """
        rows, cols, values = [], [], []
        for block in self.blocks:
            rows.append(np.repeat(block.dofs, block.ell))
            cols.append(np.tile(self.coordinates(block.i), len(block.dofs)))
            values.append(block.vectors.ravel())
        return sparse.coo_matrix(
            (np.concatenate(values), (np.concatenate(rows), np.concatenate(cols))),
            shape=(self.space.n_u, self.n_aux)).tocsr()

    def project(self, v):
        """ pi-coefficients s_i(v, phi_j^i) of free velocity values """
        return self.projector @ v

    def broken_field(self, coefficients):
        """ pi(v) as the tuple of block-local vectors sum_j c_j^i phi_j^i """
        return tuple(block.vectors @ coefficients[self.coordinates(block.i)]
                     for block in self.blocks)

    def broken_coefficients(self, locals_):
        """ pi-coefficients of a broken field given block by block """
        return np.concatenate([block.coefficients(local)
                               for block, local in zip(self.blocks, locals_)])

    def broken_norms(self, locals_):
        """ (a-seminorm, s-norm) of a broken field, summed block by block """
        energy = sum(float(local @ (block.A @ local))
                     for block, local in zip(self.blocks, locals_))
        mass = sum(float(local @ (block.S @ local))
                   for block, local in zip(self.blocks, locals_))
        return np.sqrt(max(energy, 0.0)), np.sqrt(max(mass, 0.0))


@dataclass(frozen=True, eq=False)
class LocalPressureBasis:
    """
    Pressure eigenpairs of one block in the local order of `vertices`.

    `strict_dimension` is the dimension of the exactly constrained space;
    `violation` the largest relative constraint residual of the returned
    modes (zero up to roundoff in the strict construction).
    """
    i: int
    vertices: np.ndarray
    values: np.ndarray
    vectors: np.ndarray
    strict_dimension: int
    violation: float
    mode: str

    @property
    def ell(self):
        return self.vectors.shape[1]


@dataclass(frozen=True, eq=False)
class PressureAuxSpace:
    """
    The coarse pressure space Q_H, stored on the broken pressure numbering
    where every block owns a copy of its bilinear nodes.
    """
    grid: Any
    blocks: tuple
    cell_dofs: np.ndarray
    offsets: np.ndarray

    @property
    def n(self):
        return sum(block.ell for block in self.blocks)

    @property
    def n_broken(self):
        return int(self.offsets[-1])

    @cached_property
    def basis(self):
        """ sparse (n_broken, n) block diagonal matrix of the q_j^i """
        return sparse.block_diag([block.vectors for block in self.blocks],
                                 format='csr')

    @cached_property
    def coordinate_offsets(self):
        return np.concatenate(([0], np.cumsum([block.ell for block in self.blocks])))

    def field(self, coefficients):
        return self.basis @ coefficients
