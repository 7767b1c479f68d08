from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .elements import reference_element

# local Q2 nodes on each side of the reference cell
SIDE_NODES = {
    'bottom': (0, 1, 2),
    'top': (6, 7, 8),
    'left': (0, 3, 6),
    'right': (2, 5, 8),
}


@dataclass(frozen=True, eq=False)
class FESpace:
    """
    Taylor-Hood pair on the active cells: biquadratic velocity, bilinear
    pressure.

    Velocity DOFs are component-major: DOF c * n_nodes + node for component
    c in (0, 1), nodes in lexicographic lattice order. `dirichlet` marks the
    velocity DOFs on the boundary of the active region (outer boundary and
    perforation boundaries); `free` lists the others in increasing order.
    """
    mesh: object
    dirichlet: np.ndarray
    free: np.ndarray
    free_index: np.ndarray
    quadrature_order: int

    @property
    def n_nodes(self):
        return len(self.mesh.node_coords)

    @property
    def n_v(self):
        """ all velocity DOFs, free and dirichlet """
        return 2 * self.n_nodes

    @property
    def n_u(self):
        """ free velocity DOFs """
        return len(self.free)

    @property
    def n_p(self):
        return len(self.mesh.vertex_coords)

    @cached_property
    def element(self):
        return reference_element(self.quadrature_order)

    @cached_property
    def cell_dofs(self):
        """ (n_cells, 18) velocity DOFs of every cell, x block then y block """
        nodes = self.mesh.cell_nodes
        return np.hstack((nodes, nodes + self.n_nodes))

    @cached_property
    def quadrature_points(self):
        """ (n_cells, n_points, 2) physical Gauss points """
        origins = self.mesh.cell_origins
        return origins[:, None, :] + self.mesh.h * self.element.points[None, :, :]

    def to_full(self, u):
        """ scatters free velocity values into a full vector (zero on dirichlet) """
        u = np.asarray(u)
        full = np.zeros((self.n_v,) + u.shape[1:], dtype=u.dtype if u.size else float)
        full[self.free] = u
        return full

    def interpolate(self, field):
        """ nodal interpolant of field(x, y) -> (ux, uy) as a full vector """
        x, y = self.mesh.node_coords[:, 0], self.mesh.node_coords[:, 1]
        ux, uy = field(x, y)
        return np.concatenate((np.broadcast_to(ux, x.shape),
                               np.broadcast_to(uy, x.shape))).astype(float)


@dataclass(frozen=True, eq=False)
class PoUData:
    """
    Bilinear coarse hats chi_j restricted to the perforated domain.

    `chi` is a sparse (n_vertices, n_nodes) matrix of nodal values on the Q2
    scalar nodes; `kappa` holds the weight sum_j |grad chi_j|^2 at the Gauss
    points of every active cell.
    """
    grid: object
    chi: object
    kappa: np.ndarray

    @property
    def H(self):
        return self.grid.H

    def kappa_at(self, points):
        """ evaluates the weight at arbitrary points of the unit square """
        points = np.atleast_2d(points)
        return kappa_tilde(points[:, 0], points[:, 1], self.grid.Nx)


def hat_gradients(x, y, Nx):
    """ gradients of the four coarse hats that live on the coarse cell
    containing (x, y); returns an array (..., 4, 2) """
    H = 1.0 / Nx
    IX = np.clip(np.floor(np.asarray(x) / H), 0, Nx - 1)
    IY = np.clip(np.floor(np.asarray(y) / H), 0, Nx - 1)
    xi = np.asarray(x) / H - IX
    eta = np.asarray(y) / H - IY

    gradients = []
    for ly in (0, 1):
        for lx in (0, 1):
            fx = xi if lx else 1 - xi
            fy = eta if ly else 1 - eta
            sx = 1.0 if lx else -1.0
            sy = 1.0 if ly else -1.0
            gradients.append(np.stack((sx * fy / H, sy * fx / H), axis=-1))
    return np.stack(gradients, axis=-2)


def kappa_tilde(x, y, Nx):
    # only the four hats of the surrounding coarse cell have nonzero gradient
    return np.sum(hat_gradients(x, y, Nx) ** 2, axis=(-2, -1))
