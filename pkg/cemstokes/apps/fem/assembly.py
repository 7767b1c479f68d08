"""
Global operators of the Taylor-Hood discretization.

Every assembler works on an optional subset of active cells (positions in
`mesh.cells`) so the same code produces global matrices and the per-block
forms of the auxiliary problems. Velocity matrices are returned on the free
DOFs unless `free_only=False`.
"""
import logging
from functools import cached_property

import numpy as np
from scipy import linalg, sparse
from scipy.sparse.linalg import splu

from cemstokes.apps.core.conf import solver_setting

from .models import SIDE_NODES, FESpace, PoUData, kappa_tilde

logger = logging.getLogger(__name__)


def build_spaces(mesh, quadrature_order=None):
    """ Taylor-Hood pair on the active cells of `mesh`

    A velocity node is dirichlet when it lies on a side of an active cell
    whose neighbour across that side is perforated or outside the square.
    """
    order = quadrature_order or solver_setting('QUADRATURE_ORDER')
    n_nodes = len(mesh.node_coords)

    padded = np.pad(mesh.active, 1, constant_values=False)
    ix, iy = mesh.cell_ij[:, 0] + 1, mesh.cell_ij[:, 1] + 1
    neighbours = {
        'bottom': padded[iy - 1, ix],
        'top': padded[iy + 1, ix],
        'left': padded[iy, ix - 1],
        'right': padded[iy, ix + 1],
    }

    boundary = np.zeros(n_nodes, dtype=bool)
    for side, local in SIDE_NODES.items():
        exposed = ~neighbours[side]
        boundary[mesh.cell_nodes[np.ix_(exposed, local)].ravel()] = True

    dirichlet = np.concatenate((boundary, boundary))
    free = np.flatnonzero(~dirichlet)
    free_index = np.full(2 * n_nodes, -1, dtype=np.int64)
    free_index[free] = np.arange(len(free))

    logger.debug('velocity dofs: %d free of %d, pressure dofs: %d',
                 len(free), 2 * n_nodes, len(mesh.vertex_coords))

    return FESpace(mesh=mesh, dirichlet=dirichlet, free=free,
                   free_index=free_index, quadrature_order=int(order))


def _cells(space, cells):
    if cells is None:
        return np.arange(space.mesh.n_cells)
    return np.asarray(cells, dtype=np.int64)


def _scatter(rows, cols, values, shape):
    matrix = sparse.coo_matrix(
        (values.ravel(), (rows.ravel(), cols.ravel())), shape=shape).tocsr()
    matrix.sum_duplicates()
    matrix.eliminate_zeros()
    return matrix


def _restrict_velocity(space, matrix, rows=True):
    matrix = matrix[:, space.free]
    if rows:
        matrix = matrix[space.free]
    return matrix.tocsr()


def _vector_local(scalar):
    """ 18x18 vector block for a 9x9 scalar matrix, x block first """
    return np.kron(np.eye(2), scalar)


def assemble_stiffness(space, cells=None, free_only=True):
    """ a(u, v) = int grad u : grad v """
    cells = _cells(space, cells)
    local = _vector_local(space.element.stiffness())
    dofs = space.cell_dofs[cells]

    rows = np.repeat(dofs[:, :, None], 18, axis=2)
    cols = np.repeat(dofs[:, None, :], 18, axis=1)
    values = np.broadcast_to(local, (len(cells), 18, 18))

    matrix = _scatter(rows, cols, values, (space.n_v, space.n_v))
    return _restrict_velocity(space, matrix) if free_only else matrix


def assemble_divergence(space, cells=None, pressure_dofs=None, n_rows=None,
                        free_only=True):
    """ b(u, q) = int q div u with rows indexed by pressure DOFs

    Args:
        pressure_dofs: (n_cells, 4) pressure numbering to use instead of the
            continuous one; it lets callers assemble per-block (broken)
            pressure spaces
        n_rows: number of pressure DOFs in that numbering
    """
    cells = _cells(space, cells)
    h = space.mesh.h
    divergence = space.element.divergence() * h
    local = np.concatenate((divergence[:, :, 0], divergence[:, :, 1]), axis=1)

    if pressure_dofs is None:
        pressure_dofs = space.mesh.cell_vertices
        n_rows = space.n_p
    pressure_dofs = np.asarray(pressure_dofs)[cells]
    dofs = space.cell_dofs[cells]

    rows = np.repeat(pressure_dofs[:, :, None], 18, axis=2)
    cols = np.repeat(dofs[:, None, :], 4, axis=1)
    values = np.broadcast_to(local, (len(cells), 4, 18))

    matrix = _scatter(rows, cols, values, (n_rows, space.n_v))
    return _restrict_velocity(space, matrix, rows=False) if free_only else matrix


def build_pou(grid, space):
    """ coarse bilinear hats on the fine velocity nodes and kappa at the
    quadrature points of every active cell """
    nodes = space.mesh.node_coords
    Nx, H = grid.Nx, grid.H

    # each node sees the four hats of one coarse cell; nodes on coarse lines
    # pick either side, both give the same values
    IX = np.clip(np.floor(nodes[:, 0] / H + 1e-12), 0, Nx - 1).astype(np.int64)
    IY = np.clip(np.floor(nodes[:, 1] / H + 1e-12), 0, Nx - 1).astype(np.int64)
    xi = np.clip(nodes[:, 0] / H - IX, 0.0, 1.0)
    eta = np.clip(nodes[:, 1] / H - IY, 0.0, 1.0)

    rows, values = [], []
    for ly in (0, 1):
        for lx in (0, 1):
            rows.append((IY + ly) * (Nx + 1) + IX + lx)
            values.append((xi if lx else 1 - xi) * (eta if ly else 1 - eta))

    columns = np.tile(np.arange(len(nodes)), 4)
    chi = sparse.coo_matrix(
        (np.concatenate(values), (np.concatenate(rows), columns)),
        shape=((Nx + 1) ** 2, len(nodes))).tocsr()
    chi.eliminate_zeros()

    points = space.quadrature_points
    kappa = kappa_tilde(points[..., 0], points[..., 1], Nx)

    return PoUData(grid=grid, chi=chi, kappa=kappa)


def assemble_weighted_mass(space, pou, cells=None, free_only=True):
    """ s(u, v) = int kappa u . v, block diagonal by component """
    cells = _cells(space, cells)
    element = space.element
    kappa = pou.kappa[cells]

    scalar = space.mesh.h ** 2 * np.einsum(
        'cq,q,qa,qb->cab', kappa, element.weights, element.q2, element.q2)
    local = np.zeros((len(cells), 18, 18))
    local[:, :9, :9] = scalar
    local[:, 9:, 9:] = scalar

    dofs = space.cell_dofs[cells]
    rows = np.repeat(dofs[:, :, None], 18, axis=2)
    cols = np.repeat(dofs[:, None, :], 18, axis=1)

    matrix = _scatter(rows, cols, local, (space.n_v, space.n_v))
    return _restrict_velocity(space, matrix) if free_only else matrix


def assemble_load(space, f, cells=None, free_only=True):
    """ <f, v> for a body force f(x, y) -> (fx, fy) """
    cells = _cells(space, cells)
    element = space.element
    points = space.quadrature_points[cells]

    fx, fy = f(points[..., 0], points[..., 1])
    fx = np.broadcast_to(np.asarray(fx, dtype=float), points.shape[:2])
    fy = np.broadcast_to(np.asarray(fy, dtype=float), points.shape[:2])

    weights = space.mesh.h ** 2 * element.weights
    local = np.concatenate((
        np.einsum('cq,q,qa->ca', fx, weights, element.q2),
        np.einsum('cq,q,qa->ca', fy, weights, element.q2),
    ), axis=1)

    load = np.bincount(space.cell_dofs[cells].ravel(), weights=local.ravel(),
                       minlength=space.n_v)
    return load[space.free] if free_only else load


def assemble_pressure_mass(space, cells=None, pressure_dofs=None, n_rows=None):
    """ L2 mass on the bilinear pressure space """
    cells = _cells(space, cells)
    local = space.mesh.h ** 2 * space.element.pressure_mass()
    if pressure_dofs is None:
        pressure_dofs = space.mesh.cell_vertices
        n_rows = space.n_p
    dofs = np.asarray(pressure_dofs)[cells]

    rows = np.repeat(dofs[:, :, None], 4, axis=2)
    cols = np.repeat(dofs[:, None, :], 4, axis=1)
    values = np.broadcast_to(local, (len(cells), 4, 4))
    return _scatter(rows, cols, values, (n_rows, n_rows))


def pressure_mean_row(space, cells=None, pressure_dofs=None, n_rows=None):
    """ m with m @ q = int q over the given cells """
    cells = _cells(space, cells)
    if pressure_dofs is None:
        pressure_dofs = space.mesh.cell_vertices
        n_rows = space.n_p
    dofs = np.asarray(pressure_dofs)[cells]
    quarter = np.full(dofs.shape, space.mesh.h ** 2 / 4)
    return np.bincount(dofs.ravel(), weights=quarter.ravel(), minlength=n_rows)


def block_pressure_numbering(grid):
    """ numbering of the broken pressure space: every coarse block owns a
    private copy of the bilinear nodes of its cells

    Returns: (cell_dofs (n_cells, 4), offsets (N + 1,), vertices) where
    vertices[i] lists the global pressure nodes of block i in local order
    """
    mesh = grid.mesh
    cell_dofs = np.empty_like(mesh.cell_vertices)
    offsets = [0]
    vertices = []

    for cells in grid.elements:
        local_vertices, inverse = np.unique(mesh.cell_vertices[cells],
                                            return_inverse=True)
        cell_dofs[cells] = offsets[-1] + inverse.reshape(len(cells), 4)
        offsets.append(offsets[-1] + len(local_vertices))
        vertices.append(local_vertices)

    return cell_dofs, np.asarray(offsets), tuple(vertices)


def assemble_scalar_forms(space, grid, i):
    """ stiffness and kappa-weighted mass of the bilinear scalar space on K_i

    Returns: (A_i, S_i, vertices) with dense matrices in the local order of
    `vertices`, the global pressure nodes of the block
    """
    cells = grid.elements[i]
    element = space.element
    h = space.mesh.h

    vertices, inverse = np.unique(space.mesh.cell_vertices[cells],
                                  return_inverse=True)
    local_dofs = inverse.reshape(len(cells), 4)
    n = len(vertices)

    points = space.quadrature_points[cells]
    kappa = kappa_tilde(points[..., 0], points[..., 1], grid.Nx)

    stiffness = np.broadcast_to(element.pressure_stiffness(), (len(cells), 4, 4))
    mass = h ** 2 * np.einsum('cq,q,qa,qb->cab', kappa, element.weights,
                              element.q1, element.q1)

    rows = np.repeat(local_dofs[:, :, None], 4, axis=2)
    cols = np.repeat(local_dofs[:, None, :], 4, axis=1)
    A = _scatter(rows, cols, stiffness, (n, n)).toarray()
    S = _scatter(rows, cols, mass, (n, n)).toarray()
    return A, S, vertices


def cell_energies(space, field):
    """ |grad u|^2 integrated over every active cell for a full velocity vector """
    values = np.asarray(field)[space.cell_dofs]
    local = space.element.stiffness()
    # constants are in the kernel of the local stiffness; removing one
    # nodal value per cell keeps constant fields exactly at zero energy
    x = values[:, :9] - values[:, :1]
    y = values[:, 9:] - values[:, 9:10]
    return (np.einsum('ca,ab,cb->c', x, local, x)
            + np.einsum('ca,ab,cb->c', y, local, y))


def cell_weighted_masses(space, pou, field):
    """ kappa |u|^2 integrated over every active cell """
    values = np.asarray(field)[space.cell_dofs]
    element = space.element
    at_points = (np.einsum('qa,ca->cq', element.q2, values[:, :9]) ** 2
                 + np.einsum('qa,ca->cq', element.q2, values[:, 9:]) ** 2)
    return space.mesh.h ** 2 * np.einsum('cq,q,cq->c', pou.kappa,
                                         element.weights, at_points)


def region_norms(space, pou, field, region=None):
    """ (a-seminorm, s-norm) of a full velocity vector over a set of coarse
    elements, the whole domain when `region` is None """
    energies = cell_energies(space, field)
    masses = cell_weighted_masses(space, pou, field)
    if region is not None:
        mask = pou.grid.region_mask(region)
        energies, masses = energies[mask], masses[mask]
    return (float(np.sqrt(max(energies.sum(), 0.0))),
            float(np.sqrt(max(masses.sum(), 0.0))))


def energy_error_exact(space, field, gradient):
    """ || grad(u - u_h) ||_L2 for an exact gradient(x, y) -> (..., 2, 2)
    indexed [component, direction] """
    element = space.element
    values = np.asarray(field)[space.cell_dofs]
    points = space.quadrature_points

    # (n_cells, n_points, component, direction)
    discrete = np.stack((
        np.einsum('qai,ca->cqi', element.q2_grad, values[:, :9]),
        np.einsum('qai,ca->cqi', element.q2_grad, values[:, 9:]),
    ), axis=2) / space.mesh.h
    exact = np.asarray(gradient(points[..., 0], points[..., 1]), dtype=float)

    squared = np.sum((exact - discrete) ** 2, axis=(2, 3))
    total = space.mesh.h ** 2 * np.einsum('cq,q->', squared, element.weights)
    return float(np.sqrt(total))


def pressure_error_exact(space, pressure, exact):
    """ || p - p_h ||_L2 for an exact pressure(x, y) """
    element = space.element
    values = np.asarray(pressure)[space.mesh.cell_vertices]
    points = space.quadrature_points
    discrete = np.einsum('qa,ca->cq', element.q1, values)
    difference = np.asarray(exact(points[..., 0], points[..., 1])) - discrete
    total = space.mesh.h ** 2 * np.einsum('cq,q->', difference ** 2, element.weights)
    return float(np.sqrt(total))


def inf_sup_constant(space):
    """ discrete inf-sup constant of (A, B) over zero-mean pressures

    Smallest eigenvalue of B A^-1 B^T against the pressure mass matrix on
    the mean-free subspace, square-rooted. Dense in the pressure space, so
    meant for diagnostics on small meshes.
    """
    A = assemble_stiffness(space).tocsc()
    B = assemble_divergence(space)
    M = assemble_pressure_mass(space).toarray()
    mean = pressure_mean_row(space)

    lu = splu(A)
    schur = B @ lu.solve(B.T.toarray())
    schur = (schur + schur.T) / 2

    mean_free = linalg.null_space(mean[None, :])
    values = linalg.eigh(mean_free.T @ schur @ mean_free,
                         mean_free.T @ M @ mean_free, eigvals_only=True)
    return float(np.sqrt(max(values[0], 0.0)))


class FineOperators:
    """ the global forms on the free velocity DOFs, assembled on first use
    and shared by every solve on the same space """

    def __init__(self, space):
        self.space = space

    @cached_property
    def A(self):
        return assemble_stiffness(self.space)

    @cached_property
    def B(self):
        return assemble_divergence(self.space)

    @cached_property
    def mean(self):
        return pressure_mean_row(self.space)

    @cached_property
    def pressure_mass(self):
        return assemble_pressure_mass(self.space)
