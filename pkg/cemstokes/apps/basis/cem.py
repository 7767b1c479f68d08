"""
Constraint energy minimizing basis functions.

psi_j^i minimizes a(psi, psi) + s(pi psi - phi_j^i, pi psi - phi_j^i) over
the discretely divergence-free fields with zero trace on the boundary of
the oversampling region. The minimizer solves the saddle point problem

    a(psi, v) + s(pi psi, pi v) + b(v, xi) = s(phi_j^i, pi v)
    b(psi, q) = 0

with xi determined up to one constant per connected component of the region,
fixed by zero-mean rows.
"""
import logging

import numpy as np
from scipy import ndimage

from cemstokes.apps.core.concurrency import ordered_map
from cemstokes.apps.fem.assembly import (
    FineOperators, assemble_pressure_mass, cell_energies, pressure_mean_row
)
from cemstokes.apps.linalg.models import SaddleSystem
from cemstokes.apps.linalg.solvers import SaddleFactorization
from cemstokes.apps.mesh.generators import oversample_region, saturation_layers

from .exceptions import EmptyRegion
from .models import BasisTable, CemBasisFunction

logger = logging.getLogger(__name__)


def region_dofs(space, grid, region):
    """ free velocity DOFs whose nodes are touched only by cells of the region """
    mask = grid.region_mask(region)
    inside = np.unique(space.mesh.cell_nodes[mask])
    outside = np.unique(space.mesh.cell_nodes[~mask])
    nodes = np.setdiff1d(inside, outside, assume_unique=True)

    local = space.free_index[np.concatenate((nodes, nodes + space.n_nodes))]
    return np.sort(local[local >= 0])


def region_components(grid, region):
    """ cell positions of every connected component of the region

    Cells touching at a corner share a pressure node and count as connected.
    """
    mesh = grid.mesh
    cells = grid.region_cells(region)
    image = np.zeros_like(mesh.active)
    ij = mesh.cell_ij[cells]
    image[ij[:, 1], ij[:, 0]] = True

    labels, count = ndimage.label(image, structure=np.ones((3, 3)))
    owner = labels[ij[:, 1], ij[:, 0]]
    return [cells[owner == label] for label in range(1, count + 1)]


class RegionProblem:
    """
    The factorized saddle point system of one oversampling region. Every
    basis function whose region is this one is a single back substitution.
    """

    def __init__(self, aux, region, operators=None):
        self.aux = aux
        self.region = frozenset(region)
        operators = operators or FineOperators(aux.space)
        space, grid = aux.space, aux.grid

        self.dofs = region_dofs(space, grid, self.region)
        if len(self.dofs) == 0:
            raise EmptyRegion(region=sorted(self.region))

        cells = grid.region_cells(self.region)
        self.vertices = np.unique(space.mesh.cell_vertices[cells])

        means = [pressure_mean_row(space, cells=component)[self.vertices]
                 for component in region_components(grid, self.region)]

        projector = aux.projector[:, self.dofs].tocsr()
        # auxiliary coordinates that see the region at all
        self.rows = np.unique(projector.nonzero()[0])
        self.projector = projector[self.rows]

        self.system = SaddleSystem(
            A=operators.A[self.dofs][:, self.dofs],
            B=operators.B[self.vertices][:, self.dofs],
            rhs_u=np.zeros(len(self.dofs)),
            mean_rows=np.vstack(means),
            low_rank=self.projector,
        )
        self.factorization = SaddleFactorization(self.system)

        logger.debug('region of %d blocks: %d velocity, %d pressure, %d auxiliary',
                     len(self.region), len(self.dofs), len(self.vertices), len(self.rows))

    def solve(self, coordinates):
        """ basis functions for the auxiliary coordinates `coordinates`

        Returns: (velocity values (n_dofs, m), multipliers (n_vertices, m))
        """
        rhs_u = self.aux.projector[coordinates][:, self.dofs].toarray().T
        system = SaddleSystem(A=self.system.A, B=self.system.B, rhs_u=rhs_u,
                              mean_rows=self.system.mean_rows,
                              low_rank=self.system.low_rank)
        u, p, _ = system.split(self.factorization.solve(system.rhs()))
        return u, p


def _block_functions(problem, i, k):
    aux = problem.aux
    coordinates = aux.coordinates(i)
    values, multipliers = problem.solve(coordinates)
    return [
        CemBasisFunction(i=i, j=j, k=k, region=problem.region, dofs=problem.dofs,
                         values=values[:, j].copy(), vertices=problem.vertices,
                         multiplier=multipliers[:, j].copy())
        for j in range(len(coordinates))
    ]


def compute_ms_basis(aux, i, j, k, operators=None):
    """ localized basis function psi_{j,ms}^i on K_{i,k} """
    region = oversample_region(aux.grid, i, k)
    problem = RegionProblem(aux, region, operators)
    return _block_functions(problem, i, int(k))[j]


def compute_global_basis(aux, i, j, operators=None):
    """ global basis function psi_j^i, posed on the whole domain """
    problem = RegionProblem(aux, range(aux.grid.N), operators)
    return _block_functions(problem, i, None)[j]


def _layers(k, N):
    if k is None or np.isscalar(k):
        return [None if k is None else int(k)] * N
    k = list(k)
    if len(k) != N:
        raise ValueError('k needs one entry per coarse block ({} given, {} blocks)'
                         .format(len(k), N))
    return [None if layer is None else int(layer) for layer in k]


def compute_basis_table(aux, k, threads=None, operators=None):
    """ every basis function for an oversampling setting

    Args:
        k: layers for every block, a sequence with one entry per block, or
            None for the global basis

    Blocks whose regions coincide share one factorization.
    """
    grid = aux.grid
    layers = _layers(k, grid.N)
    operators = operators or FineOperators(aux.space)

    regions = [frozenset(range(grid.N)) if layer is None
               else oversample_region(grid, i, layer)
               for i, layer in enumerate(layers)]

    groups = {}
    for i, region in enumerate(regions):
        groups.setdefault(region, []).append(i)

    def solve_group(region):
        problem = RegionProblem(aux, region, operators)
        return [_block_functions(problem, i, layers[i]) for i in groups[region]]

    # dict order is first appearance, so the result does not depend on threads
    solved = ordered_map(solve_group, list(groups), threads)

    by_block = {}
    for region, functions in zip(groups, solved):
        for i, block_functions in zip(groups[region], functions):
            by_block[i] = block_functions

    functions = tuple(psi for i in range(grid.N) for psi in by_block[i])
    logger.info('basis table: %d functions, k = %s, %d factorizations',
                len(functions), 'global' if k is None else k, len(groups))
    return BasisTable(aux=aux, k=k, functions=functions)


def exterior_energy(aux, psi, region):
    """ ||psi||_a^2 + ||pi psi||_s^2 restricted to the complement of region """
    space, grid = aux.space, aux.grid
    full = space.to_full(psi.full(space.n_u))
    outside = ~grid.region_mask(region)
    energy = float(cell_energies(space, full)[outside].sum())

    coefficients = aux.project(psi.full(space.n_u))
    outside_blocks = [block for block in range(grid.N) if block not in region]
    mass = float(sum(np.sum(coefficients[aux.coordinates(block)] ** 2)
                     for block in outside_blocks))
    return energy + mass


def decay_profile(aux, psi, i):
    """ [(m, exterior energy outside K_{i,m})] for m = 0 .. saturation """
    return [(m, exterior_energy(aux, psi, oversample_region(aux.grid, i, m)))
            for m in range(saturation_layers(aux.grid, i) + 1)]


def localization_error(aux, psi_global, psi_ms, operators=None):
    """ (||psi - psi_ms||_a, ||pi(psi - psi_ms)||_s) """
    operators = operators or FineOperators(aux.space)
    n_u = aux.space.n_u
    difference = psi_global.full(n_u) - psi_ms.full(n_u)
    energy = float(difference @ (operators.A @ difference))
    mass = float(np.sum(aux.project(difference) ** 2))
    return np.sqrt(max(energy, 0.0)), np.sqrt(mass)


def decay_factor_bound(Lambda, k):
    """ the localization factor E = 3 (1 + 1/Lambda) (1 + [6 (1 + 1/Lambda)]^-1/2)^(1 - k) """
    base = 1 + 1 / Lambda
    return 3 * base * (1 + (6 * base) ** -0.5) ** (1 - k)


def divergence_residual(aux, psi, operators=None):
    """ max over fine pressures q of the region of |b(psi, q)| / (||psi||_a ||q||) """
    operators = operators or FineOperators(aux.space)
    space = aux.space
    vector = psi.full(space.n_u)
    energy = np.sqrt(max(float(vector @ (operators.A @ vector)), 0.0))
    if energy == 0:
        return 0.0

    cells = aux.grid.region_cells(psi.region)
    mass = assemble_pressure_mass(space, cells=cells)[psi.vertices][:, psi.vertices]
    residual = operators.B[psi.vertices] @ vector
    # dual norm of the residual in the L2 pressure norm
    dual = np.sqrt(max(float(residual @ np.linalg.solve(mass.toarray(), residual)), 0.0))
    return dual / energy
