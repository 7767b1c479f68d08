"""
Local spectral problems behind the auxiliary velocity space and the coarse
pressure space.
"""
import logging

import numpy as np
from cemstokes.apps.core.concurrency import ordered_map
from cemstokes.apps.core.conf import solver_setting
from cemstokes.apps.fem.assembly import (
    assemble_divergence, assemble_scalar_forms, assemble_stiffness,
    assemble_weighted_mass, block_pressure_numbering, pressure_mean_row
)
from cemstokes.apps.linalg.solvers import (
    eig_sym_generalized, null_space_basis, qr_rank,
    smallest_right_singular_vectors, svd_rank
)

from .exceptions import EmptyConstraintSpace, ZeroLambda
from .models import AuxSpace, LocalEigenbasis, LocalPressureBasis, PressureAuxSpace

logger = logging.getLogger(__name__)


def block_dofs(space, grid, i):
    """ free velocity DOFs touched by the cells of K_i, in increasing order """
    nodes = np.unique(space.mesh.cell_nodes[grid.elements[i]])
    full = np.concatenate((nodes, nodes + space.n_nodes))
    local = space.free_index[full]
    return np.sort(local[local >= 0])


def _per_block(values, N, name):
    if np.isscalar(values):
        return [int(values)] * N
    values = [int(value) for value in values]
    if len(values) != N:
        raise ValueError('{} needs one entry per coarse block ({} given, {} blocks)'
                         .format(name, len(values), N))
    return values


def local_velocity_eigenbasis(space, pou, i, ell, n_extra=1):
    """ solves a_i(phi, v) = lambda s_i(phi, v) on V(K_i)

    V(K_i) keeps the dirichlet DOFs of the perforated domain and leaves the
    coarse block boundary free.

    Returns: LocalEigenbasis with ell + n_extra eigenvalues
    """
    cells = pou.grid.elements[i]
    dofs = block_dofs(space, pou.grid, i)

    A = assemble_stiffness(space, cells=cells)[dofs][:, dofs].tocsr()
    S = assemble_weighted_mass(space, pou, cells=cells)[dofs][:, dofs].tocsr()

    count = min(ell + n_extra, len(dofs))
    values, vectors = eig_sym_generalized(A, S, count)

    logger.debug('block %d: %d dofs, lambda = %s', i, len(dofs), values)

    return LocalEigenbasis(i=i, dofs=dofs, A=A, S=S, values=values,
                           vectors=vectors[:, :ell])


def build_aux_space(space, pou, ell, threads=None):
    """ auxiliary velocity space with `ell` modes per block

    Args:
        ell: one count for every block or a sequence with one per block

    Returns: AuxSpace
    """
    counts = _per_block(ell, pou.grid.N, 'ell')
    blocks = ordered_map(
        lambda i: local_velocity_eigenbasis(space, pou, i, counts[i]),
        range(pou.grid.N), threads)

    tolerance = solver_setting('ZERO_EIGENVALUE_TOL')
    for block in blocks:
        if block.ell >= len(block.values) or block.excluded <= tolerance:
            raise ZeroLambda(block=block.i, ell=block.ell,
                             excluded=float(block.values[-1]))

    aux = AuxSpace(space=space, pou=pou, blocks=tuple(blocks))
    logger.info('auxiliary space: %d modes, Lambda = %.6g, Gamma = %.6g',
                aux.n_aux, aux.Lambda, aux.Gamma)
    return aux


def project_pi(aux, v):
    """ pi-coefficients of free velocity values v; see AuxSpace.broken_field
    for pi(v) as a field """
    return aux.project(v)


def _block_forms(aux, i, numbering):
    space, grid = aux.space, aux.grid
    cell_dofs, offsets, _ = numbering
    cells = grid.elements[i]
    n_local = int(offsets[i + 1] - offsets[i])
    local_numbering = cell_dofs - offsets[i]

    B = assemble_divergence(space, cells=cells, pressure_dofs=local_numbering,
                            n_rows=n_local)
    mean = pressure_mean_row(space, cells=cells, pressure_dofs=local_numbering,
                             n_rows=n_local)
    return B, mean


def constraint_matrix(aux, i, B, scope=None):
    """ rows b_i((I - pi) w, .) of the pressure constraints of block i

    The patch scope takes w over V(K_i); the global scope over every free
    velocity DOF, which only adds zero rows.
    """
    scope = scope or solver_setting('CONSTRAINT_SCOPE')
    block = aux.blocks[i]
    B_local = B[:, block.dofs].toarray()

    if scope == 'patch':
        weighted = block.S @ block.vectors
        return B_local.T - weighted @ (block.vectors.T @ B_local.T)

    if scope == 'global':
        # (I - pi_i) e_alpha restricted to K_i for every free DOF alpha
        P_i = aux.projector[aux.coordinates(i)]
        scattered = np.zeros((aux.space.n_u, B_local.shape[0]))
        scattered[block.dofs] = B_local.T
        return scattered - P_i.T @ (block.vectors.T @ B_local.T)

    raise ValueError('unknown constraint scope: {}'.format(scope))


def constraint_dimension(aux, i, numbering=None, scope=None):
    """ dimension of the exactly constrained space W(K_i), once from an SVD
    rank and once from a pivoted QR rank """
    rank_tol = solver_setting('RANK_TOL')
    numbering = numbering or block_pressure_numbering(aux.grid)
    B, mean = _block_forms(aux, i, numbering)
    CZ = constraint_matrix(aux, i, B, scope) @ null_space_basis(mean[None, :], rank_tol)
    return CZ.shape[1] - svd_rank(CZ, rank_tol), CZ.shape[1] - qr_rank(CZ, rank_tol)


def local_pressure_eigenbasis(aux, i, ell, numbering=None, mode=None, scope=None):
    """ solves A_i(q, v) = zeta S_i(q, v) on the constrained space W(K_i)

    `mode` "strict" uses the exact null space of the constraints and raises
    EmptyConstraintSpace when it is smaller than ell; "relaxed" uses the
    directions with the smallest constraint residual.
    """
    mode = mode or solver_setting('PRESSURE_SPACE')
    numbering = numbering or block_pressure_numbering(aux.grid)
    rank_tol = solver_setting('RANK_TOL')

    A_p, S_p, vertices = assemble_scalar_forms(aux.space, aux.grid, i)
    B, mean = _block_forms(aux, i, numbering)
    C = constraint_matrix(aux, i, B, scope)

    # mean-free pressures of the block
    Z = null_space_basis(mean[None, :], rank_tol)
    CZ = C @ Z
    strict_dimension = Z.shape[1] - svd_rank(CZ, rank_tol)

    if mode == 'strict':
        if strict_dimension < ell:
            raise EmptyConstraintSpace(block=i, dimension=strict_dimension,
                                       requested=ell,
                                       qr_dimension=Z.shape[1] - qr_rank(CZ, rank_tol))
        W = Z @ null_space_basis(CZ, rank_tol)
    elif mode == 'relaxed':
        count = min(solver_setting('PRESSURE_RELAXED_FACTOR') * ell, Z.shape[1])
        count = max(count, min(strict_dimension, Z.shape[1]))
        if count < ell:
            raise EmptyConstraintSpace(block=i, dimension=count, requested=ell)
        directions, _ = smallest_right_singular_vectors(CZ, count)
        W = Z @ directions
    else:
        raise ValueError('unknown pressure space: {}'.format(mode))

    values, coefficients = eig_sym_generalized(W.T @ A_p @ W, W.T @ S_p @ W, ell)
    vectors = W @ coefficients

    scale = np.linalg.norm(C)
    residuals = np.linalg.norm(C @ vectors, axis=0) / np.linalg.norm(vectors, axis=0)
    violation = float(residuals.max() / scale) if scale > 0 else 0.0

    logger.debug('block %d: pressure zeta = %s, violation %.3e', i, values, violation)

    return LocalPressureBasis(i=i, vertices=vertices, values=values, vectors=vectors,
                              strict_dimension=int(strict_dimension),
                              violation=violation, mode=mode)


def build_QH(aux, ell=None, mode=None, threads=None):
    """ coarse pressure space with as many modes per block as the auxiliary
    velocity space """
    counts = _per_block(aux.ell if ell is None else ell, aux.grid.N, 'ell')
    numbering = block_pressure_numbering(aux.grid)

    blocks = ordered_map(
        lambda i: local_pressure_eigenbasis(aux, i, counts[i], numbering, mode),
        range(aux.grid.N), threads)

    cell_dofs, offsets, _ = numbering
    QH = PressureAuxSpace(grid=aux.grid, blocks=tuple(blocks),
                          cell_dofs=cell_dofs, offsets=offsets)
    logger.info('coarse pressure space: %d modes, largest violation %.3e',
                QH.n, max(block.violation for block in blocks))
    return QH


def eigen_report(aux, QH=None):
    """ one row per block: lambda_1 .. lambda_{ell+1}, zeta_1 .. zeta_ell """
    rows = []
    for i, block in enumerate(aux.blocks):
        row = {'block': i, 'IX': aux.grid.positions[i][0],
               'IY': aux.grid.positions[i][1], 'ell': block.ell}
        for j, value in enumerate(block.values, start=1):
            row['lambda_{}'.format(j)] = float(value)
        if QH is not None:
            for j, value in enumerate(QH.blocks[i].values, start=1):
                row['zeta_{}'.format(j)] = float(value)
            row['violation'] = QH.blocks[i].violation
        rows.append(row)
    return rows


def norm_inequality_violations(aux, random, samples=50, slack=1e-8):
    """ counts random samples breaking ||v||_a <= Gamma^1/2 ||v||_s on the
    auxiliary space or ||v||_s <= Lambda^-1/2 ||v||_a on the kernel of pi """
    energy_bound = np.sqrt(aux.Gamma)
    mass_bound = 1 / np.sqrt(aux.Lambda)
    P = aux.projector
    gram = (P @ P.T).toarray()

    auxiliary = kernel = 0
    for _ in range(samples):
        energy, mass = aux.broken_norms(aux.broken_field(random.randn(aux.n_aux)))
        auxiliary += energy > (1 + slack) * energy_bound * mass

        v = random.randn(aux.space.n_u)
        v -= P.T @ np.linalg.solve(gram, P @ v)
        energy, mass = aux.broken_norms([v[block.dofs] for block in aux.blocks])
        kernel += mass > (1 + slack) * mass_bound * energy

    return {'auxiliary_energy': int(auxiliary), 'kernel_mass': int(kernel)}
