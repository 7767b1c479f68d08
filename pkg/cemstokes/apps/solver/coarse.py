"""
Coarse velocity solve in the span of the multiscale basis and pressure
recovery in the coarse pressure space.
"""
import logging

import numpy as np
from scipy import linalg

from cemstokes.apps.core.conf import solver_setting
from cemstokes.apps.fem.assembly import (
    FineOperators, assemble_divergence, pressure_mean_row
)
from cemstokes.apps.linalg.solvers import solve_spd

from .exceptions import RankDeficientBasis, SingularPressureSystem
from .models import MsSolution
from .reference import fine_load

logger = logging.getLogger(__name__)


def _check_rank(G):
    values, vectors = linalg.eigh(G.toarray())
    largest = float(values[-1]) if len(values) else 0.0
    if len(values) and values[0] <= solver_setting('RANK_TOL') * max(largest, 1e-300):
        # the basis functions carrying the near-null combination
        combination = vectors[:, 0]
        heaviest = np.argsort(-np.abs(combination), kind='stable')[:5]
        raise RankDeficientBasis(
            smallest=float(values[0]), largest=largest,
            combination=[[int(n), float(combination[n])] for n in heaviest])


def assemble_coarse_system(table, f, operators=None):
    """ G = (a(psi_m, psi_n)) and rhs = (<f, psi_m>) over the basis table

    Returns: (G sparse csr, rhs)
    """
    space = table.aux.space
    operators = operators or FineOperators(space)
    Psi = table.matrix

    G = (Psi.T @ (operators.A @ Psi)).tocsr()
    G = ((G + G.T) / 2).tocsr()
    rhs = Psi.T @ fine_load(space, f)

    _check_rank(G)
    logger.debug('coarse system: %d functions, %d nonzeros', G.shape[0], G.nnz)
    return G, rhs


def solve_velocity(G, rhs, table):
    """ Returns: (u_ms on the free velocity DOFs, coefficients) """
    coefficients = solve_spd(G, rhs)
    return table.field(coefficients), coefficients


def broken_divergence(space, QH):
    """ b(v, q) with q on the broken numbering of the coarse pressure space """
    return assemble_divergence(space, pressure_dofs=QH.cell_dofs, n_rows=QH.n_broken)


def broken_mean_row(space, QH):
    return pressure_mean_row(space, pressure_dofs=QH.cell_dofs, n_rows=QH.n_broken)


def broken_pressure(QH, p):
    """ copies a continuous pressure onto the broken numbering """
    return np.asarray(p)[np.concatenate([block.vertices for block in QH.blocks])]


def recover_pressure(u_ms, f, aux, QH, operators=None):
    """ b(v, p_ms) = a(u_ms, v) - <f, v> for every embedded auxiliary v

    Returns: (coefficients, p_ms on the broken numbering, lstsq flag,
    smallest singular value of the system)
    """
    space = aux.space
    operators = operators or FineOperators(space)

    Phi = aux.embedding
    M = (Phi.T @ (broken_divergence(space, QH).T @ QH.basis)).toarray()
    r = Phi.T @ (operators.A @ u_ms - fine_load(space, f))

    singular = linalg.svdvals(M)
    smallest = float(singular[-1]) if M.shape[0] == M.shape[1] else 0.0
    regular = smallest > solver_setting('RANK_TOL') * float(singular[0])

    if regular:
        coefficients = linalg.solve(M, r)
        lstsq = False
    elif solver_setting('ALLOW_LSTSQ_PRESSURE'):
        logger.warning('pressure system %dx%d is singular (sigma_min %.3e), '
                       'using least squares', M.shape[0], M.shape[1], smallest)
        coefficients = linalg.lstsq(M, r)[0]
        lstsq = True
    else:
        raise SingularPressureSystem(shape=list(M.shape), smallest_singular_value=smallest)

    p = QH.field(coefficients)
    mean = broken_mean_row(space, QH)
    p = p - (mean @ p) / space.mesh.area
    return coefficients, p, lstsq, smallest


def solve_multiscale(table, QH, f, operators=None):
    """ coarse velocity plus recovered pressure for one basis table """
    space = table.aux.space
    operators = operators or FineOperators(space)
    load = fine_load(space, f)

    G, rhs = assemble_coarse_system(table, load, operators)
    u, coefficients = solve_velocity(G, rhs, table)
    pressure_coefficients, p, lstsq, smallest = recover_pressure(
        u, load, table.aux, QH, operators)

    return MsSolution(table=table, QH=QH, coefficients=coefficients, u=u,
                      pressure_coefficients=pressure_coefficients, p=p,
                      lstsq=lstsq, pressure_singular_value=smallest)
