import logging

import numpy as np

from cemstokes.apps.fem.assembly import FineOperators, assemble_load
from cemstokes.apps.linalg.models import SaddleSystem
from cemstokes.apps.linalg.solvers import solve_saddle

from .models import ReferenceSolution

logger = logging.getLogger(__name__)


def fine_load(space, f):
    """ <f, v> on the free DOFs for a callable force or an assembled vector """
    if callable(f):
        return assemble_load(space, f)
    return np.asarray(f, dtype=float)


def solve_reference(space, f, operators=None):
    """ fine Taylor-Hood solve with a zero mean pressure

    The saddle system is A u + B^T p' = F, B u = 0 with b(u, q) = int q div u,
    so the pressure of a(u, v) - b(v, p) = <f, v> is p = -p'.

    Returns: ReferenceSolution
    """
    operators = operators or FineOperators(space)
    load = fine_load(space, f)

    system = SaddleSystem(A=operators.A, B=operators.B, rhs_u=load,
                          mean_rows=operators.mean[None, :])
    u, p, _ = solve_saddle(system)

    logger.info('reference solve: %d velocity, %d pressure DOFs', space.n_u, space.n_p)
    return ReferenceSolution(space=space, u=u, p=-p)
