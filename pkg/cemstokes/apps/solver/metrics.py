import logging

import numpy as np

from cemstokes.apps.fem.assembly import (
    FineOperators, assemble_pressure_mass, region_norms
)
from cemstokes.apps.linalg.solvers import solve_spd

from .coarse import broken_divergence, broken_mean_row, broken_pressure
from .reference import fine_load

logger = logging.getLogger(__name__)


def _ratio(error, norm):
    return error / norm if norm > 0 else 0.0


def _compact(values):
    """ a single value when every block uses the same one """
    values = list(values)
    return values[0] if len(set(values)) == 1 else values


def velocity_errors(space, pou, u, v):
    """ (||u - v||_a, ||u - v||_s) for free velocity vectors """
    return region_norms(space, pou, space.to_full(np.asarray(u) - np.asarray(v)))


def pressure_errors(space, QH, p_h, p_ms):
    """ (||p_h - p_ms||, ||(I - P0)(p_h - p_ms)||, ||p_h||) with P0 the
    coarse block mean projector; p_ms on the broken numbering """
    mass = assemble_pressure_mass(space, pressure_dofs=QH.cell_dofs, n_rows=QH.n_broken)
    reference = broken_pressure(QH, p_h)
    difference = reference - p_ms

    owner = np.repeat(np.arange(QH.grid.N), np.diff(QH.offsets))
    weights = broken_mean_row(space, QH)
    areas = np.bincount(owner, weights=weights)
    means = np.bincount(owner, weights=weights * difference) / areas
    fluctuation = difference - means[owner]

    def norm(vector):
        return float(np.sqrt(max(vector @ (mass @ vector), 0.0)))
    return norm(difference), norm(fluctuation), norm(reference)


def kappa_weighted_force(space, pou, f):
    """ || kappa^-1/2 f ||_L2 """
    points = space.quadrature_points
    fx, fy = f(points[..., 0], points[..., 1])
    integrand = (np.asarray(fx) ** 2 + np.asarray(fy) ** 2) / pou.kappa
    return float(np.sqrt(space.mesh.h ** 2 * np.einsum('cq,q->', integrand,
                                                      space.element.weights)))


def residual_norm(ms, f, operators=None):
    """ dual a-norm of v -> <f, v> - a(u_ms, v) + b(v, p_ms) over the fine space """
    space = ms.space
    operators = operators or FineOperators(space)
    residual = (fine_load(space, f) - operators.A @ ms.u
                + broken_divergence(space, ms.QH).T @ ms.p)
    return float(np.sqrt(max(residual @ solve_spd(operators.A, residual), 0.0)))


def error_report(reference, ms, f=None, operators=None):
    """ the metrics record of one multiscale solve against the fine reference

    Relative errors are zero when the reference vanishes. The force dependent
    indicators are only reported when `f` is given.
    """
    space, aux = reference.space, ms.aux
    pou = aux.pou

    err_u_a, err_u_s = velocity_errors(space, pou, reference.u, ms.u)
    norm_u_a, _ = region_norms(space, pou, reference.u_full)
    err_p, err_p_fluct, norm_p = pressure_errors(space, ms.QH, reference.p, ms.p)

    k = ms.table.k
    metrics = {
        'H': aux.grid.H,
        'h': space.mesh.h,
        'ell': _compact(aux.ell),
        'k': 'global' if k is None else (int(k) if np.isscalar(k) else list(k)),
        'n_ms': ms.n_ms,
        'err_u_a': err_u_a,
        'err_u_s': err_u_s,
        'err_u_rel': _ratio(err_u_a, norm_u_a),
        'err_p': err_p,
        'err_p_rel': _ratio(err_p, norm_p),
        'err_p_fluct': err_p_fluct,
        'lambda_min_excluded': aux.Lambda,
        'gamma': aux.Gamma,
        'pressure_lstsq': ms.lstsq,
        'pressure_sigma_min': ms.pressure_singular_value,
    }
    if f is not None and callable(f):
        metrics['kappa_f_norm'] = kappa_weighted_force(space, pou, f)
    if f is not None:
        metrics['residual_norm'] = residual_norm(ms, f, operators)

    logger.info('H = %.4g, k = %s: err_u_a = %.4e (rel %.4e), err_p = %.4e',
                metrics['H'], metrics['k'], err_u_a, metrics['err_u_rel'], err_p)
    return metrics
