"""
Reference quadrilateral on [0,1]^2: biquadratic (Q2) velocity shape functions,
bilinear (Q1) pressure shape functions and tensor Gauss quadrature.

Local numbering is lexicographic with x fastest: Q2 node (lx, ly) has index
3*ly + lx, Q1 corner (lx, ly) has index 2*ly + lx.
"""
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss


def _quadratic(t):
    values = np.stack((2 * t * t - 3 * t + 1, 4 * t - 4 * t * t, 2 * t * t - t), axis=-1)
    slopes = np.stack((4 * t - 3, 4 - 8 * t, 4 * t - 1), axis=-1)
    return values, slopes


def _linear(t):
    values = np.stack((1 - t, t), axis=-1)
    slopes = np.stack((-np.ones_like(t), np.ones_like(t)), axis=-1)
    return values, slopes


def _tensor(values_x, slopes_x, values_y, slopes_y):
    # shape function (lx, ly) = phi_lx(x) phi_ly(y), flattened as ly*n + lx
    n = values_x.shape[-1]
    value = np.einsum('...j,...i->...ji', values_y, values_x).reshape(values_x.shape[:-1] + (n * n,))
    dx = np.einsum('...j,...i->...ji', values_y, slopes_x).reshape(value.shape)
    dy = np.einsum('...j,...i->...ji', slopes_y, values_x).reshape(value.shape)
    return value, np.stack((dx, dy), axis=-1)


def q2_basis(xi, eta):
    """ Q2 values (..., 9) and reference gradients (..., 9, 2) """
    vx, sx = _quadratic(np.asarray(xi, dtype=float))
    vy, sy = _quadratic(np.asarray(eta, dtype=float))
    return _tensor(vx, sx, vy, sy)


def q1_basis(xi, eta):
    """ Q1 values (..., 4) and reference gradients (..., 4, 2) """
    vx, sx = _linear(np.asarray(xi, dtype=float))
    vy, sy = _linear(np.asarray(eta, dtype=float))
    return _tensor(vx, sx, vy, sy)


class ReferenceElement:
    """
    Tabulated Q2/Q1 pair on the unit reference cell. A physical cell of
    size h maps by x = origin + h * xi, so gradients scale with 1/h and
    the Jacobian determinant is h^2.
    """

    def __init__(self, order):
        self.order = int(order)
        nodes, weights = leggauss(self.order)

        # Gauss points and weights moved from [-1, 1] to [0, 1]
        t = (nodes + 1) / 2
        w = weights / 2
        eta, xi = np.meshgrid(t, t, indexing='ij')
        self.points = np.column_stack((xi.ravel(), eta.ravel()))
        self.weights = np.outer(w, w).ravel()

        self.q2, self.q2_grad = q2_basis(self.points[:, 0], self.points[:, 1])
        self.q1, self.q1_grad = q1_basis(self.points[:, 0], self.points[:, 1])

    @property
    def n_points(self):
        return len(self.weights)

    def stiffness(self):
        """ scalar Q2 stiffness, independent of the cell size in 2D """
        return np.einsum('q,qai,qbi->ab', self.weights, self.q2_grad, self.q2_grad)

    def mass(self):
        """ scalar Q2 mass on the unit cell (scale by h^2) """
        return np.einsum('q,qa,qb->ab', self.weights, self.q2, self.q2)

    def divergence(self):
        """ (4, 9, 2): int P_b d/dxi_i N_a on the unit cell (scale by h) """
        return np.einsum('q,qb,qai->bai', self.weights, self.q1, self.q2_grad)

    def pressure_stiffness(self):
        return np.einsum('q,qai,qbi->ab', self.weights, self.q1_grad, self.q1_grad)

    def pressure_mass(self):
        return np.einsum('q,qa,qb->ab', self.weights, self.q1, self.q1)


@lru_cache(maxsize=8)
def reference_element(order):
    return ReferenceElement(order)
