"""
Direct solvers and dense spectral kernels.

Small systems are factorized densely, larger ones with SuperLU. Every
solve checks its residual against `SOLVE_TOL`.
"""
import dataclasses
import logging
import warnings

import numpy as np
from scipy import linalg, sparse
from scipy.sparse.linalg import splu

from cemstokes.apps.core.conf import solver_setting

from .exceptions import DegeneratePencil, NotSPD, SingularSystem

logger = logging.getLogger(__name__)


def _dense(matrix):
    return matrix.toarray() if sparse.issparse(matrix) else np.asarray(matrix, dtype=float)


def _norm(vector):
    return float(np.linalg.norm(vector))


def _check_residual(matrix, x, b, tol, error, **context):
    """ refuses non-finite or clearly wrong solutions, warns on loose ones """
    if not np.all(np.isfinite(x)):
        raise error(residual=None, **context)

    residual = _norm(matrix @ x - b)
    bound = tol * (1 + _norm(b))
    if residual > np.sqrt(tol) * (1 + _norm(b)):
        raise error(residual=residual, **context)
    if residual > bound:
        logger.warning('residual %.3e above tolerance %.3e (size %d)',
                       residual, bound, matrix.shape[0])
    return residual


def solve_spd(A, b, tol=None):
    """ solves A x = b for symmetric positive definite A

    Args:
        A: dense or sparse matrix
        b: right-hand side, one or several columns
        tol: relative residual bound, `SOLVE_TOL` by default

    Returns: x
    """
    tol = tol if tol is not None else solver_setting('SOLVE_TOL')
    b = np.asarray(b, dtype=float)
    n = A.shape[0]

    if not sparse.issparse(A) or n <= solver_setting('DENSE_LIMIT'):
        dense = _dense(A)
        try:
            factor = linalg.cho_factor(dense)
        except linalg.LinAlgError:
            raise NotSPD(size=n)
        x = linalg.cho_solve(factor, b)
        _check_residual(dense, x, b, tol, NotSPD, size=n)
        return x

    # symmetric mode keeps the pivots on the diagonal, so their signs are the
    # signs of the LDL^T factor
    lu = splu(sparse.csc_matrix(A), permc_spec='MMD_AT_PLUS_A',
              diag_pivot_thresh=0.0, options={'SymmetricMode': True})
    if not np.all(lu.U.diagonal() > 0):
        raise NotSPD(size=n)
    x = lu.solve(b)
    _check_residual(A, x, b, tol, NotSPD, size=n)
    return x


class SaddleFactorization:
    """
    Factorization of an assembled saddle point matrix, reusable for several
    right-hand sides of the same system.

    Large systems with a low-rank term are solved with the sparse LU of the
    system without it: the auxiliary unknowns z = P u are eliminated through
    the capacitance matrix I + P K^-1 P^T, so the dense rows of P never
    enter the sparse factor.
    """
    # right-hand side columns per back substitution when forming K^-1 P^T
    chunk = 256

    def __init__(self, system, tol=None):
        self.system = system
        self.tol = tol if tol is not None else solver_setting('SOLVE_TOL')
        self.matrix = system.matrix()
        self.size = self.matrix.shape[0]
        self.dense = self.size <= solver_setting('DENSE_LIMIT')
        self.bordered = not self.dense and system.n_low_rank > 0
        self._lu = None

        if self.dense:
            self.matrix = self.matrix.toarray()
        elif self.bordered:
            self._factor_bordered()
        else:
            self._lu = self._splu(self.matrix)

        logger.debug('saddle system of size %d (%s)', self.size,
                     'dense' if self.dense else 'bordered' if self.bordered else 'sparse')

    def _splu(self, matrix):
        try:
            return splu(sparse.csc_matrix(matrix), permc_spec='MMD_AT_PLUS_A')
        except RuntimeError:
            raise SingularSystem(size=self.size, deficiency=self._deficiency())

    def _factor_bordered(self):
        system = self.system
        n_u, r = system.n_u, system.n_low_rank
        self._lu = self._splu(dataclasses.replace(system, low_rank=None).matrix())
        self._border = sparse.csr_matrix(system.low_rank)

        # velocity rows of K^-1 P^T, a few columns at a time
        PT = self._border.T.tocsc()
        inner = self._lu.shape[0]
        W = np.empty((n_u, r))
        for start in range(0, r, self.chunk):
            stop = min(start + self.chunk, r)
            columns = np.zeros((inner, stop - start))
            columns[:n_u] = PT[:, start:stop].toarray()
            W[:, start:stop] = self._lu.solve(columns)[:n_u]

        capacitance = np.eye(r) + self._border @ W
        try:
            self._capacitance = linalg.cho_factor((capacitance + capacitance.T) / 2)
        except linalg.LinAlgError:
            raise SingularSystem(size=self.size, low_rank=r)

    def _solve_bordered(self, rhs):
        n_u, r = self.system.n_u, self.system.n_low_rank
        g = np.concatenate((rhs[:n_u], rhs[n_u + r:]))
        h = rhs[n_u:n_u + r]

        y = self._lu.solve(g)
        z = linalg.cho_solve(self._capacitance, self._border @ y[:n_u] - h)
        correction = np.zeros_like(g)
        correction[:n_u] = self._border.T @ z
        x = self._lu.solve(g - correction)
        return np.concatenate((x[:n_u], z, x[n_u:]))

    def _deficiency(self):
        """ rank deficiency, estimated from the U factor on the sparse paths """
        if self.dense:
            return int(self.size - np.linalg.matrix_rank(self.matrix))
        if self._lu is None:
            limit = 10 * solver_setting('DENSE_LIMIT')
            return int(self.size - svd_rank(self.matrix)) if self.size <= limit else None
        diagonal = np.abs(self._lu.U.diagonal())
        if diagonal.size == 0 or diagonal.max() == 0:
            return int(diagonal.size)
        return int(np.sum(diagonal <= solver_setting('RANK_TOL') * diagonal.max()))

    def solve(self, rhs):
        rhs = np.asarray(rhs, dtype=float)
        if self.dense:
            try:
                with warnings.catch_warnings():
                    warnings.simplefilter('ignore', linalg.LinAlgWarning)
                    x = linalg.solve(self.matrix, rhs, assume_a='sym')
            except linalg.LinAlgError:
                raise SingularSystem(size=self.size, deficiency=self._deficiency())
        elif self.bordered:
            x = self._solve_bordered(rhs)
        else:
            x = self._lu.solve(rhs)

        if not np.all(np.isfinite(x)):
            raise SingularSystem(size=self.size, deficiency=self._deficiency())

        residual = _norm(self.matrix @ x - rhs)
        if residual > np.sqrt(self.tol) * (1 + _norm(rhs)):
            raise SingularSystem(size=self.size, residual=residual,
                                 deficiency=self._deficiency())
        if residual > self.tol * (1 + _norm(rhs)):
            logger.warning('saddle residual %.3e above tolerance (size %d)',
                           residual, self.size)
        return x


def solve_saddle(system, tol=None):
    """ solves a SaddleSystem

    Returns: (u, p, mean multipliers); each has one column per right-hand
    side column
    """
    factorization = SaddleFactorization(system, tol)
    return system.split(factorization.solve(system.rhs()))


def _normalize_signs(vectors):
    """ flips every column so its largest entry is positive """
    if vectors.size == 0:
        return vectors
    pivots = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[pivots, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1
    return vectors * signs


def eig_sym_generalized(A, S, m, rank_tol=None):
    """ smallest m eigenpairs of A x = lambda S x

    S may be semidefinite: the pencil is solved on the span of the
    eigenvectors of S above rank_tol * max eigenvalue.

    Returns: (values (m,), vectors (n, m)) with values ascending and
    vectors S-orthonormal
    """
    rank_tol = rank_tol if rank_tol is not None else solver_setting('RANK_TOL')
    A, S = _dense(A), _dense(S)
    if m == 0:
        return np.zeros(0), np.zeros((A.shape[0], 0))
    A = (A + A.T) / 2
    S = (S + S.T) / 2

    weights, modes = linalg.eigh(S)
    keep = weights > rank_tol * max(weights.max(), 0.0)
    if keep.sum() < m or weights.max() <= 0:
        raise DegeneratePencil(requested=int(m), available=int(keep.sum()))

    # x = T y turns the pencil into a standard problem with S-orthonormal x
    T = modes[:, keep] / np.sqrt(weights[keep])
    reduced = T.T @ A @ T
    values, vectors = linalg.eigh((reduced + reduced.T) / 2, subset_by_index=[0, m - 1])

    return values, _normalize_signs(T @ vectors)


def svd_rank(C, rank_tol=None):
    rank_tol = rank_tol if rank_tol is not None else solver_setting('RANK_TOL')
    values = linalg.svdvals(_dense(C))
    if values.size == 0 or values[0] == 0:
        return 0
    return int(np.sum(values > rank_tol * values[0]))


def qr_rank(C, rank_tol=None):
    """ numerical rank from a column pivoted QR factorization """
    rank_tol = rank_tol if rank_tol is not None else solver_setting('RANK_TOL')
    C = _dense(C)
    if C.size == 0:
        return 0
    R = linalg.qr(C, mode='r', pivoting=True)[0]
    diagonal = np.abs(np.diag(R))
    if diagonal.size == 0 or diagonal[0] == 0:
        return 0
    return int(np.sum(diagonal > rank_tol * diagonal[0]))


def null_space_basis(C, rank_tol=None):
    """ orthonormal basis of {x : C x = 0} as columns """
    rank_tol = rank_tol if rank_tol is not None else solver_setting('RANK_TOL')
    C = np.atleast_2d(_dense(C))
    n = C.shape[1]
    if C.shape[0] == 0:
        return np.eye(n)

    _, values, vt = linalg.svd(C, full_matrices=True)
    if values.size == 0 or values[0] == 0:
        return np.eye(n)
    rank = int(np.sum(values > rank_tol * values[0]))
    return _normalize_signs(vt[rank:].T.copy())


def smallest_right_singular_vectors(C, count):
    """ the `count` right singular directions of C with the smallest singular
    values, exact null directions first """
    C = np.atleast_2d(_dense(C))
    n = C.shape[1]
    _, values, vt = linalg.svd(C, full_matrices=True)
    # vt rows beyond len(values) are exact null directions
    padded = np.concatenate((values, np.zeros(n - len(values))))
    order = np.argsort(padded, kind='stable')[:count]
    return _normalize_signs(vt[order].T.copy()), padded[order]
