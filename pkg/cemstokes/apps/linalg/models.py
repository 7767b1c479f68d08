from dataclasses import dataclass
from typing import Any, Optional

import numpy as np
from scipy import sparse


@dataclass(frozen=True, eq=False)
class SaddleSystem:
    """
    Symmetric saddle point problem

        [ A + P^T P   B^T   0   ] [u]   [rhs_u]
        [ B           0     M^T ] [p] = [rhs_p]
        [ 0           M     0   ] [m]   [  0  ]

    The low-rank term P^T P is never formed: P enters through extra unknowns
    z = P u, which keeps the assembled matrix as sparse as A. `mean_rows`
    holds one row per zero-mean constraint on p. Right-hand sides may have
    several columns.
    """
    A: Any
    B: Any
    rhs_u: np.ndarray
    rhs_p: Optional[np.ndarray] = None
    mean_rows: Optional[np.ndarray] = None
    low_rank: Optional[Any] = None

    @property
    def n_u(self):
        return self.A.shape[0]

    @property
    def n_p(self):
        return self.B.shape[0]

    @property
    def n_low_rank(self):
        return 0 if self.low_rank is None else self.low_rank.shape[0]

    @property
    def n_mean(self):
        return 0 if self.mean_rows is None else np.atleast_2d(self.mean_rows).shape[0]

    @property
    def size(self):
        return self.n_u + self.n_low_rank + self.n_p + self.n_mean

    def matrix(self):
        """ the assembled symmetric block matrix in (u, z, p, m) order """
        r, k = self.n_low_rank, self.n_mean
        A = sparse.csr_matrix(self.A)
        B = sparse.csr_matrix(self.B)
        P = sparse.csr_matrix(self.low_rank) if r else None
        M = sparse.csr_matrix(np.atleast_2d(self.mean_rows)) if k else None

        names = ['u'] + (['z'] if r else []) + ['p'] + (['m'] if k else [])
        entries = {('u', 'u'): A, ('u', 'p'): B.T, ('p', 'u'): B}
        if r:
            entries.update({('u', 'z'): P.T, ('z', 'u'): P,
                            ('z', 'z'): -sparse.identity(r, format='csr')})
        if k:
            entries.update({('p', 'm'): M.T, ('m', 'p'): M})

        blocks = [[entries.get((row, column)) for column in names] for row in names]
        return sparse.bmat(blocks, format='csc')

    def rhs(self):
        rhs_u = np.asarray(self.rhs_u, dtype=float)
        tail = rhs_u.shape[1:]
        rhs_p = (np.zeros((self.n_p,) + tail) if self.rhs_p is None
                 else np.asarray(self.rhs_p, dtype=float).reshape((self.n_p,) + tail))
        return np.concatenate((
            rhs_u,
            np.zeros((self.n_low_rank,) + tail),
            rhs_p,
            np.zeros((self.n_mean,) + tail),
        ))

    def split(self, solution):
        """ (u, p, mean multipliers) from a solution of the assembled system """
        u_end = self.n_u
        p_start = u_end + self.n_low_rank
        p_end = p_start + self.n_p
        return solution[:u_end], solution[p_start:p_end], solution[p_end:]
