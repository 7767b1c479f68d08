from dataclasses import dataclass, field
from typing import Any

import numpy as np


@dataclass(frozen=True, eq=False)
class ReferenceSolution:
    """
    Fine Taylor-Hood solution. `u` holds the free velocity values, `p` the
    continuous pressure on the bilinear nodes with zero mean.
    """
    space: Any
    u: np.ndarray
    p: np.ndarray

    @property
    def u_full(self):
        return self.space.to_full(self.u)


@dataclass(frozen=True, eq=False)
class MsSolution:
    """
    Multiscale solution u_ms = sum c_ij psi_ij and its recovered pressure.

    `p` lives on the broken pressure numbering of `QH` (one copy of the
    bilinear nodes per coarse block). `lstsq` is set when the pressure
    system had to be solved in the least squares sense.
    """
    table: Any
    QH: Any
    coefficients: np.ndarray
    u: np.ndarray
    pressure_coefficients: np.ndarray
    p: np.ndarray
    lstsq: bool = False
    pressure_singular_value: float = field(default=float('nan'))

    @property
    def aux(self):
        return self.table.aux

    @property
    def space(self):
        return self.table.aux.space

    @property
    def u_full(self):
        return self.space.to_full(self.u)

    @property
    def n_ms(self):
        return len(self.coefficients)
