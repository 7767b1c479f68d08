import math
from dataclasses import dataclass, field
from typing import Any

# file written by every command for each output kind; None disables it
DEFAULT_OUTPUTS = {
    'metrics': 'metrics.json',
    'fields': 'fields.json',
    'eigen': 'eigen.csv',
    'convergence': 'convergence.csv',
    'decay': 'decay.csv',
    'localization': 'localization.csv',
    'eigreport': 'eigreport.csv',
    'eigen_summary': 'eigen_summary.json',
}


@dataclass(frozen=True)
class ExperimentConfig:
    """
    A validated experiment document.

    `k` is "auto" or a tuple of layer counts; "auto" picks
    ceil(k_factor * log2(Nx)) layers on every coarse level.
    """
    nx: int
    spec: Any
    coarse: tuple
    ell: int
    k: Any
    k_factor: float
    forcing: dict
    seed: int = 0
    outputs: dict = field(default_factory=lambda: dict(DEFAULT_OUTPUTS))
    record_timings: bool = False
    tolerances: dict = field(default_factory=dict)
    compare_global: bool = False
    decay_blocks: Any = None
    decay_layers: tuple = (1, 2, 3, 4)

    def layers(self, Nx):
        """ oversampling layers used on the coarse level Nx """
        if self.k == 'auto':
            return (max(0, math.ceil(self.k_factor * math.log2(Nx))),)
        return tuple(self.k)

    def points(self):
        """ the (Nx, k) sweep points in order """
        return [(Nx, k) for Nx in self.coarse for k in self.layers(Nx)]

    def output(self, name):
        return self.outputs.get(name)
