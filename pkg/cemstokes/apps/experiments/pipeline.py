"""
The experiment pipeline behind the management commands: one fine mesh and
reference solve, then coarse levels and sweep points on top of it.
"""
import logging
import threading
import time
from contextlib import contextmanager
from functools import cached_property

import numpy as np

from cemstokes.apps.auxiliary.spaces import (
    build_aux_space, build_QH, eigen_report, norm_inequality_violations
)
from cemstokes.apps.basis.cache import BasisCache
from cemstokes.apps.basis.cem import (
    decay_factor_bound, decay_profile, localization_error
)
from cemstokes.apps.core.concurrency import ordered_map
from cemstokes.apps.fem.assembly import FineOperators, build_pou, build_spaces
from cemstokes.apps.mesh.generators import (
    build_coarse_grid, build_fine_grid, oversample_region, saturation_layers
)
from cemstokes.apps.solver.coarse import solve_multiscale
from cemstokes.apps.solver.metrics import error_report, velocity_errors
from cemstokes.apps.solver.reference import solve_reference

from .exceptions import ConfigError
from .forcing import build_forcing

logger = logging.getLogger(__name__)


class Level:
    """ the coarse quantities of one Nx: grid, partition of unity, auxiliary
    velocity space and coarse pressure space """

    def __init__(self, experiment, Nx):
        self.Nx = Nx
        space = experiment.space
        self.grid = build_coarse_grid(experiment.mesh, Nx)
        self.pou = build_pou(self.grid, space)
        self.aux = build_aux_space(space, self.pou, experiment.config.ell,
                                   threads=experiment.threads)
        self.QH = build_QH(self.aux, threads=experiment.threads)


class Experiment:
    """
    Lazily built state shared by the sweep points of one configuration.
    `timings` collects wall-clock seconds per stage.
    """

    def __init__(self, config, threads=None):
        self.config = config
        self.threads = threads
        self.timings = {}
        self._timings_lock = threading.Lock()
        self.cache = BasisCache()
        self._levels = {}

    @contextmanager
    def timed(self, stage):
        start = time.perf_counter()
        yield
        elapsed = time.perf_counter() - start
        with self._timings_lock:
            self.timings[stage] = self.timings.get(stage, 0.0) + elapsed

    @cached_property
    def mesh(self):
        with self.timed('mesh'):
            return build_fine_grid(self.config.nx, self.config.spec)

    @cached_property
    def space(self):
        return build_spaces(self.mesh)

    @cached_property
    def operators(self):
        return FineOperators(self.space)

    @cached_property
    def forcing(self):
        return build_forcing(self.config.forcing)

    @cached_property
    def reference(self):
        with self.timed('reference'):
            return solve_reference(self.space, self.forcing.f, self.operators)

    def level(self, Nx):
        if Nx not in self._levels:
            with self.timed('auxiliary'):
                self._levels[Nx] = Level(self, Nx)
        return self._levels[Nx]

    def table(self, Nx, k):
        with self.timed('basis'):
            return self.cache.get(self.level(Nx).aux, k, threads=self.threads,
                                  operators=self.operators)

    def solve(self, Nx, k):
        """ multiscale solve and metrics record of one sweep point """
        level = self.level(Nx)
        table = self.table(Nx, k)
        with self.timed('coarse'):
            ms = solve_multiscale(table, level.QH, self.forcing.f, self.operators)
            metrics = error_report(self.reference, ms, self.forcing.f, self.operators)

        if self.config.compare_global:
            glo = solve_multiscale(self.table(Nx, None), level.QH, self.forcing.f,
                                   self.operators)
            metrics['err_glo_a'] = velocity_errors(self.space, level.pou, glo.u, ms.u)[0]
        return ms, metrics

    def prepare(self):
        """ builds everything the sweep points share, in a fixed order """
        self.reference
        for Nx in self.config.coarse:
            self.level(Nx)

    def sweep(self, concurrent=False):
        """ metrics of every (Nx, k) point in configuration order """
        self.prepare()
        points = self.config.points()
        threads = len(points) if concurrent else 1
        return ordered_map(lambda point: self.solve(*point)[1], points, threads)


def convergence_rates(rows, auto=False):
    """ observed rates between successive H levels of the same k setting
    (all rows together when k is chosen automatically)

    Rates are log2(err_coarse / err_fine) / log2(H_coarse / H_fine); equal H
    or a vanishing error give an empty rate.
    """
    rates = []
    previous = {}
    for row in rows:
        group = 'auto' if auto else repr(row['k'])
        before = previous.get(group)
        rate = np.nan
        if before is not None and before['H'] != row['H'] \
                and before['err_u_a'] > 0 and row['err_u_a'] > 0:
            rate = (np.log2(before['err_u_a'] / row['err_u_a'])
                    / np.log2(before['H'] / row['H']))
        rates.append(round(float(rate), 2) if np.isfinite(rate) else np.nan)
        previous[group] = row
    return rates


def pressure_constant(rows):
    """ C = err_p / err_u_a at the coarsest level and the ratio of every
    level's quotient to it """
    quotients = [row['err_p'] / row['err_u_a'] if row['err_u_a'] > 0 else np.nan
                 for row in rows]
    coarsest = int(np.argmax([row['H'] for row in rows]))
    C = quotients[coarsest]
    return C, [q / C if C and np.isfinite(C) and C > 0 else np.nan for q in quotients]


def default_decay_blocks(grid):
    """ up to three retained blocks around the domain center """
    middle = grid.Nx // 2
    wanted = [(middle - 1, middle - 1), (middle, middle - 1), (middle - 1, middle)]
    return [grid.positions.index(position) for position in wanted
            if position in grid.positions]


def decay_blocks(grid, blocks=None):
    """ the requested retained blocks, the central ones when none are named """
    if blocks is None:
        return default_decay_blocks(grid)
    unknown = [i for i in blocks if not 0 <= i < grid.N]
    if unknown:
        raise ConfigError('decay blocks are not retained blocks of the coarse grid',
                          Nx=grid.Nx, blocks=unknown, retained=grid.N)
    return list(blocks)


def decay_rows(experiment, Nx, blocks=None):
    """ exterior energies of the global basis functions of some blocks """
    level = experiment.level(Nx)
    table = experiment.table(Nx, None)
    blocks = decay_blocks(level.grid, blocks)

    rows = []
    for i in blocks:
        IX, IY = level.grid.positions[i]
        for j in range(level.aux.blocks[i].ell):
            profile = decay_profile(level.aux, table.get(i, j), i)
            for m, value in profile:
                before = profile[m - 1][1] if m > 0 else np.nan
                rows.append({'block': i, 'IX': IX, 'IY': IY, 'mode': j + 1, 'm': m,
                             'exterior_energy': value,
                             'ratio': before / value if value > 0 else np.nan})
    return rows


def localization_rows(experiment, Nx, blocks=None, layers=(1, 2, 3, 4)):
    """ ||psi - psi_ms|| for the k-layer bases next to the factor bound """
    level = experiment.level(Nx)
    aux = level.aux
    glo = experiment.table(Nx, None)
    blocks = decay_blocks(level.grid, blocks)

    rows = []
    for k in layers:
        table = experiment.table(Nx, k)
        for i in blocks:
            for j in range(aux.blocks[i].ell):
                energy, mass = localization_error(aux, glo.get(i, j), table.get(i, j),
                                                  experiment.operators)
                rows.append({'block': i, 'mode': j + 1, 'k': k,
                             'region_blocks': len(oversample_region(level.grid, i, k)),
                             'saturation': saturation_layers(level.grid, i),
                             'err_a': energy, 'err_s': mass,
                             'bound': decay_factor_bound(aux.Lambda, k)})
    return rows


def eigen_rows(level):
    return eigen_report(level.aux, level.QH)


def eigen_summary(level):
    return {
        'Nx': level.Nx,
        'lambda_min_excluded': level.aux.Lambda,
        'gamma': level.aux.Gamma,
        'n_aux': level.aux.n_aux,
        'n_QH': level.QH.n,
        'dropped': [list(position) for position in level.grid.dropped],
    }


def inequality_checks(level, seed, samples=50):
    return norm_inequality_violations(level.aux, np.random.RandomState(seed), samples)


def field_dump(experiment, ms):
    """ fine fields in the documented ordering: velocity component-major over
    the lexicographic nodes, pressures on the bilinear nodes """
    space = experiment.space
    QH = ms.QH
    return {
        'node_coords': space.mesh.node_coords,
        'vertex_coords': space.mesh.vertex_coords,
        'u_h': experiment.reference.u_full,
        'p_h': experiment.reference.p,
        'u_ms': ms.u_full,
        'p_ms': {
            'vertices': np.concatenate([block.vertices for block in QH.blocks]),
            'offsets': QH.offsets,
            'values': ms.p,
        },
    }
