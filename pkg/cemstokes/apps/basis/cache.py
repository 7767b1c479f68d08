"""
Basis tables kept in memory between sweep points and, optionally, on disk.
"""
import hashlib
import logging
import os
import threading

import numpy as np
from cachetools import LRUCache

from cemstokes.apps.core.conf import solver_setting

from .cem import compute_basis_table
from .models import BasisTable, CemBasisFunction

logger = logging.getLogger(__name__)

GLOBAL = -1


def _layers_key(k, N):
    if k is None:
        return 'global'
    if np.isscalar(k):
        return (int(k),) * N
    return tuple(None if layer is None else int(layer) for layer in k)


def table_key(aux, k):
    """ (mesh hash, Nx, ell, quadrature order, k) """
    return (aux.space.mesh.digest, aux.grid.Nx, aux.ell,
            aux.space.quadrature_order, _layers_key(k, aux.grid.N))


def _pack(arrays, dtype):
    offsets = np.concatenate(([0], np.cumsum([len(a) for a in arrays]))).astype(np.int64)
    values = np.concatenate(arrays).astype(dtype) if arrays else np.zeros(0, dtype)
    return offsets, values


def _unpack(offsets, values, n):
    return values[offsets[n]:offsets[n + 1]]


def export_table(table, path):
    """ writes a basis table as a compressed npz container

    Every per-function array is stored concatenated with an offsets array;
    k = -1 marks a global basis function.
    """
    functions = table.functions
    payload = {
        'i': np.array([psi.i for psi in functions], dtype=np.int64),
        'j': np.array([psi.j for psi in functions], dtype=np.int64),
        'k': np.array([GLOBAL if psi.k is None else psi.k for psi in functions],
                      dtype=np.int64),
        'n_u': np.array(table.aux.space.n_u),
    }
    for name, dtype in (('region', np.int64), ('dofs', np.int64), ('values', float),
                        ('vertices', np.int64), ('multiplier', float)):
        arrays = [np.asarray(sorted(psi.region) if name == 'region' else getattr(psi, name))
                  for psi in functions]
        payload[name + '_offsets'], payload[name] = _pack(arrays, dtype)

    np.savez_compressed(path, **payload)
    logger.info('exported %d basis functions to %s', len(functions), path)


def load_table(aux, path, k):
    """ reads a container written by export_table for the given auxiliary space """
    with np.load(path) as payload:
        if int(payload['n_u']) != aux.space.n_u:
            raise ValueError('basis container {} belongs to another mesh'.format(path))
        data = {name: payload[name] for name in payload.files}

    def part(name, n):
        return _unpack(data[name + '_offsets'], data[name], n)

    functions = tuple(
        CemBasisFunction(
            i=int(data['i'][n]), j=int(data['j'][n]),
            k=None if data['k'][n] == GLOBAL else int(data['k'][n]),
            region=frozenset(int(block) for block in part('region', n)),
            dofs=part('dofs', n), values=part('values', n),
            vertices=part('vertices', n), multiplier=part('multiplier', n),
        )
        for n in range(len(data['i']))
    )
    return BasisTable(aux=aux, k=k, functions=functions)


class BasisCache:
    """
    LRU cache of basis tables keyed by table_key. With a directory, misses
    are looked up on disk before being computed and new tables are written
    there.
    """

    def __init__(self, maxsize=None, directory=None):
        self.maxsize = maxsize or solver_setting('BASIS_CACHE_SIZE')
        self.directory = directory
        self._tables = LRUCache(maxsize=self.maxsize)
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def path(self, key):
        digest = hashlib.sha256(repr(key).encode()).hexdigest()[:24]
        return os.path.join(self.directory, 'basis-{}.npz'.format(digest))

    def get(self, aux, k, threads=None, operators=None):
        key = table_key(aux, k)
        with self._lock:
            table = self._tables.get(key)
            if table is not None:
                self.hits += 1
                return table
            self.misses += 1

        table = None
        if self.directory and os.path.exists(self.path(key)):
            table = load_table(aux, self.path(key), k)
            logger.debug('basis table loaded from %s', self.path(key))

        if table is None:
            table = compute_basis_table(aux, k, threads=threads, operators=operators)
            if self.directory:
                os.makedirs(self.directory, exist_ok=True)
                export_table(table, self.path(key))

        with self._lock:
            self._tables[key] = table
        return table

    def clear(self):
        with self._lock:
            self._tables.clear()
            self.hits = self.misses = 0


_cache = None
_cache_lock = threading.Lock()


def basis_cache():
    """ the process-wide cache, built from the CEM_SOLVER settings on first use """
    global _cache
    with _cache_lock:
        if _cache is None:
            _cache = BasisCache(directory=solver_setting('BASIS_CACHE_DIR'))
        return _cache
