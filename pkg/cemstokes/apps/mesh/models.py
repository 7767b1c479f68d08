import hashlib
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Circle:
    """ circular perforation, all values in domain units """
    cx: float
    cy: float
    r: float

    kind = 'circle'

    def contains(self, x, y):
        # strict test: a cell whose center lies on the rim stays active
        return (x - self.cx) ** 2 + (y - self.cy) ** 2 < self.r ** 2

    def inside_unit_square(self):
        return (self.r > 0
                and self.cx - self.r > 0 and self.cx + self.r < 1
                and self.cy - self.r > 0 and self.cy + self.r < 1)


@dataclass(frozen=True)
class Rect:
    """ axis aligned rectangular perforation (x0, y0) - (x1, y1) """
    x0: float
    y0: float
    x1: float
    y1: float

    kind = 'rect'

    def contains(self, x, y):
        return (x > self.x0) & (x < self.x1) & (y > self.y0) & (y < self.y1)

    def inside_unit_square(self):
        return 0 < self.x0 < self.x1 < 1 and 0 < self.y0 < self.y1 < 1


@dataclass(frozen=True)
class PerforationSpec:
    """
    The set of perforations removed from the unit square. Shapes may overlap;
    only the rasterized active region has to stay connected.
    """
    shapes: tuple = ()

    def as_dict(self):
        shapes = []
        for shape in self.shapes:
            entry = {'kind': shape.kind}
            entry.update(shape.__dict__)
            shapes.append(entry)
        return {'shapes': shapes}


@dataclass(frozen=True, eq=False)
class PerforatedMesh:
    """
    Structured fine grid over [0,1]^2 with a perforation mask.

    `active` is indexed as active[iy, ix]. Active cells are numbered in
    lexicographic order (x fastest); `cell_nodes` holds the 9 biquadratic
    nodes of every active cell (local order 3*ly + lx) and `cell_vertices`
    the 4 bilinear corner nodes (local order 2*ly + lx). Only nodes touched
    by an active cell exist.
    """
    nx: int
    ny: int
    h: float
    active: np.ndarray
    cells: np.ndarray
    node_coords: np.ndarray
    cell_nodes: np.ndarray
    vertex_coords: np.ndarray
    cell_vertices: np.ndarray
    spec: PerforationSpec = field(default_factory=PerforationSpec)

    @property
    def n_cells(self):
        return len(self.cells)

    @property
    def cell_ij(self):
        """ (ix, iy) lattice position of every active cell """
        return np.column_stack((self.cells % self.nx, self.cells // self.nx))

    @property
    def cell_origins(self):
        """ lower left corner of every active cell """
        return self.cell_ij * self.h

    @property
    def area(self):
        return self.n_cells * self.h * self.h

    @property
    def digest(self):
        # used as the basis cache key together with the coarse parameters
        sha = hashlib.sha256()
        sha.update(np.array([self.nx, self.ny], dtype=np.int64).tobytes())
        sha.update(np.ascontiguousarray(self.active, dtype=np.uint8).tobytes())
        return sha.hexdigest()


@dataclass(frozen=True, eq=False)
class CoarseGrid:
    """
    Partition of the active fine cells into coarse blocks K_i.

    `elements[i]` lists positions in `mesh.cells` belonging to K_i,
    `positions[i]` is the coarse lattice position (IX, IY) of K_i and
    `dropped` keeps the positions of fully perforated blocks.
    `vertices` are all (Nx+1)(Ny+1) coarse vertices in lexicographic order.
    """
    mesh: PerforatedMesh
    Nx: int
    Ny: int
    H: float
    elements: tuple
    positions: tuple
    dropped: tuple
    vertices: np.ndarray
    elem_adjacency: tuple
    cell_owner: np.ndarray

    @property
    def N(self):
        return len(self.elements)

    @property
    def ratio(self):
        """ fine cells per coarse cell along one axis """
        return self.mesh.nx // self.Nx

    def region_cells(self, region):
        """ sorted fine cell positions covered by a set of coarse elements """
        if not region:
            return np.zeros(0, dtype=np.int64)
        return np.sort(np.concatenate([self.elements[i] for i in region]))

    def region_mask(self, region):
        """ boolean mask over the active cells for a set of coarse elements """
        mask = np.zeros(self.mesh.n_cells, dtype=bool)
        for i in region:
            mask[self.elements[i]] = True
        return mask
