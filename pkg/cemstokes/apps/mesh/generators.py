import logging

import numpy as np
from scipy import ndimage, sparse

from .exceptions import (
    DisconnectedBlock, DisconnectedDomain, EmptyDomain,
    IncompatibleRefinement, InvalidPerforation
)
from .models import CoarseGrid, PerforatedMesh, PerforationSpec

logger = logging.getLogger(__name__)


def rasterize(nx, spec):
    """ returns the active[iy, ix] mask: a cell is active iff its center is
    outside every perforation """
    centers = (np.arange(nx) + 0.5) / nx
    x, y = np.meshgrid(centers, centers)
    perforated = np.zeros((nx, nx), dtype=bool)

    for shape in spec.shapes:
        perforated |= shape.contains(x, y)

    return ~perforated


def _lattice_numbering(cells, nx, degree):
    """ compresses the lattice nodes touched by `cells` into 0..n-1

    Args:
        cells: flat indices iy*nx + ix of the active cells
        nx: cells per axis
        degree: 2 for the biquadratic nodes, 1 for the cell corners

    Returns: (incidence, coordinates) with the incidence in local order
    degree+1 * ly + lx
    """
    ix, iy = cells % nx, cells // nx
    width = degree * nx + 1
    local = np.arange(degree + 1)
    ly, lx = np.meshgrid(local, local, indexing='ij')
    rows = degree * iy[:, None] + ly.ravel()[None, :]
    cols = degree * ix[:, None] + lx.ravel()[None, :]
    lattice = rows * width + cols

    used, incidence = np.unique(lattice, return_inverse=True)
    incidence = incidence.reshape(lattice.shape)

    spacing = 1.0 / (degree * nx)
    coords = np.column_stack((used % width, used // width)) * spacing

    return incidence, coords


def build_fine_grid(nx, spec=None):
    """ builds the perforated fine grid over the unit square

    Args:
        nx: cells per axis (the grid is nx by nx)
        spec: PerforationSpec, None for the plain unit square

    Returns: PerforatedMesh
    """
    spec = spec if spec is not None else PerforationSpec()

    if int(nx) != nx or nx < 4:
        raise InvalidPerforation('nx must be an integer of at least 4.', nx=nx)
    nx = int(nx)

    for position, shape in enumerate(spec.shapes):
        if not shape.inside_unit_square():
            raise InvalidPerforation(shape=position)

    active = rasterize(nx, spec)

    if not active.any():
        raise EmptyDomain(nx=nx)

    # edge connectivity: the default structuring element is the cross
    _, components = ndimage.label(active)
    if components > 1:
        raise DisconnectedDomain(components=int(components))

    cells = np.flatnonzero(active.ravel())
    cell_nodes, node_coords = _lattice_numbering(cells, nx, 2)
    cell_vertices, vertex_coords = _lattice_numbering(cells, nx, 1)

    logger.info('fine grid %dx%d: %d of %d cells active',
                nx, nx, len(cells), nx * nx)

    return PerforatedMesh(
        nx=nx, ny=nx, h=1.0 / nx, active=active, cells=cells,
        node_coords=node_coords, cell_nodes=cell_nodes,
        vertex_coords=vertex_coords, cell_vertices=cell_vertices, spec=spec
    )


def build_coarse_grid(mesh, Nx):
    """ agglomerates the active fine cells into Nx by Nx coarse blocks

    Blocks without active cells are dropped and recorded. A block that a
    perforation splits into several parts is rejected.
    """
    if int(Nx) != Nx or Nx < 1 or mesh.nx % Nx != 0:
        raise IncompatibleRefinement(nx=mesh.nx, Nx=Nx)
    Nx = int(Nx)
    ratio = mesh.nx // Nx

    ij = mesh.cell_ij
    coarse_id = (ij[:, 1] // ratio) * Nx + ij[:, 0] // ratio

    elements, positions, dropped = [], [], []
    cell_owner = np.full(mesh.n_cells, -1, dtype=np.int64)

    for block in range(Nx * Nx):
        position = (block % Nx, block // Nx)
        members = np.flatnonzero(coarse_id == block)

        if len(members) == 0:
            dropped.append(position)
            continue

        # connectivity of the block's own active cells
        IX, IY = position
        local = mesh.active[IY * ratio:(IY + 1) * ratio,
                            IX * ratio:(IX + 1) * ratio]
        _, parts = ndimage.label(local)
        if parts > 1:
            raise DisconnectedBlock(block=list(position), parts=int(parts))

        cell_owner[members] = len(elements)
        elements.append(members)
        positions.append(position)

    # two blocks are neighbours when they share at least one fine node
    incidence = sparse.csr_matrix((
        np.ones(mesh.cell_vertices.size),
        (np.repeat(cell_owner, 4), mesh.cell_vertices.ravel())
    ), shape=(len(elements), len(mesh.vertex_coords)))
    incidence.data[:] = 1.0
    shared = (incidence @ incidence.T).tocsr()
    adjacency = tuple(
        frozenset(int(j) for j in shared[i].indices if j != i)
        for i in range(len(elements))
    )

    grid_points = np.arange(Nx + 1) / Nx
    gx, gy = np.meshgrid(grid_points, grid_points)
    vertices = np.column_stack((gx.ravel(), gy.ravel()))

    if dropped:
        logger.info('coarse grid %dx%d: dropped %d perforated blocks',
                    Nx, Nx, len(dropped))

    return CoarseGrid(
        mesh=mesh, Nx=Nx, Ny=Nx, H=1.0 / Nx, elements=tuple(elements),
        positions=tuple(positions), dropped=tuple(dropped),
        vertices=vertices, elem_adjacency=adjacency, cell_owner=cell_owner
    )


def oversample_region(grid, i, k):
    """ returns K_{i,k}: K_i enlarged by k layers of node-sharing blocks """
    if not 0 <= i < grid.N:
        raise IndexError('coarse element {} does not exist'.format(i))

    region = {i}
    for _ in range(int(k)):
        grown = set(region)
        for element in region:
            grown |= grid.elem_adjacency[element]
        if grown == region:
            break
        region = grown

    return frozenset(region)


def saturation_layers(grid, i):
    """ smallest k with K_{i,k} covering every retained block """
    k = 0
    while len(oversample_region(grid, i, k)) < grid.N:
        k += 1
    return k
