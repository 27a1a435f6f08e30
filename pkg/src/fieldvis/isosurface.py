"""Marching-cubes isosurface extraction over uniform grids.

The classical 256-case table drives per-cell triangulation; vertices are
welded by construction: each crossing grid edge is enumerated globally and
contributes exactly one vertex, so shared cell faces never duplicate points.
Extraction is deterministic (pure array arithmetic in fixed order).

Tie rule: node values exactly equal to the level count as "below"; strictly
greater is "above".
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._mc_tables import EDGE_TABLE, TRI_TABLE
from .fields import ScalarField

# local edge -> (axis, node offset of the edge's low corner)
_EDGE_AXIS = np.array([0, 1, 0, 1, 0, 1, 0, 1, 2, 2, 2, 2])
_EDGE_OFFSET = np.array([
    [0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 0],
    [0, 0, 1], [1, 0, 1], [0, 1, 1], [0, 0, 1],
    [0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0],
])

_DEGENERATE_AREA = 1e-12
_TINY_GRADIENT = 1e-30


@dataclass(frozen=True)
class TriangleMesh:
    """Indexed triangles with per-vertex unit normals."""

    positions: np.ndarray  # (v, 3) world units
    normals: np.ndarray  # (v, 3) unit length
    indices: np.ndarray  # (t, 3) into positions
    scalar_level: float | None = None

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=np.float64).reshape(-1, 3)
        nrm = np.asarray(self.normals, dtype=np.float64).reshape(-1, 3)
        idx = np.asarray(self.indices, dtype=np.int64).reshape(-1, 3)
        if len(pos) != len(nrm):
            raise ValueError("positions and normals must have equal length")
        if len(idx) and (idx.min() < 0 or idx.max() >= len(pos)):
            raise ValueError("triangle indices out of range")
        if len(nrm):
            lens = np.linalg.norm(nrm, axis=1)
            if np.abs(lens - 1.0).max() > 1e-6:
                raise ValueError("normals must be unit length")
        for a in (pos, nrm, idx):
            a.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "normals", nrm)
        object.__setattr__(self, "indices", idx)

    @property
    def n_vertices(self) -> int:
        return len(self.positions)

    @property
    def n_triangles(self) -> int:
        return len(self.indices)


def empty_mesh(level: float | None = None) -> TriangleMesh:
    return TriangleMesh(
        np.empty((0, 3)), np.empty((0, 3)), np.empty((0, 3), dtype=np.int64), level
    )


def _edge_vertex_data(values, grad, level, cross, axis, grid):
    """Positions and normals for every crossing grid edge along one axis."""
    nodes = np.argwhere(cross)  # low-corner node of each crossing edge
    if len(nodes) == 0:
        return np.empty((0, 3)), np.empty((0, 3))
    i, j, k = nodes[:, 0], nodes[:, 1], nodes[:, 2]
    hi = nodes.copy()
    hi[:, axis] += 1
    v0 = values[i, j, k]
    v1 = values[hi[:, 0], hi[:, 1], hi[:, 2]]
    mu = (level - v0) / (v1 - v0)

    origin = grid.bounds_min
    spacing = np.array(grid.spacing)
    pos = origin + nodes * spacing
    pos[:, axis] += mu * spacing[axis]

    g0 = np.stack([g[i, j, k] for g in grad], axis=1)
    g1 = np.stack([g[hi[:, 0], hi[:, 1], hi[:, 2]] for g in grad], axis=1)
    g = g0 + mu[:, None] * (g1 - g0)
    # orient toward decreasing scalar; unit fallback where the gradient vanishes
    glen = np.linalg.norm(g, axis=1)
    weak = glen < _TINY_GRADIENT
    g[weak] = [0.0, 0.0, -1.0]
    glen[weak] = 1.0
    normals = -g / glen[:, None]
    return pos, normals


def extract_isosurface(scalar: ScalarField, level: float) -> TriangleMesh:
    """Extract the level set of a scalar field as a welded triangle mesh.

    Per-vertex normals are the trilinearly interpolated central-difference
    gradient, normalized and oriented toward decreasing scalar.  An empty
    mesh is a valid result.
    """
    if not np.isfinite(level):
        raise ValueError("level must be finite")
    values = scalar.values
    grid = scalar.grid
    nx, ny, nz = grid.dims

    below = values <= level
    idx = np.zeros((nx - 1, ny - 1, nz - 1), dtype=np.int32)
    for c, (dx, dy, dz) in enumerate(
        [(0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 1, 0), (0, 0, 1), (1, 0, 1), (1, 1, 1), (0, 1, 1)]
    ):
        corner = below[dx : nx - 1 + dx, dy : ny - 1 + dy, dz : nz - 1 + dz]
        idx |= corner.astype(np.int32) << c

    active = EDGE_TABLE[idx] != 0
    if not active.any():
        return empty_mesh(float(level))

    # one welded vertex per crossing grid edge; enumerate x-, y-, then z-edges
    crosses = [
        below[:-1, :, :] != below[1:, :, :],
        below[:, :-1, :] != below[:, 1:, :],
        below[:, :, :-1] != below[:, :, 1:],
    ]
    grad = np.gradient(values, *grid.spacing)

    vid_maps = []
    positions = []
    normals = []
    base = 0
    for axis, cross in enumerate(crosses):
        vids = np.full(cross.shape, -1, dtype=np.int64)
        n = int(cross.sum())
        vids[cross] = base + np.arange(n)
        base += n
        vid_maps.append(vids)
        p, nrm = _edge_vertex_data(values, grad, level, cross, axis, grid)
        positions.append(p)
        normals.append(nrm)
    positions = np.concatenate(positions)
    normals = np.concatenate(normals)

    # map each active cell's 12 local edges to global vertex ids
    cells = np.argwhere(active)  # (m, 3) in C-order
    m = len(cells)
    cell_vids = np.empty((m, 12), dtype=np.int64)
    for e in range(12):
        node = cells + _EDGE_OFFSET[e]
        vm = vid_maps[_EDGE_AXIS[e]]
        cell_vids[:, e] = vm[node[:, 0], node[:, 1], node[:, 2]]

    rows = TRI_TABLE[idx[active]]  # (m, 16), -1 padded
    valid = rows >= 0
    vids = np.take_along_axis(cell_vids, np.where(valid, rows, 0), axis=1)
    tris = vids[valid].reshape(-1, 3)

    # drop zero-area slivers (level passing exactly through nodes)
    p0, p1, p2 = (positions[tris[:, i]] for i in range(3))
    area2 = np.linalg.norm(np.cross(p1 - p0, p2 - p0), axis=1)
    tris = tris[area2 > 2.0 * _DEGENERATE_AREA]

    return TriangleMesh(positions, normals, tris, float(level))


def slider_to_level(scalar_min: float, scalar_max: float, slider_pos: float) -> float:
    """Map a [0,1] slider position linearly onto a scalar range."""
    if scalar_min > scalar_max:
        raise ValueError("scalar_min must be <= scalar_max")
    return scalar_min + slider_pos * (scalar_max - scalar_min)
