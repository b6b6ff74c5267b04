"""Structured triangular meshes of the unit square and uniform refinement.

The coarsest grids are "crossed" meshes: an n x n quadrilateral grid where
each quad is cut into 4 triangles by inserting its center point.  Finer
grids come from red (4-way) refinement with edge-midpoint insertion, which
keeps the P1/P2 spaces on consecutive levels nested.
"""

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Mesh2D",
    "MeshHierarchy",
    "build_crossed_grid",
    "refine_uniform",
    "vertex_star_closure",
    "build_hierarchy",
    "dump_mesh",
]


@dataclass(frozen=True)
class Mesh2D:
    """Immutable triangle mesh of a planar, simply connected domain.

    Attributes
    ----------
    vertices : (V, 2) float array
        Vertex coordinates.
    cells : (C, 3) int array
        Counterclockwise vertex triples.
    edges : (E, 2) int array
        Canonical (min, max) vertex pairs, sorted lexicographically.
    cell_to_edges : (C, 3) int array
        Edge index opposite each local vertex: local edge k spans the two
        cell vertices other than local vertex k.
    boundary_vertex_flags, boundary_edge_flags : bool arrays
        Boundary status detected by edge incidence count.
    """

    vertices: np.ndarray
    cells: np.ndarray
    edges: np.ndarray = field(init=False, default=None)
    cell_to_edges: np.ndarray = field(init=False, default=None)
    boundary_vertex_flags: np.ndarray = field(init=False, default=None)
    boundary_edge_flags: np.ndarray = field(init=False, default=None)

    def __post_init__(self):
        verts = np.ascontiguousarray(np.asarray(self.vertices, dtype=float))
        cells = np.ascontiguousarray(np.asarray(self.cells, dtype=np.int64))
        if verts.ndim != 2 or verts.shape[1] != 2:
            raise ValueError("vertices must be a (V, 2) array")
        if cells.ndim != 2 or cells.shape[1] != 3:
            raise ValueError("cells must be a (C, 3) array")
        if cells.size and (cells.min() < 0 or cells.max() >= len(verts)):
            raise ValueError("cell vertex index out of range")
        areas = _signed_areas(verts, cells)
        if np.any(areas <= 0.0):
            raise ValueError("all cells must be counterclockwise with positive area")

        # Local edge k is opposite local vertex k.
        pairs = np.sort(cells[:, [[1, 2], [2, 0], [0, 1]]].reshape(-1, 2), axis=1)
        edges, inverse = np.unique(pairs, axis=0, return_inverse=True)
        cell_to_edges = inverse.reshape(-1, 3)

        counts = np.bincount(inverse, minlength=len(edges))
        if np.any(counts > 2):
            raise ValueError("edge shared by more than two cells")
        bedge = counts == 1
        bvert = np.zeros(len(verts), dtype=bool)
        bvert[edges[bedge].ravel()] = True

        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "cell_to_edges", cell_to_edges)
        object.__setattr__(self, "boundary_vertex_flags", bvert)
        object.__setattr__(self, "boundary_edge_flags", bedge)
        object.__setattr__(self, "_vertex_to_cells", _incidence(cells, len(verts)))

    @property
    def num_vertices(self):
        return len(self.vertices)

    @property
    def num_edges(self):
        return len(self.edges)

    @property
    def num_cells(self):
        return len(self.cells)

    def cell_areas(self):
        return _signed_areas(self.vertices, self.cells)

    def cells_at_vertex(self, v):
        """Indices of the cells containing vertex ``v``."""
        if not 0 <= v < self.num_vertices:
            raise IndexError(f"vertex index {v} out of range")
        starts, items = self._vertex_to_cells
        return items[starts[v]:starts[v + 1]]


@dataclass(frozen=True)
class MeshHierarchy:
    """Nested meshes from coarsest to finest with refinement lineage.

    ``vertex_parent_vertex[k]`` maps fine vertices of ``levels[k+1]`` that
    coincide with coarse vertices (always the leading block, identically),
    ``vertex_parent_edge[k]`` gives, for each midpoint vertex, the coarse
    edge it bisects, and ``cell_parent[k]`` the coarse cell of each child.
    """

    levels: tuple
    vertex_parent_edge: tuple
    cell_parent: tuple

    @property
    def num_levels(self):
        return len(self.levels)

    def finest(self):
        return self.levels[-1]


def _signed_areas(verts, cells):
    p = verts[cells]
    a = p[:, 1] - p[:, 0]
    b = p[:, 2] - p[:, 0]
    return 0.5 * (a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0])


def _incidence(cells, nv):
    """CSR-style vertex -> cells adjacency."""
    order = np.argsort(cells.ravel(), kind="stable")
    items = np.repeat(np.arange(len(cells)), 3)[order]
    counts = np.bincount(cells.ravel(), minlength=nv)
    starts = np.concatenate(([0], np.cumsum(counts)))
    return starts, items


def build_crossed_grid(n):
    """Crossed-triangle mesh of the unit square.

    Each cell of a uniform n x n quadrilateral grid is cut into 4 triangles
    by an added center vertex.  Vertices are ordered grid points first
    (y-major) then cell centers, giving (n+1)^2 + n^2 vertices and 4 n^2
    cells.
    """
    n = int(n)
    if n < 1:
        raise ValueError(f"cells-per-side must be >= 1, got {n}")
    grid = np.linspace(0.0, 1.0, n + 1)
    gx, gy = np.meshgrid(grid, grid, indexing="xy")
    corners = np.column_stack([gx.ravel(), gy.ravel()])  # index j*(n+1)+i
    mid = 0.5 * (grid[:-1] + grid[1:])
    cx, cy = np.meshgrid(mid, mid, indexing="xy")
    centers = np.column_stack([cx.ravel(), cy.ravel()])
    verts = np.vstack([corners, centers])

    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="xy")
    i, j = i.ravel(), j.ravel()
    v00 = j * (n + 1) + i
    v10 = v00 + 1
    v01 = v00 + (n + 1)
    v11 = v01 + 1
    c = (n + 1) ** 2 + j * n + i
    cells = np.empty((4 * n * n, 3), dtype=np.int64)
    cells[0::4] = np.column_stack([v00, v10, c])
    cells[1::4] = np.column_stack([v10, v11, c])
    cells[2::4] = np.column_stack([v11, v01, c])
    cells[3::4] = np.column_stack([v01, v00, c])
    return Mesh2D(verts, cells)


def refine_uniform(mesh):
    """Split every triangle into 4 congruent children via edge midpoints.

    Returns
    -------
    fine : Mesh2D
        Coarse vertices keep their indices and coordinates; midpoint
        vertex ``V + e`` bisects coarse edge ``e``.
    parent_edge : (E,) int array
        Coarse edge index of each new vertex.
    cell_parent : (4C,) int array
        Coarse cell of each child.
    """
    V = mesh.num_vertices
    mids = 0.5 * (mesh.vertices[mesh.edges[:, 0]] + mesh.vertices[mesh.edges[:, 1]])
    verts = np.vstack([mesh.vertices, mids])

    v0, v1, v2 = mesh.cells.T
    m0, m1, m2 = (V + mesh.cell_to_edges).T  # m_k opposite vertex k
    C = mesh.num_cells
    cells = np.empty((4 * C, 3), dtype=np.int64)
    cells[0::4] = np.column_stack([v0, m2, m1])
    cells[1::4] = np.column_stack([v1, m0, m2])
    cells[2::4] = np.column_stack([v2, m1, m0])
    cells[3::4] = np.column_stack([m0, m1, m2])
    fine = Mesh2D(verts, cells)
    parent_edge = np.arange(mesh.num_edges, dtype=np.int64)
    cell_parent = np.repeat(np.arange(C, dtype=np.int64), 4)
    return fine, parent_edge, cell_parent


def build_hierarchy(n0, l):
    """Uniform-refinement hierarchy: ``l`` refinements of a crossed n0 grid."""
    if l < 0:
        raise ValueError(f"refinement count must be >= 0, got {l}")
    levels = [build_crossed_grid(n0)]
    parent_edges, cell_parents = [], []
    for _ in range(l):
        fine, pe, cp = refine_uniform(levels[-1])
        levels.append(fine)
        parent_edges.append(pe)
        cell_parents.append(cp)
    return MeshHierarchy(tuple(levels), tuple(parent_edges), tuple(cell_parents))


def vertex_star_closure(mesh, v):
    """Closure of the cells adjacent to vertex ``v``.

    Returns (cell indices, vertex indices, edge indices), each sorted.
    """
    cells = mesh.cells_at_vertex(v)
    vset = np.unique(mesh.cells[cells])
    eset = np.unique(mesh.cell_to_edges[cells])
    return np.sort(cells), vset, eset


def dump_mesh(mesh, path):
    """Plain-text mesh dump: header 'V E C', then coordinates, edges, cells."""
    with open(path, "w") as fh:
        fh.write(f"{mesh.num_vertices} {mesh.num_edges} {mesh.num_cells}\n")
        for x, y in mesh.vertices:
            fh.write(f"{x:.17g} {y:.17g}\n")
        for a, b in mesh.edges:
            fh.write(f"{a} {b}\n")
        for a, b, c in mesh.cells:
            fh.write(f"{a} {b} {c}\n")
