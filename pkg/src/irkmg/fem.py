"""Taylor-Hood finite elements on triangle meshes.

Vector P2 velocity / scalar P1 pressure spaces, sparse assembly of the
mass, stiffness, pressure-coupling and convection blocks, nested-space
prolongation, Dirichlet elimination with symmetric lifting, and L2 error
norms.  All assembly is vectorized over cells; matrices come back in CSR
form.

DoF conventions
---------------
P1 dofs are the mesh vertices.  P2 scalar dofs are vertices then edge
midpoints (dof ``V + e`` sits on edge ``e``).  Vector P2 interleaves the
two components per scalar node: scalar dof s owns global dofs 2s, 2s+1.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.sparse as sp

from .mesh import Mesh2D, MeshHierarchy
from .quadrature import p1_basis, p2_basis, triangle_rule

__all__ = [
    "DofMap",
    "BlockSystem",
    "DirichletSpec",
    "assemble_mass",
    "assemble_stiffness",
    "assemble_divergence",
    "assemble_convection",
    "assemble_blocks",
    "prolongation",
    "apply_dirichlet",
    "eliminate",
    "interpolate",
    "l2_error",
    "function_mean",
    "count_dofs",
    "velocity_boundary_dofs",
    "dump_matrix",
]

# Quadrature degrees chosen to be exact for the (polynomial) integrands.
DEG_MASS = 4
DEG_STIFFNESS = 2
DEG_DIVERGENCE = 3
DEG_CONVECTION = 5
DEG_ERROR = 8


@dataclass(frozen=True)
class DofMap:
    """Global dof numbering for one field on one mesh."""

    mesh: Mesh2D
    kind: str  # "p1" | "p2" | "p2v"
    cell_dofs: np.ndarray = field(init=False, default=None)
    n_dofs: int = field(init=False, default=0)

    def __post_init__(self):
        mesh = self.mesh
        V, E = mesh.num_vertices, mesh.num_edges
        if self.kind == "p1":
            cd = mesh.cells.copy()
            n = V
        elif self.kind in ("p2", "p2v"):
            cd = np.hstack([mesh.cells, V + mesh.cell_to_edges])
            n = V + E
            if self.kind == "p2v":
                cd = np.stack([2 * cd, 2 * cd + 1], axis=2).reshape(len(cd), -1)
                n = 2 * n
        else:
            raise ValueError(f"unknown space kind {self.kind!r}")
        object.__setattr__(self, "cell_dofs", cd)
        object.__setattr__(self, "n_dofs", int(n))

    def scalar_node_coords(self):
        """Coordinates of the scalar nodes backing this space."""
        mesh = self.mesh
        if self.kind == "p1":
            return mesh.vertices
        mids = 0.5 * (mesh.vertices[mesh.edges[:, 0]] + mesh.vertices[mesh.edges[:, 1]])
        return np.vstack([mesh.vertices, mids])


@dataclass
class BlockSystem:
    """Assembled Stokes blocks on one mesh level (no boundary elimination)."""

    M: sp.csr_matrix  # velocity mass
    K: sp.csr_matrix  # velocity stiffness (times viscosity)
    B: sp.csr_matrix  # pressure-gradient coupling, n_u rows x n_p cols

    @property
    def n_u(self):
        return self.M.shape[0]

    @property
    def n_p(self):
        return self.B.shape[1]


@dataclass
class DirichletSpec:
    """Constrained velocity dofs with boundary data and its time derivative.

    ``g`` and ``g_t`` map (points (N, 2), t) to velocity values (N, 2).
    """

    dofs: np.ndarray
    g: Optional[Callable] = None
    g_t: Optional[Callable] = None

    def values(self, dofmap, t, deriv=False):
        """Boundary values (or their time derivative) on the constrained set."""
        func = self.g_t if deriv else self.g
        if func is None:
            return np.zeros(len(self.dofs))
        coords = dofmap.scalar_node_coords()
        scalar = self.dofs // 2
        comp = self.dofs % 2
        vals = func(coords[scalar], t)
        return vals[np.arange(len(self.dofs)), comp]


def _geometry(mesh):
    p = mesh.vertices[mesh.cells]  # (C, 3, 2)
    J = np.stack([p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]], axis=2)  # (C, 2, 2)
    detJ = J[:, 0, 0] * J[:, 1, 1] - J[:, 0, 1] * J[:, 1, 0]
    Jinv = np.empty_like(J)
    Jinv[:, 0, 0] = J[:, 1, 1]
    Jinv[:, 0, 1] = -J[:, 0, 1]
    Jinv[:, 1, 0] = -J[:, 1, 0]
    Jinv[:, 1, 1] = J[:, 0, 0]
    Jinv /= detJ[:, None, None]
    return p[:, 0], J, Jinv, detJ


def _scatter_matrix(vals, rows_dofs, cols_dofs, shape):
    nr, nc = rows_dofs.shape[1], cols_dofs.shape[1]
    rows = np.repeat(rows_dofs, nc, axis=1).ravel()
    cols = np.tile(cols_dofs, (1, nr)).ravel()
    A = sp.coo_matrix((vals.ravel(), (rows, cols)), shape=shape)
    return A.tocsr()


def _expand_vector(loc):
    """Scalar (C, a, b) local matrices -> interleaved 2-component blocks."""
    C, na, nb = loc.shape
    out = np.einsum("cab,de->cadbe", loc, np.eye(2))
    return out.reshape(C, 2 * na, 2 * nb)


def assemble_mass(mesh, dofmap, degree=DEG_MASS):
    """Vector P2 mass matrix <phi_j, phi_i>."""
    _check_pair(mesh, dofmap, "p2v")
    pts, w = triangle_rule(degree)
    phi, _ = p2_basis(pts)
    _, _, _, detJ = _geometry(mesh)
    ref = np.einsum("q,aq,bq->ab", w, phi, phi)
    loc = detJ[:, None, None] * ref
    locv = _expand_vector(loc)
    return _scatter_matrix(locv, dofmap.cell_dofs, dofmap.cell_dofs,
                           (dofmap.n_dofs, dofmap.n_dofs))


def assemble_stiffness(mesh, dofmap, mu=1.0, degree=DEG_STIFFNESS):
    """Vector P2 stiffness matrix mu * <grad phi_j, grad phi_i>."""
    _check_pair(mesh, dofmap, "p2v")
    pts, w = triangle_rule(degree)
    _, dphi = p2_basis(pts)
    _, _, Jinv, detJ = _geometry(mesh)
    G = np.einsum("aqe,ced->caqd", dphi, Jinv)
    loc = mu * np.einsum("q,caqd,cbqd->cab", w, G, G) * detJ[:, None, None]
    locv = _expand_vector(loc)
    return _scatter_matrix(locv, dofmap.cell_dofs, dofmap.cell_dofs,
                           (dofmap.n_dofs, dofmap.n_dofs))


def assemble_divergence(mesh, vel_dofmap, pres_dofmap, degree=DEG_DIVERGENCE):
    """Coupling block B with B[i, j] = -<psi_j, div phi_i>."""
    _check_pair(mesh, vel_dofmap, "p2v")
    _check_pair(mesh, pres_dofmap, "p1")
    pts, w = triangle_rule(degree)
    _, dphi = p2_basis(pts)
    psi, _ = p1_basis(pts)
    _, _, Jinv, detJ = _geometry(mesh)
    G = np.einsum("aqe,ced->caqd", dphi, Jinv)
    # rows 2a+d, cols b
    loc = -np.einsum("q,bq,caqd->cadb", w, psi, G) * detJ[:, None, None, None]
    C = len(detJ)
    loc = loc.reshape(C, 12, 3)
    return _scatter_matrix(loc, vel_dofmap.cell_dofs, pres_dofmap.cell_dofs,
                           (vel_dofmap.n_dofs, pres_dofmap.n_dofs))


def assemble_convection(mesh, dofmap, u, degree=DEG_CONVECTION, need="both"):
    """Convection residual N(u) and its Jacobian for vector P2.

    N(u)_i = <(u . grad) u, phi_i>; the Jacobian carries both advective
    derivative terms.  ``need`` selects "both", "residual" or "jacobian"
    (the unrequested part comes back as None).
    """
    if need not in ("both", "residual", "jacobian"):
        raise ValueError(f"unknown need {need!r}")
    _check_pair(mesh, dofmap, "p2v")
    u = np.asarray(u, dtype=float)
    if u.shape != (dofmap.n_dofs,):
        raise ValueError(f"velocity coefficient vector must have length {dofmap.n_dofs}")
    pts, w = triangle_rule(degree)
    phi, dphi = p2_basis(pts)
    _, _, Jinv, detJ = _geometry(mesh)
    G = np.einsum("aqe,ced->caqd", dphi, Jinv)

    uloc = u[dofmap.cell_dofs].reshape(-1, 6, 2)  # (C, a, comp)
    uq = np.einsum("cad,aq->cqd", uloc, phi)  # (C, Q, comp)
    gradu = np.einsum("cad,caqe->cqde", uloc, G)  # (C, Q, comp, deriv)
    C = len(detJ)

    N = None
    if need in ("both", "residual"):
        conv = np.einsum("cqe,cqde->cqd", uq, gradu)
        nloc = np.einsum("q,aq,cqd->cad", w, phi, conv,
                         optimize=True) * detJ[:, None, None]
        N = np.bincount(dofmap.cell_dofs.ravel(),
                        weights=nloc.reshape(C, 12).ravel(),
                        minlength=dofmap.n_dofs)
    if need == "residual":
        return N, None

    wphi2 = np.einsum("q,aq,bq->abq", w, phi, phi)
    term1 = np.einsum("abq,cqde->cadbe", wphi2, gradu)
    ugb = np.einsum("cqf,cbqf->cqb", uq, G)  # (u . grad) phi_b at quad points
    wugb = np.einsum("q,aq,cqb->cab", w, phi, ugb, optimize=True)
    term2 = np.einsum("cab,de->cadbe", wugb, np.eye(2))
    jloc = (term1 + term2) * detJ[:, None, None, None, None]
    jloc = jloc.reshape(C, 12, 12)
    J = _scatter_matrix(jloc, dofmap.cell_dofs, dofmap.cell_dofs,
                        (dofmap.n_dofs, dofmap.n_dofs))
    return N, J


def assemble_blocks(mesh, mu=1.0):
    """All Stokes blocks plus the dof maps for one mesh."""
    vel = DofMap(mesh, "p2v")
    pres = DofMap(mesh, "p1")
    M = assemble_mass(mesh, vel)
    K = assemble_stiffness(mesh, vel, mu=mu)
    B = assemble_divergence(mesh, vel, pres)
    return BlockSystem(M, K, B), vel, pres


def prolongation(hierarchy, level, kind):
    """Nested-space interpolation from ``level`` to ``level + 1``.

    Exact for the shared space: coarse coefficients map to the fine
    coefficients of the identical finite-element function.
    """
    if not isinstance(hierarchy, MeshHierarchy):
        raise TypeError("expected a MeshHierarchy")
    if not 0 <= level < hierarchy.num_levels - 1:
        raise ValueError(f"no refinement above level {level}")
    coarse = hierarchy.levels[level]
    fine = hierarchy.levels[level + 1]
    cell_parent = hierarchy.cell_parent[level]

    if kind == "p2v":
        P = prolongation(hierarchy, level, "p2")
        return sp.kron(P, sp.eye(2), format="csr")

    cmap = DofMap(coarse, kind)
    fmap = DofMap(fine, kind)
    basis = p1_basis if kind == "p1" else p2_basis

    fnodes = fmap.scalar_node_coords()
    fcd = fmap.cell_dofs  # (Cf, nl)
    Cf, nl = fcd.shape
    pts = fnodes[fcd]  # (Cf, nl, 2)

    p0 = coarse.vertices[coarse.cells[cell_parent, 0]]
    _, _, Jinv, _ = _geometry(coarse)
    Jinv = Jinv[cell_parent]
    ref = np.einsum("cde,cne->cnd", Jinv, pts - p0[:, None, :]).reshape(-1, 2)
    phi = basis(ref)[0]  # (nb, Cf*nl)
    nb = phi.shape[0]

    rows = np.repeat(fcd.ravel(), nb)
    cols = np.repeat(cmap.cell_dofs[cell_parent], nl, axis=0).ravel()
    vals = phi.T.ravel()

    keep = np.abs(vals) > 1e-12
    rows, cols, vals = rows[keep], cols[keep], vals[keep]
    # A fine dof can be visited from several fine cells; the values agree,
    # so keep the first occurrence of each (row, col) pair.
    key = rows.astype(np.int64) * cmap.n_dofs + cols
    _, first = np.unique(key, return_index=True)
    P = sp.coo_matrix((vals[first], (rows[first], cols[first])),
                      shape=(fmap.n_dofs, cmap.n_dofs))
    return P.tocsr()


def eliminate(A, idx, unit_diagonal=True):
    """Zero constrained rows and columns; optionally put 1 on their diagonal."""
    n = A.shape[0]
    mask = np.ones(n)
    mask[idx] = 0.0
    D = sp.diags(mask)
    out = (D @ A @ D).tocsr() if A.shape[0] == A.shape[1] else (D @ A).tocsr()
    if unit_diagonal and A.shape[0] == A.shape[1]:
        ones = np.zeros(n)
        ones[idx] = 1.0
        out = (out + sp.diags(ones)).tocsr()
    return out


def apply_dirichlet(A, b, idx, values):
    """Symmetric row/col elimination with lifting.

    Returns (A_eliminated, b_lifted): constrained rows and columns are
    replaced by identity, the elimination contribution moves to the free
    right-hand side, and constrained entries of b carry the values.
    """
    idx = np.asarray(idx, dtype=np.int64)
    values = np.asarray(values, dtype=float)
    if values.shape != idx.shape:
        raise ValueError("one value per constrained dof required")
    lifted = b - A[:, idx] @ values
    lifted[idx] = values
    return eliminate(A, idx), lifted


def interpolate(dofmap, func, t=None):
    """Nodal interpolation of a pointwise function.

    ``func(points, t)`` (or ``func(points)`` when ``t`` is None) returns
    scalar values for p1/p2 spaces and (N, 2) values for p2v.
    """
    coords = dofmap.scalar_node_coords()
    vals = func(coords) if t is None else func(coords, t)
    vals = np.asarray(vals, dtype=float)
    if dofmap.kind == "p2v":
        if vals.shape != (len(coords), 2):
            raise ValueError("vector function must return (N, 2) values")
        return vals.ravel()
    if vals.shape != (len(coords),):
        raise ValueError("scalar function must return (N,) values")
    return vals


def _eval_at_quad(mesh, dofmap, coeffs, phi):
    cd = dofmap.cell_dofs
    if dofmap.kind == "p2v":
        uloc = coeffs[cd].reshape(len(cd), -1, 2)
        return np.einsum("cad,aq->cqd", uloc, phi)
    return np.einsum("ca,aq->cq", coeffs[cd], phi)


def l2_error(mesh, dofmap, coeffs, exact, mode="absolute", t=None, degree=DEG_ERROR):
    """L2 norm of (u_h - u), optionally relative to the norm of ``u``."""
    if mode not in ("absolute", "relative"):
        raise ValueError(f"unknown mode {mode!r}")
    pts, w = triangle_rule(degree)
    basis = p1_basis if dofmap.kind == "p1" else p2_basis
    phi = basis(pts)[0]
    p0, J, _, detJ = _geometry(mesh)
    phys = p0[:, None, :] + np.einsum("cde,qe->cqd", J, pts)

    uh = _eval_at_quad(mesh, dofmap, np.asarray(coeffs, dtype=float), phi)
    flat = phys.reshape(-1, 2)
    ue = exact(flat) if t is None else exact(flat, t)
    ue = np.asarray(ue, dtype=float).reshape(uh.shape)

    def _norm2(v):
        if v.ndim == 3:
            dens = np.einsum("cqd,cqd->cq", v, v)
        else:
            dens = v * v
        return float(np.einsum("q,cq,c->", w, dens, detJ))

    err = np.sqrt(_norm2(uh - ue))
    if mode == "absolute":
        return err
    ref = np.sqrt(_norm2(ue))
    if ref < 1e-14:
        raise ValueError("relative error undefined: exact function has zero norm")
    return err / ref


def function_mean(mesh, dofmap, coeffs, degree=4):
    """Integral mean of a scalar finite-element function over the mesh."""
    pts, w = triangle_rule(degree)
    basis = p1_basis if dofmap.kind == "p1" else p2_basis
    phi = basis(pts)[0]
    _, _, _, detJ = _geometry(mesh)
    vals = _eval_at_quad(mesh, dofmap, np.asarray(coeffs, dtype=float), phi)
    total = float(np.einsum("q,cq,c->", w, vals, detJ))
    area = float(np.sum(detJ)) * 0.5
    return total / area


def count_dofs(n0, l):
    """Closed-form Taylor-Hood dof counts after ``l`` refinements.

    Returns (velocity dofs, pressure dofs, total per stage).
    """
    V = (n0 + 1) ** 2 + n0 ** 2
    C = 4 * n0 ** 2
    E = V + C - 1
    for _ in range(l):
        V = V + E
        C = 4 * C
        E = V + C - 1
    n_u = 2 * (V + E)
    n_p = V
    return n_u, n_p, n_u + n_p


def velocity_boundary_dofs(mesh):
    """All vector P2 dofs whose scalar node lies on the boundary."""
    V = mesh.num_vertices
    scalar = np.concatenate([
        np.flatnonzero(mesh.boundary_vertex_flags),
        V + np.flatnonzero(mesh.boundary_edge_flags),
    ])
    return np.sort(np.concatenate([2 * scalar, 2 * scalar + 1]))


def dump_matrix(A, path):
    """Coordinate-format dump: sorted 'row col value' lines."""
    coo = sp.coo_matrix(A)
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w") as fh:
        for r, c, v in zip(coo.row[order], coo.col[order], coo.data[order]):
            fh.write(f"{r} {c} {v:.17g}\n")


def _check_pair(mesh, dofmap, kind):
    if dofmap.mesh is not mesh:
        raise ValueError("dofmap was built for a different mesh")
    if dofmap.kind != kind:
        raise ValueError(f"expected a {kind} dofmap, got {dofmap.kind}")
