"""Stage-coupled operators and right-hand sides for IRK timestepping.

The stage system for the semi-discrete Stokes DAE is

    [ I_r (x) diag(M, 0)  +  dt A (x) [[K, B], [B^T, 0]] ] k = F,

held in block/tensor form: the Kronecker factors are never materialized at
scale.  Vectors are stage-major, [(k_1^u, k_1^p), (k_2^u, k_2^p), ...].
Dirichlet velocity constraints are imposed per stage on the stage unknowns
(which approximate time derivatives, so the constrained values are g_t at
the stage times) by symmetric elimination with lifting.
"""

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
import scipy.sparse as sp

from . import fem
from .tableaux import ButcherTableau

__all__ = [
    "StepState",
    "StageSystem",
    "assemble_stage_operator",
    "assemble_stage_rhs",
    "advance_step",
    "stage_dirichlet_values",
]


@dataclass
class StepState:
    """Current time level of the march."""

    t: float
    u: np.ndarray
    p: np.ndarray
    dt: float

    def __post_init__(self):
        if not self.dt > 0.0:
            raise ValueError("timestep must be positive")


class StageSystem:
    """The stage-coupled saddle-point operator in block form.

    Parameters
    ----------
    blocks : fem.BlockSystem
        Raw (non-eliminated) M, K, B.
    tableau : ButcherTableau
    dt : float
    constrained : int array
        Dirichlet velocity dofs (per stage; the same set every stage).
    convection : list of sparse matrices, optional
        Per-stage convection Jacobians J_N(u_i), already sized n_u x n_u;
        when present the operator is the Navier-Stokes stage Jacobian.
    """

    def __init__(self, blocks, tableau, dt, constrained=None, convection=None):
        if dt < 0.0:
            raise ValueError("timestep must be nonnegative")
        self.blocks = blocks
        self.tableau = tableau
        self.dt = float(dt)
        self.n_u = blocks.n_u
        self.n_p = blocks.n_p
        self.r = tableau.r
        self.constrained = np.asarray(
            constrained if constrained is not None else [], dtype=np.int64)
        if convection is not None and len(convection) != self.r:
            raise ValueError("one convection Jacobian per stage required")

        c = self.constrained
        self.M = fem.eliminate(blocks.M, c, unit_diagonal=False)
        self.K = fem.eliminate(blocks.K, c, unit_diagonal=False)
        self.B = fem.eliminate(blocks.B, c, unit_diagonal=False)
        self.BT = self.B.T.tocsr()
        self.convection = None
        if convection is not None:
            self.convection = [fem.eliminate(J, c, unit_diagonal=False)
                               for J in convection]
        self._cmask = np.zeros(self.n_u, dtype=bool)
        if len(c):
            self._cmask[c] = True

    # -- layout helpers -------------------------------------------------

    @property
    def stage_dim(self):
        return self.n_u + self.n_p

    @property
    def dim(self):
        return self.r * self.stage_dim

    def split(self, x):
        """View a stage-major vector as (r, n_u) and (r, n_p) blocks."""
        blocks = np.asarray(x).reshape(self.r, self.stage_dim)
        return blocks[:, :self.n_u], blocks[:, self.n_u:]

    def join(self, u, p):
        return np.hstack([u, p]).ravel()

    # -- operator application -------------------------------------------

    def matvec(self, x):
        """Eliminated operator: identity on constrained rows/cols."""
        u, p = self.split(x)
        A = self.tableau.A
        Ku = np.stack([self.K @ u[j] for j in range(self.r)])
        Bp = np.stack([self.B @ p[j] for j in range(self.r)])
        yu = np.stack([self.M @ u[i] for i in range(self.r)])
        yu += self.dt * (A @ (Ku + Bp))
        if self.convection is not None:
            # Row i carries dt * a_ij * J_N(u_i) k_j: the Jacobian is
            # evaluated at the row's stage velocity.
            for i in range(self.r):
                acc = A[i] @ u  # (n_u,) combination sum_j a_ij u_j
                yu[i] += self.dt * (self.convection[i] @ acc)
        yu[:, self._cmask] = u[:, self._cmask]
        yp = self.dt * (A @ np.stack([self.BT @ u[j] for j in range(self.r)]))
        return np.hstack([yu, yp]).ravel()

    def matvec_raw(self, x):
        """Operator without any boundary elimination (oracle use)."""
        u, p = self.split(x)
        A = self.tableau.A
        M, K, B = self.blocks.M, self.blocks.K, self.blocks.B
        Ku = np.stack([K @ u[j] for j in range(self.r)])
        Bp = np.stack([B @ p[j] for j in range(self.r)])
        yu = np.stack([M @ u[i] for i in range(self.r)]) + self.dt * (A @ (Ku + Bp))
        yp = self.dt * (A @ np.stack([B.T @ u[j] for j in range(self.r)]))
        return np.hstack([yu, yp]).ravel()

    def materialize(self, raw=False, limit=10_000):
        """Explicit sparse matrix (small systems only; oracles and the
        coarsest-grid direct solve)."""
        if self.dim > limit:
            raise ValueError(f"refusing to materialize {self.dim} stage dofs")
        M = self.blocks.M if raw else self.M
        K = self.blocks.K if raw else self.K
        B = self.blocks.B if raw else self.B
        saddle = sp.bmat([[K, B], [B.T, None]], format="csr")
        massd = sp.block_diag([M, sp.csr_matrix((self.n_p, self.n_p))], format="csr")
        out = (sp.kron(sp.eye(self.r), massd)
               + self.dt * sp.kron(self.tableau.A, saddle)).tolil()
        if self.convection is not None:
            if raw:
                raise ValueError("raw materialization is not defined with convection")
            A = self.tableau.A
            for i in range(self.r):
                for j in range(self.r):
                    blk = self.dt * A[i, j] * self.convection[i]
                    r0 = i * self.stage_dim
                    c0 = j * self.stage_dim
                    out[r0:r0 + self.n_u, c0:c0 + self.n_u] += blk
        out = out.tocsr()
        if not raw and len(self.constrained):
            idx = self.constrained_stage_dofs()
            ones = np.zeros(self.dim)
            ones[idx] = 1.0
            out = out + sp.diags(ones)
        return out.tocsr()

    def constrained_stage_dofs(self):
        """Global stage-major indices of all constrained velocity dofs."""
        offs = np.arange(self.r) * self.stage_dim
        return (offs[:, None] + self.constrained[None, :]).ravel()

    def project_pressure_means(self, x):
        """Remove the per-stage constant-pressure component in place."""
        u, p = self.split(x)
        p -= p.mean(axis=1, keepdims=True)
        return x

    def pressure_nullspace(self):
        """Orthonormal basis of the per-stage constant-pressure nullspace."""
        Z = np.zeros((self.dim, self.r))
        for i in range(self.r):
            lo = i * self.stage_dim + self.n_u
            Z[lo:lo + self.n_p, i] = 1.0 / np.sqrt(self.n_p)
        return Z


def assemble_stage_operator(blocks, tableau, dt, constrained=None, convection=None):
    """Stage-coupled operator with Dirichlet stage constraints applied."""
    if blocks.M.shape[0] != blocks.B.shape[0]:
        raise ValueError("inconsistent block dimensions")
    return StageSystem(blocks, tableau, dt, constrained=constrained,
                       convection=convection)


def stage_dirichlet_values(spec, vel_dofmap, tableau, t, dt, u_n=None):
    """Per-stage boundary values for the stage unknowns.

    Returns an (r, n_c) array of constrained values for the stage
    derivatives k_i.  The default convention solves for the values that
    make the stage velocities u^n + dt sum_j a_ij k_j hit g exactly at
    the stage times: k[c] = A^{-1} (g(t + c dt) - u^n[c]) / dt.  For
    stiffly accurate schemes this reproduces u^{n+1} = g(t^{n+1}) on the
    boundary exactly, so boundary values never drift from the data.

    When ``u_n`` (the current velocity coefficients) is omitted, the
    constrained values fall back to the derivative data g_t at the stage
    times.
    """
    if not len(spec.dofs):
        return np.zeros((tableau.r, 0))
    if u_n is None:
        return np.stack([
            spec.values(vel_dofmap, t + ci * dt, deriv=True) for ci in tableau.c
        ])
    g = np.stack([
        spec.values(vel_dofmap, t + ci * dt) for ci in tableau.c
    ])
    return np.linalg.solve(tableau.A, g - u_n[spec.dofs][None, :]) / dt


def assemble_stage_rhs(system, step, forcing=None, stage_bc_values=None):
    """Stage right-hand side, Dirichlet-lifted.

    Velocity rows i carry M f_i - K u^n - B p^n, pressure rows -B^T u^n,
    stacked stage-major.  ``forcing``, if given, maps a stage time to the
    velocity-space coefficient vector of the interpolated forcing.
    ``stage_bc_values`` is the (r, n_c) array of boundary data for the
    stage unknowns.
    """
    M, K, B = system.blocks.M, system.blocks.K, system.blocks.B
    r, n_u, n_p = system.r, system.n_u, system.n_p
    Fu = np.empty((r, n_u))
    base = -(K @ step.u) - (B @ step.p)
    for i in range(r):
        Fu[i] = base
        if forcing is not None:
            ti = step.t + system.tableau.c[i] * step.dt
            Fu[i] = Fu[i] + M @ forcing(ti)
    Fp = np.tile(-(B.T @ step.u), (r, 1))
    F = np.hstack([Fu, Fp]).ravel()

    c = system.constrained
    if len(c):
        if stage_bc_values is None:
            stage_bc_values = np.zeros((r, len(c)))
        kstar = np.zeros(system.dim)
        ustar, _ = system.split(kstar)
        ustar[:, c] = stage_bc_values
        F = F - system.matvec_raw(kstar)
        idx = system.constrained_stage_dofs()
        F[idx] = stage_bc_values.ravel()
    return F


def advance_step(step, tableau, k):
    """RK update u^{n+1} = u^n + dt sum_j b_j k_j (and likewise for p)."""
    n_u = len(step.u)
    n_p = len(step.p)
    kb = np.asarray(k).reshape(tableau.r, n_u + n_p)
    du = tableau.b @ kb[:, :n_u]
    dp = tableau.b @ kb[:, n_u:]
    return StepState(step.t + step.dt, step.u + step.dt * du,
                     step.p + step.dt * dp, step.dt)
