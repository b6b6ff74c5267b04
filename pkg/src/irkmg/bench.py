"""Benchmark driver: manufactured-solution time marches and reports.

Runs the transient Stokes and Navier-Stokes manufactured-solution studies
on the unit square, records errors, rates and solver statistics, and
emits CSV / plain-text reports.  Also hosts the command-line front end.
"""

import argparse
import sys
import time
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
import scipy.sparse as sp

from . import fem
from . import mesh as meshmod
from .newton import NewtonConfig, NewtonError, newton_solve, warm_start
from .solvers import (MGHierarchyOp, MGLevel, SmootherSpec,
                      build_vanka_patches, coarse_direct_solve, fgmres)
from .stages import (StepState, advance_step, assemble_stage_operator,
                     assemble_stage_rhs, stage_dirichlet_values)
from .tableaux import tableau_lookup, tableau_report

__all__ = [
    "RunConfig",
    "ReportRow",
    "SolverFailure",
    "run_stokes_mms",
    "run_ns_taylor_green",
    "convergence_rates",
    "emit_csv",
    "cli_main",
    "load_config_file",
]

CSV_HEADER = ("scheme,stages,level,dt,vel_error,pres_error,"
              "avg_linear_iters,avg_newton_iters,wall_seconds")

# Typed solver-option table; values arrive as strings from files/flags.
SOLVER_KEYS = {
    "smoother.sweeps": int,
    "smoother.cheby_a": float,
    "smoother.cheby_b": float,
    "smoother.accel": str,
    "mg.levels": int,
    "krylov.rtol": float,
    "krylov.atol": float,
    "krylov.maxiter": int,
    "krylov.restart": int,
    "newton.atol": float,
    "newton.maxit": int,
    "newton.ew_gamma": float,
    "newton.ew_alpha": float,
    "newton.eta0": float,
    "newton.eta_max": float,
}


class SolverFailure(RuntimeError):
    """A stage solve failed to reach its tolerance during the march."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    """One benchmark run: problem, scheme, resolution, solver options."""

    problem: str  # "stokes-mms" | "ns-taylor-green"
    family: str
    stages: int
    n0: int = 8
    level: int = 1
    t_final: float = 0.5
    dt: Optional[float] = None  # None -> scaled rule N = 2**(level + 3)
    mu: float = 1.0
    solver: dict = field(default_factory=dict)
    output: Optional[str] = None

    def __post_init__(self):
        if self.problem not in ("stokes-mms", "ns-taylor-green"):
            raise ConfigError(f"unknown problem {self.problem!r}")
        if self.level < 0 or self.n0 < 1:
            raise ConfigError("resolution parameters must be positive")
        if self.dt is not None and not 0.0 < self.dt <= self.t_final:
            raise ConfigError("fixed timestep must lie in (0, t_final]")
        for key in self.solver:
            if key not in SOLVER_KEYS:
                raise ConfigError(f"unknown solver option {key!r}")

    @property
    def num_steps(self):
        if self.dt is None:
            return 2 ** (self.level + 3)
        return max(1, round(self.t_final / self.dt))

    @property
    def timestep(self):
        return self.t_final / self.num_steps


@dataclass
class ReportRow:
    scheme: str
    stages: int
    level: int
    dt: float
    vel_error: float
    pres_error: float
    avg_linear_iters: float
    avg_newton_iters: float
    wall_seconds: float
    max_div_residual: float = 0.0  # not part of the CSV; regression aid


# ---------------------------------------------------------------------------
# Manufactured solutions
# ---------------------------------------------------------------------------

def exact_velocity(points, t):
    """Decaying vortex velocity field (divergence-free, zero normal flux)."""
    x, y = points[:, 0], points[:, 1]
    amp = np.exp(-2.0 * np.pi ** 2 * t)
    return amp * np.column_stack([
        np.sin(np.pi * x) * np.cos(np.pi * y),
        -np.cos(np.pi * x) * np.sin(np.pi * y),
    ])


def exact_velocity_dt(points, t):
    return -2.0 * np.pi ** 2 * exact_velocity(points, t)


def exact_pressure_stokes(points, t):
    return np.zeros(len(points))


def exact_pressure_taylor_green(points, t):
    """Zero-mean pressure balancing the convective term of the vortex."""
    x, y = points[:, 0], points[:, 1]
    return (np.exp(-4.0 * np.pi ** 2 * t) / 4.0
            * (np.cos(2.0 * np.pi * x) + np.cos(2.0 * np.pi * y)))


# ---------------------------------------------------------------------------
# Discretization bundle
# ---------------------------------------------------------------------------

class Discretization:
    """Per-level meshes, Stokes blocks and prolongations, built once."""

    def __init__(self, n0, level, mu=1.0):
        self.hier = meshmod.build_hierarchy(n0, level)
        self.blocks = []
        self.vel = []
        self.pres = []
        self.cdofs = []
        for m in self.hier.levels:
            blk, vmap, pmap = fem.assemble_blocks(m, mu=mu)
            self.blocks.append(blk)
            self.vel.append(vmap)
            self.pres.append(pmap)
            self.cdofs.append(fem.velocity_boundary_dofs(m))
        self._scalar_prolong = [
            (fem.prolongation(self.hier, k, "p2v"),
             fem.prolongation(self.hier, k, "p1"))
            for k in range(len(self.hier.levels) - 1)
        ]
        self._stage_prolong = {}

    @property
    def num_levels(self):
        return len(self.hier.levels)

    @property
    def fine_mesh(self):
        return self.hier.levels[-1]

    def stage_prolong(self, level, r):
        """I_r (x) blockdiag(P_vel, P_pres) from level-1 to level."""
        key = (level, r)
        if key not in self._stage_prolong:
            Pv, Pp = self._scalar_prolong[level - 1]
            P = sp.block_diag([Pv, Pp]).tocsr()
            self._stage_prolong[key] = sp.kron(sp.eye(r), P, format="csr")
        return self._stage_prolong[key]

    def inject_velocity(self, level, u_fine):
        """Nodal restriction of fine velocity coefficients to ``level``.

        The scalar P2 nodes of each level are an ordered prefix of the
        next level's (coarse vertices keep their indices and coarse edge
        midpoints become the new vertices), so nodal injection is a
        truncation of the coefficient vector.
        """
        return np.ascontiguousarray(u_fine[:self.blocks[level].n_u])

    def build_mg(self, tableau, dt, smoother, mg_levels=None, convection=None):
        """Assemble the stage systems and V-cycle preconditioner.

        ``convection``, when given, holds one list of per-stage Jacobians
        per discretization level (Navier-Stokes stage linearization).
        Returns (hierarchy operator, finest stage system).
        """
        total = self.num_levels
        depth = total if mg_levels is None else int(mg_levels)
        if not 1 <= depth <= total:
            raise ConfigError(f"mg.levels must lie in [1, {total}]")
        start = total - depth
        levels = []
        for k in range(start, total):
            conv_k = None if convection is None else convection[k]
            system = assemble_stage_operator(
                self.blocks[k], tableau, dt,
                constrained=self.cdofs[k], convection=conv_k)
            patches = build_vanka_patches(system, self.hier.levels[k])
            P = self.stage_prolong(k, tableau.r) if k > start else None
            levels.append(MGLevel(system, patches, smoother, P))
        coarse = coarse_direct_solve(levels[0].system)
        return MGHierarchyOp(levels, coarse), levels[-1].system


def _smoother_from_config(solver, problem):
    sweeps = int(solver.get("smoother.sweeps", 2))
    default_a = 1.5 if problem == "ns-taylor-green" else 2.0
    return SmootherSpec(
        pre=sweeps, post=sweeps,
        accel=solver.get("smoother.accel", "chebyshev"),
        cheby_a=float(solver.get("smoother.cheby_a", default_a)),
        cheby_b=float(solver.get("smoother.cheby_b", 8.0)),
    )


def _krylov_from_config(solver, num_steps):
    # Default per-step tolerance: absolute 1e-2 * N^-3 from the timestep
    # rule, capped at a 1e-8 relative reduction.
    return {
        "rtol": float(solver.get("krylov.rtol", 1e-8)),
        "atol": float(solver.get("krylov.atol", 1e-2 * num_steps ** -3.0)),
        "maxiter": int(solver.get("krylov.maxiter", 200)),
        "restart": int(solver.get("krylov.restart", 50)),
    }


def _newton_from_config(solver, num_steps):
    return NewtonConfig(
        atol=float(solver.get("newton.atol", 1e-2 * num_steps ** -3.0)),
        maxit=int(solver.get("newton.maxit", 20)),
        ew_gamma=float(solver.get("newton.ew_gamma", 0.9)),
        ew_alpha=float(solver.get("newton.ew_alpha", 2.0)),
        eta0=float(solver.get("newton.eta0", 0.5)),
        eta_max=float(solver.get("newton.eta_max", 0.9)),
    )


def _divergence_residual(system, rhs, k):
    """Norm of the incompressibility rows of the stage residual."""
    resid = rhs - system.matvec(k)
    _, rp = system.split(resid)
    return float(np.linalg.norm(rp))


def _final_errors(disc, step, pressure_exact):
    """Relative L2 velocity and absolute L2 (mean-adjusted) pressure error."""
    m = disc.fine_mesh
    vmap, pmap = disc.vel[-1], disc.pres[-1]
    vel_err = fem.l2_error(m, vmap, step.u, exact_velocity,
                           mode="relative", t=step.t)
    p_adj = step.p - fem.function_mean(m, pmap, step.p)
    pres_err = fem.l2_error(m, pmap, p_adj, pressure_exact,
                            mode="absolute", t=step.t)
    return vel_err, pres_err


# ---------------------------------------------------------------------------
# Benchmark runs
# ---------------------------------------------------------------------------

def run_stokes_mms(config, disc=None):
    """March the transient Stokes manufactured solution to t_final.

    Each step solves the stage-coupled saddle system with V-cycle
    preconditioned flexible GMRES, warm-started from the previous step's
    stage vector.  Returns one ReportRow.
    """
    if config.problem != "stokes-mms":
        raise ConfigError("config.problem must be 'stokes-mms'")
    tab = tableau_lookup(config.family, config.stages)
    t0 = time.perf_counter()
    if disc is None:
        disc = Discretization(config.n0, config.level, mu=config.mu)
    N = config.num_steps
    dt = config.timestep
    smoother = _smoother_from_config(config.solver, config.problem)
    kry = _krylov_from_config(config.solver, N)
    mg, system = disc.build_mg(tab, dt, smoother,
                               mg_levels=config.solver.get("mg.levels"))

    vmap, pmap = disc.vel[-1], disc.pres[-1]
    bc = fem.DirichletSpec(disc.cdofs[-1], g=exact_velocity,
                           g_t=exact_velocity_dt)
    step = StepState(0.0, fem.interpolate(vmap, exact_velocity, t=0.0),
                     np.zeros(pmap.n_dofs), dt)

    k_prev = np.zeros(system.dim)
    total_lin = 0
    max_div = 0.0
    for n in range(N):
        stage_bc = stage_dirichlet_values(bc, vmap, tab, step.t, dt, u_n=step.u)
        rhs = assemble_stage_rhs(system, step, stage_bc_values=stage_bc)
        k, st = fgmres(system.matvec, rhs, precond=mg.precondition,
                       x0=warm_start(k_prev), **kry)
        if not st.converged:
            raise SolverFailure(
                f"stage solve stalled at step {n} "
                f"(residual {st.final_residual:.3e})", step=n)
        total_lin += st.iterations
        max_div = max(max_div, _divergence_residual(system, rhs, k))
        k_prev = k
        step = advance_step(step, tab, k)

    vel_err, pres_err = _final_errors(disc, step, exact_pressure_stokes)
    return ReportRow(
        scheme=config.family, stages=tab.r, level=config.level, dt=dt,
        vel_error=vel_err, pres_error=pres_err,
        avg_linear_iters=total_lin / N, avg_newton_iters=0.0,
        wall_seconds=time.perf_counter() - t0, max_div_residual=max_div)


def run_ns_taylor_green(config, disc=None):
    """March the Navier-Stokes decaying-vortex manufactured solution.

    Each step runs inexact Newton with Eisenstat-Walker forcing; every
    Newton iteration rebuilds the stage Jacobian (convection linearized
    at the current stage velocities, injected onto every grid level) and
    its Vanka patches.
    """
    if config.problem != "ns-taylor-green":
        raise ConfigError("config.problem must be 'ns-taylor-green'")
    if config.mu != 1.0:
        raise ConfigError("the decaying-vortex benchmark requires mu = 1")
    tab = tableau_lookup(config.family, config.stages)
    t0 = time.perf_counter()
    if disc is None:
        disc = Discretization(config.n0, config.level, mu=config.mu)
    N = config.num_steps
    dt = config.timestep
    smoother = _smoother_from_config(config.solver, config.problem)
    kry = _krylov_from_config(config.solver, N)
    newt = _newton_from_config(config.solver, N)
    mg_levels = config.solver.get("mg.levels")

    mesh_f = disc.fine_mesh
    vmap, pmap = disc.vel[-1], disc.pres[-1]
    blocks = disc.blocks[-1]
    M, K, B = blocks.M, blocks.K, blocks.B
    cdofs = disc.cdofs[-1]
    A = tab.A
    r = tab.r
    n_u, n_p = blocks.n_u, blocks.n_p
    sd = n_u + n_p
    stage_cd = (np.arange(r)[:, None] * sd + cdofs[None, :]).ravel()

    bc = fem.DirichletSpec(cdofs, g=exact_velocity, g_t=exact_velocity_dt)
    step = StepState(0.0, fem.interpolate(vmap, exact_velocity, t=0.0),
                     fem.interpolate(pmap, exact_pressure_taylor_green, t=0.0),
                     dt)

    def split(k):
        kb = k.reshape(r, sd)
        return kb[:, :n_u], kb[:, n_u:]

    k_prev = np.zeros(r * sd)
    total_lin = 0
    total_newton = 0
    max_div = 0.0
    for n in range(N):
        stage_bc = stage_dirichlet_values(bc, vmap, tab, step.t, dt, u_n=step.u)

        def residual(k):
            ku, kp = split(k)
            ustage = step.u + dt * (A @ ku)
            pstage = step.p + dt * (A @ kp)
            Fu = np.empty((r, n_u))
            Fp = np.empty((r, n_p))
            for i in range(r):
                conv, _ = fem.assemble_convection(mesh_f, vmap, ustage[i],
                                                  need="residual")
                Fu[i] = M @ ku[i] + K @ ustage[i] + conv + B @ pstage[i]
                Fp[i] = B.T @ ustage[i]
            F = np.hstack([Fu, Fp]).ravel()
            F[stage_cd] = (ku[:, cdofs] - stage_bc).ravel()
            return F

        def jacobian(k):
            ku, _ = split(k)
            ustage = step.u + dt * (A @ ku)
            convection = []
            for lev in range(disc.num_levels):
                conv_lev = []
                for i in range(r):
                    u_i = disc.inject_velocity(lev, ustage[i])
                    _, J = fem.assemble_convection(
                        disc.hier.levels[lev], disc.vel[lev], u_i,
                        need="jacobian")
                    conv_lev.append(J)
                convection.append(conv_lev)
            return disc.build_mg(tab, dt, smoother, mg_levels=mg_levels,
                                 convection=convection)

        def linear_solve(J, F, eta):
            mg, system = J
            dx, st = fgmres(system.matvec, -F, precond=mg.precondition,
                            rtol=eta, atol=0.1 * newt.atol,
                            maxiter=kry["maxiter"], restart=kry["restart"])
            return dx, st

        x0 = warm_start(k_prev)
        ku0, _ = split(x0)
        ku0[:, cdofs] = stage_bc  # constraint rows are linear: satisfy exactly
        try:
            k, st = newton_solve(residual, jacobian, x0, newt, linear_solve)
        except NewtonError as exc:
            raise SolverFailure(f"step {n}: {exc}", step=n) from exc
        total_newton += st.iterations
        total_lin += sum(s.iterations for s in st.linear_stats)
        _, rp = split(residual(k))
        max_div = max(max_div, float(np.linalg.norm(rp)))
        k_prev = k
        step = advance_step(step, tab, k)

    vel_err, pres_err = _final_errors(disc, step, exact_pressure_taylor_green)
    newton_per_step = total_newton / N
    return ReportRow(
        scheme=config.family, stages=tab.r, level=config.level, dt=dt,
        vel_error=vel_err, pres_error=pres_err,
        avg_linear_iters=total_lin / max(total_newton, 1),
        avg_newton_iters=newton_per_step,
        wall_seconds=time.perf_counter() - t0, max_div_residual=max_div)


def run_problem(config, disc=None):
    if config.problem == "stokes-mms":
        return run_stokes_mms(config, disc=disc)
    return run_ns_taylor_green(config, disc=disc)


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

def convergence_rates(rows):
    """Observed rates log2(e_l / e_{l+1}) between adjacent-level rows.

    Rows must share scheme and stage count and be sorted by level; a zero
    coarse-level error makes the rate undefined (reported as nan).
    """
    rows = sorted(rows, key=lambda row: row.level)
    if len(rows) < 2:
        raise ValueError("need at least two levels to compute rates")
    out = []
    for lo, hi in zip(rows, rows[1:]):
        if (lo.scheme, lo.stages) != (hi.scheme, hi.stages):
            raise ValueError("rates require a single scheme per table")
        if hi.level != lo.level + 1:
            raise ValueError("rates require adjacent levels")

        def rate(e0, e1):
            if e0 <= 0.0 or e1 <= 0.0:
                return float("nan")
            return float(np.log2(e0 / e1))

        out.append({
            "levels": (lo.level, hi.level),
            "vel_rate": rate(lo.vel_error, hi.vel_error),
            "pres_rate": rate(lo.pres_error, hi.pres_error),
        })
    return out


def format_csv_row(row):
    nums = [row.dt, row.vel_error, row.pres_error,
            row.avg_linear_iters, row.avg_newton_iters, row.wall_seconds]
    return ",".join([row.scheme, str(row.stages), str(row.level)]
                    + [f"{v:.6g}" for v in nums])


def emit_csv(rows, path):
    """Write the report as CSV (6 significant digits, '.' decimal point)."""
    with open(path, "w") as fh:
        fh.write(CSV_HEADER + "\n")
        for row in rows:
            fh.write(format_csv_row(row) + "\n")


def read_csv(path):
    """Parse a report file written by emit_csv back into ReportRows."""
    rows = []
    with open(path) as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise ValueError(f"unexpected header {header!r}")
        for line in fh:
            f = line.strip().split(",")
            rows.append(ReportRow(
                scheme=f[0], stages=int(f[1]), level=int(f[2]),
                dt=float(f[3]), vel_error=float(f[4]), pres_error=float(f[5]),
                avg_linear_iters=float(f[6]), avg_newton_iters=float(f[7]),
                wall_seconds=float(f[8])))
    return rows


def format_rates_table(rows, rates):
    lines = ["level  dt          vel_error    pres_error   lin/step  newton/step"]
    for row in rows:
        lines.append(f"{row.level:>5d}  {row.dt:<10.4g}  {row.vel_error:<11.5g}"
                     f"  {row.pres_error:<11.5g}  {row.avg_linear_iters:<8.3g}"
                     f"  {row.avg_newton_iters:.3g}")
    lines.append("")
    lines.append("levels    vel_rate  pres_rate")
    for entry in rates:
        lo, hi = entry["levels"]
        lines.append(f"{lo}->{hi:<6d}  {entry['vel_rate']:<8.3f}"
                     f"  {entry['pres_rate']:.3f}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------

def load_config_file(path):
    """Parse a key=value options file (blank lines and # comments allowed)."""
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            key, value = (part.strip() for part in line.split("=", 1))
            out[key] = value
    return out


def _typed_solver_options(raw):
    out = {}
    for key, value in raw.items():
        if key not in SOLVER_KEYS:
            raise ConfigError(f"unknown solver option {key!r}")
        try:
            out[key] = SOLVER_KEYS[key](value)
        except ValueError:
            raise ConfigError(f"bad value for {key}: {value!r}") from None
    return out


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _add_run_flags(p, with_problem=False):
    if with_problem:
        p.add_argument("--problem", required=True,
                       choices=["stokes-mms", "ns-taylor-green"])
    p.add_argument("--family", required=True)
    p.add_argument("--stages", type=int, required=True)
    p.add_argument("--n0", type=int, default=8)
    p.add_argument("--tfinal", type=float, default=0.5)
    p.add_argument("--dt", type=float, default=None,
                   help="fixed timestep (default: dt = tfinal / 2**(level+3))")
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--config", default=None,
                   help="key=value options file; flags override")
    p.add_argument("--out", default=None, help="CSV output path")
    p.add_argument("--dump-mesh", default=None)
    p.add_argument("--dump-matrix", default=None)
    for key, typ in SOLVER_KEYS.items():
        p.add_argument(f"--{key}", type=typ, default=None, dest=key)


def _build_parser():
    top = _Parser(prog="stokes-irk-bench",
                  description="IRK stage-coupled multigrid flow benchmarks")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stokes-mms", parents=[], help="transient Stokes study")
    _add_run_flags(p)
    p.add_argument("--level", type=int, default=1)

    p = sub.add_parser("ns-taylor-green", help="Navier-Stokes vortex study")
    _add_run_flags(p)
    p.add_argument("--level", type=int, default=1)

    p = sub.add_parser("tableau-report", help="scheme consistency report")
    p.add_argument("--family", required=True)
    p.add_argument("--stages", type=int, required=True)

    p = sub.add_parser("converge", help="sweep levels and print a rates table")
    _add_run_flags(p, with_problem=True)
    p.add_argument("--lmin", type=int, required=True)
    p.add_argument("--lmax", type=int, required=True)
    return top


def _solver_options_from_args(args):
    raw = {}
    if args.config:
        raw.update(load_config_file(args.config))
    options = _typed_solver_options(raw)
    for key in SOLVER_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            options[key] = value
    return options


def _run_config_from_args(args, problem, level):
    return RunConfig(
        problem=problem, family=args.family, stages=args.stages,
        n0=args.n0, level=level, t_final=args.tfinal, dt=args.dt,
        mu=args.mu, solver=_solver_options_from_args(args), output=args.out)


def _maybe_dump(args, config):
    if not (args.dump_mesh or args.dump_matrix):
        return
    disc = Discretization(config.n0, config.level, mu=config.mu)
    if args.dump_mesh:
        meshmod.dump_mesh(disc.fine_mesh, args.dump_mesh)
    if args.dump_matrix:
        tab = tableau_lookup(config.family, config.stages)
        system = assemble_stage_operator(
            disc.blocks[-1], tab, config.timestep, constrained=disc.cdofs[-1])
        fem.dump_matrix(system.materialize(), args.dump_matrix)


def cli_main(argv=None):
    """Entry point: 0 success, 2 configuration error, 3 solver failure."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "tableau-report":
            print(tableau_report(tableau_lookup(args.family, args.stages)))
            return 0
        if args.command in ("stokes-mms", "ns-taylor-green"):
            config = _run_config_from_args(args, args.command, args.level)
            _maybe_dump(args, config)
            row = run_problem(config)
            print(format_csv_row(row))
            if config.output:
                emit_csv([row], config.output)
            return 0
        # converge
        if args.lmin > args.lmax:
            raise ConfigError("--lmin must not exceed --lmax")
        rows = []
        for level in range(args.lmin, args.lmax + 1):
            config = _run_config_from_args(args, args.problem, level)
            rows.append(run_problem(config))
        print(format_rates_table(rows, convergence_rates(rows)))
        if args.out:
            emit_csv(rows, args.out)
        return 0
    except (ConfigError, KeyError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SolverFailure, NewtonError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(cli_main())
