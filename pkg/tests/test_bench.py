"""Benchmark harness: runs, reports, CSV and the command-line front end."""

import numpy as np
import pytest
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from irkmg import bench, fem
from irkmg.bench import (CSV_HEADER, ConfigError, Discretization, ReportRow,
                         RunConfig, cli_main, convergence_rates, emit_csv,
                         format_csv_row, load_config_file, read_csv,
                         run_stokes_mms)
from irkmg.mesh import build_crossed_grid


# -- configuration ----------------------------------------------------------

def test_run_config_validation():
    with pytest.raises(ConfigError):
        RunConfig(problem="lid-cavity", family="radauiia", stages=2)
    with pytest.raises(ConfigError):
        RunConfig(problem="stokes-mms", family="radauiia", stages=2, dt=2.0)
    with pytest.raises(ConfigError):
        RunConfig(problem="stokes-mms", family="radauiia", stages=2,
                  solver={"smoother.color": 3})


def test_timestep_rule():
    cfg = RunConfig(problem="stokes-mms", family="radauiia", stages=2, level=3)
    assert cfg.num_steps == 2 ** 6
    assert cfg.timestep == pytest.approx(0.5 / 64)
    fixed = RunConfig(problem="stokes-mms", family="radauiia", stages=2,
                      level=3, dt=0.5 / 16)
    assert fixed.num_steps == 16


def test_load_config_file(tmp_path):
    path = tmp_path / "opts.cfg"
    path.write_text("# solver options\nsmoother.sweeps = 3\n\n"
                    "krylov.rtol=1e-6  # tight\n")
    raw = load_config_file(str(path))
    assert raw == {"smoother.sweeps": "3", "krylov.rtol": "1e-6"}
    bad = tmp_path / "bad.cfg"
    bad.write_text("sweeps 3\n")
    with pytest.raises(ConfigError):
        load_config_file(str(bad))


# -- manufactured solutions -------------------------------------------------

def test_velocity_divergence_free_and_tangential():
    rng = np.random.default_rng(0)
    pts = rng.random((200, 2))
    h = 1e-6
    u = bench.exact_velocity
    for t in (0.0, 0.3):
        dudx = (u(pts + [h, 0], t) - u(pts - [h, 0], t)) / (2 * h)
        dudy = (u(pts + [0, h], t) - u(pts - [0, h], t)) / (2 * h)
        div = dudx[:, 0] + dudy[:, 1]
        assert np.max(np.abs(div)) < 1e-8
    # Normal component vanishes on each side of the square.
    for side_pts, comp in [(np.column_stack([np.zeros(50), np.linspace(0, 1, 50)]), 0),
                           (np.column_stack([np.ones(50), np.linspace(0, 1, 50)]), 0),
                           (np.column_stack([np.linspace(0, 1, 50), np.zeros(50)]), 1),
                           (np.column_stack([np.linspace(0, 1, 50), np.ones(50)]), 1)]:
        assert np.max(np.abs(u(side_pts, 0.2)[:, comp])) < 1e-14


def test_velocity_satisfies_stokes():
    # u_t = Laplacian(u) pointwise (p = 0, f = 0).
    rng = np.random.default_rng(1)
    pts = rng.random((50, 2)) * 0.8 + 0.1
    h = 1e-4
    t = 0.17
    u = bench.exact_velocity
    lap = (u(pts + [h, 0], t) + u(pts - [h, 0], t)
           + u(pts + [0, h], t) + u(pts - [0, h], t)
           - 4 * u(pts, t)) / h ** 2
    assert np.max(np.abs(bench.exact_velocity_dt(pts, t) - lap)) < 1e-5


def test_taylor_green_momentum_balance():
    # u_t + (u . grad) u - Laplacian(u) + grad p = 0 pointwise.
    rng = np.random.default_rng(2)
    pts = rng.random((50, 2)) * 0.8 + 0.1
    h = 1e-5
    t = 0.05
    u = bench.exact_velocity
    p = bench.exact_pressure_taylor_green
    dudx = (u(pts + [h, 0], t) - u(pts - [h, 0], t)) / (2 * h)
    dudy = (u(pts + [0, h], t) - u(pts - [0, h], t)) / (2 * h)
    uval = u(pts, t)
    conv = uval[:, :1] * dudx + uval[:, 1:] * dudy
    lap = (u(pts + [h, 0], t) + u(pts - [h, 0], t)
           + u(pts + [0, h], t) + u(pts - [0, h], t) - 4 * uval) / h ** 2
    gradp = np.column_stack([
        (p(pts + [h, 0], t) - p(pts - [h, 0], t)) / (2 * h),
        (p(pts + [0, h], t) - p(pts - [0, h], t)) / (2 * h),
    ])
    resid = bench.exact_velocity_dt(pts, t) + conv - lap + gradp
    assert np.max(np.abs(resid)) < 1e-5


def test_taylor_green_pressure_zero_mean():
    m = build_crossed_grid(8)
    pmap = fem.DofMap(m, "p1")
    p = fem.interpolate(pmap, bench.exact_pressure_taylor_green, t=0.1)
    assert abs(fem.function_mean(m, pmap, p)) < 1e-10


# -- time march oracles -----------------------------------------------------

def test_stokes_march_matches_backward_euler_oracle():
    # Independent one-matrix-per-step implicit Euler saddle solve.
    m = build_crossed_grid(4)
    blocks, vmap, pmap = fem.assemble_blocks(m)
    M, K, B = blocks.M, blocks.K, blocks.B
    cd = fem.velocity_boundary_dofs(m)
    n_u, n_p = blocks.n_u, blocks.n_p
    N, dt = 4, 0.03
    u = fem.interpolate(vmap, bench.exact_velocity, t=0.0)
    coords = vmap.scalar_node_coords()[cd // 2]
    comp = cd % 2
    for n in range(N):
        t1 = (n + 1) * dt
        A = sp.bmat([[M / dt + K, B], [B.T, None]], format="csr")
        rhs = np.concatenate([M @ u / dt, np.zeros(n_p)])
        gvals = bench.exact_velocity(coords, t1)[np.arange(len(cd)), comp]
        Ae, be = fem.apply_dirichlet(A, rhs, cd, gvals)
        Ae = Ae.tolil()
        Ae[n_u, :] = 0.0
        Ae[:, n_u] = 0.0
        Ae[n_u, n_u] = 1.0  # pin one pressure dof
        be[n_u] = 0.0
        u = spla.spsolve(Ae.tocsc(), be)[:n_u]
    cfg = RunConfig(problem="stokes-mms", family="backwardeuler", stages=1,
                    n0=4, level=0, dt=dt, t_final=N * dt)
    row = run_stokes_mms(cfg)
    oracle_err = fem.l2_error(m, vmap, u, bench.exact_velocity,
                              mode="relative", t=N * dt)
    assert row.vel_error == pytest.approx(oracle_err, rel=1e-8)


def test_stokes_march_divergence_controlled():
    cfg = RunConfig(problem="stokes-mms", family="radauiia", stages=2,
                    n0=4, level=0)
    row = run_stokes_mms(cfg)
    tol = 1e-2 * cfg.num_steps ** -3.0
    assert row.max_div_residual <= 10.0 * tol


def test_march_deterministic():
    cfg = RunConfig(problem="stokes-mms", family="radauiia", stages=2,
                    n0=2, level=1)
    a = run_stokes_mms(cfg)
    b = run_stokes_mms(cfg)
    assert a.vel_error == b.vel_error
    assert a.pres_error == b.pres_error
    assert a.avg_linear_iters == b.avg_linear_iters


# -- rates and CSV ----------------------------------------------------------

def _row(level, vel, pres, scheme="radauiia", stages=2):
    return ReportRow(scheme=scheme, stages=stages, level=level,
                     dt=0.5 / 2 ** (level + 3), vel_error=vel,
                     pres_error=pres, avg_linear_iters=5.0,
                     avg_newton_iters=0.0, wall_seconds=1.0)


def test_rates_simple():
    rates = convergence_rates([_row(1, 4.0, 4.0), _row(2, 1.0, 2.0)])
    assert rates[0]["vel_rate"] == pytest.approx(2.0)
    assert rates[0]["pres_rate"] == pytest.approx(1.0)
    rates = convergence_rates([_row(1, 1e-3, 1.0), _row(2, 1.25e-4, 1.0)])
    assert rates[0]["vel_rate"] == pytest.approx(3.0)


def test_rates_published_values_cross_check():
    # Adjacent-level errors 3.380e-6 and 4.297e-7 give 2.98, which rounds
    # to the published 3.0.
    rates = convergence_rates([_row(5, 3.380e-6, 1.0), _row(6, 4.297e-7, 1.0)])
    assert rates[0]["vel_rate"] == pytest.approx(2.98, abs=0.005)
    assert round(rates[0]["vel_rate"], 1) == 3.0


def test_rates_validation():
    with pytest.raises(ValueError):
        convergence_rates([_row(1, 1.0, 1.0)])
    with pytest.raises(ValueError):
        convergence_rates([_row(1, 1.0, 1.0), _row(3, 0.1, 0.1)])
    with pytest.raises(ValueError):
        convergence_rates([_row(1, 1.0, 1.0),
                           _row(2, 0.5, 0.5, scheme="gauss")])
    rates = convergence_rates([_row(1, 0.0, 1.0), _row(2, 1.0, 0.5)])
    assert np.isnan(rates[0]["vel_rate"])  # undefined, reported as such


def test_emit_csv_empty(tmp_path):
    path = tmp_path / "empty.csv"
    emit_csv([], str(path))
    assert path.read_text() == CSV_HEADER + "\n"


def test_emit_csv_roundtrip(tmp_path):
    row = _row(2, 1.23456789e-4, 9.87654321e-6)
    path = tmp_path / "report.csv"
    emit_csv([row], str(path))
    lines = path.read_text().strip().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 2
    assert len(lines[1].split(",")) == 9
    back = read_csv(str(path))[0]
    assert back.vel_error == pytest.approx(row.vel_error, rel=1e-5)
    assert back.scheme == "radauiia"
    assert back.level == 2
    # 6 significant digits, '.' decimal separator
    assert "1.23457e-04".lower() in lines[1].lower() or "0.000123457" in lines[1]


# -- CLI --------------------------------------------------------------------

def test_cli_tableau_report(capsys):
    code = cli_main(["tableau-report", "--family", "radauiia",
                     "--stages", "2"])
    out = capsys.readouterr().out
    assert code == 0
    assert "sum(b): 1" in out
    assert "RadauIIA(2)" in out


def test_cli_missing_flag_exits_2(capsys):
    assert cli_main(["tableau-report", "--stages", "2"]) == 2
    assert cli_main(["stokes-mms"]) == 2
    assert cli_main(["frobnicate"]) == 2


def test_cli_unknown_family_exits_2(capsys):
    assert cli_main(["tableau-report", "--family", "nope",
                     "--stages", "2"]) == 2


def test_cli_stokes_run_with_dumps(tmp_path, capsys):
    out_csv = tmp_path / "row.csv"
    mesh_txt = tmp_path / "mesh.txt"
    mat_txt = tmp_path / "mat.txt"
    code = cli_main([
        "stokes-mms", "--family", "backwardeuler", "--stages", "1",
        "--n0", "2", "--level", "0", "--dt", "0.125",
        "--out", str(out_csv), "--dump-mesh", str(mesh_txt),
        "--dump-matrix", str(mat_txt),
    ])
    assert code == 0
    assert out_csv.exists() and mesh_txt.exists() and mat_txt.exists()
    rows = read_csv(str(out_csv))
    assert rows[0].scheme == "backwardeuler"
    header = mesh_txt.read_text().splitlines()[0].split()
    assert int(header[0]) == 13  # vertices of the twice-crossed unit square
    first = mat_txt.read_text().splitlines()[0].split()
    assert len(first) == 3


def test_cli_config_file_with_flag_override(tmp_path, capsys):
    cfgfile = tmp_path / "solver.cfg"
    cfgfile.write_text("krylov.maxiter=7\nsmoother.sweeps=1\n")
    out_csv = tmp_path / "row.csv"
    code = cli_main([
        "stokes-mms", "--family", "backwardeuler", "--stages", "1",
        "--n0", "2", "--level", "1", "--config", str(cfgfile),
        "--krylov.maxiter", "60", "--out", str(out_csv),
    ])
    assert code == 0  # the override lifts the tiny iteration cap


def test_cli_solver_failure_exits_3(capsys):
    code = cli_main([
        "stokes-mms", "--family", "radauiia", "--stages", "2",
        "--n0", "2", "--level", "1", "--krylov.maxiter", "2",
    ])
    assert code == 3


def test_cli_converge_rates_table(capsys):
    code = cli_main([
        "converge", "--problem", "stokes-mms", "--family", "backwardeuler",
        "--stages", "1", "--n0", "2", "--lmin", "1", "--lmax", "2",
    ])
    out = capsys.readouterr().out
    assert code == 0
    assert "vel_rate" in out
    assert "1->2" in out


def test_cli_identical_invocations_identical_csv(tmp_path):
    args = ["stokes-mms", "--family", "radauiia", "--stages", "2",
            "--n0", "2", "--level", "1"]
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli_main(args + ["--out", str(p1)]) == 0
    assert cli_main(args + ["--out", str(p2)]) == 0
    # Numeric fields agree exactly except possibly wall time.
    r1 = p1.read_text().splitlines()[1].split(",")
    r2 = p2.read_text().splitlines()[1].split(",")
    assert r1[:8] == r2[:8]
