"""Inexact Newton driver and Eisenstat-Walker forcing terms."""

import numpy as np
import pytest

from irkmg.bench import Discretization, RunConfig, run_ns_taylor_green
from irkmg.newton import (NewtonConfig, NewtonError, ew_forcing, newton_solve,
                          warm_start)


class _DirectStats:
    def __init__(self, final_residual):
        self.final_residual = final_residual
        self.iterations = 1


def _direct_solve(J, F, eta):
    dx = np.linalg.solve(J, -F)
    return dx, _DirectStats(np.linalg.norm(F + J @ dx))


# -- forcing-term update ----------------------------------------------------

def test_ew_zero_ratio_hits_floor():
    cfg = NewtonConfig(eta0=0.5)
    eta = ew_forcing(0.01, 0.0, 1.0, cfg)
    assert eta == pytest.approx(1e-12)


def test_ew_direct_formula():
    cfg = NewtonConfig(ew_gamma=1.0, ew_alpha=2.0, eta_max=0.9,
                       safeguard=False)
    assert ew_forcing(0.5, 0.1, 1.0, cfg) == pytest.approx(0.01)


def test_ew_safeguard_trace():
    # Hand-computed trace for ratios (0.5, 0.25), gamma=0.9, alpha=2:
    # step 1: eta = 0.9 * 0.25 = 0.225 (stale = 0.9 * 0.5^2 = 0.225 > 0.1
    #         from eta0 = 0.5 -> max(0.225, 0.225) = 0.225)
    # step 2: eta = 0.9 * 0.0625 = 0.05625; stale = 0.9 * 0.225^2 =
    #         0.04556 < 0.1 -> no safeguard -> 0.05625.
    cfg = NewtonConfig(ew_gamma=0.9, ew_alpha=2.0, eta0=0.5, eta_max=0.9)
    eta1 = ew_forcing(0.5, 0.5, 1.0, cfg)
    assert eta1 == pytest.approx(0.225)
    eta2 = ew_forcing(eta1, 0.125, 0.5, cfg)
    assert eta2 == pytest.approx(0.9 * 0.25 ** 2)


def test_ew_safeguard_activates():
    # Large previous eta keeps the forcing from collapsing too fast.
    cfg = NewtonConfig(ew_gamma=0.9, ew_alpha=2.0, eta_max=0.9)
    eta = ew_forcing(0.8, 1e-3, 1.0, cfg)
    assert eta == pytest.approx(0.9 * 0.64)


def test_ew_capped_at_eta_max():
    cfg = NewtonConfig(eta_max=0.9)
    assert ew_forcing(0.5, 5.0, 1.0, cfg) == pytest.approx(0.9)


def test_ew_rejects_bad_norms():
    with pytest.raises(ValueError):
        ew_forcing(0.5, 1.0, 0.0, NewtonConfig())


# -- warm starts ------------------------------------------------------------

def test_warm_start_copies():
    k = np.array([1.0, 2.0, 3.0])
    w = warm_start(k)
    assert np.array_equal(w, k)
    w[0] = -1.0
    assert k[0] == 1.0


# -- Newton iteration -------------------------------------------------------

def test_linear_problem_one_iteration():
    # Newton on an affine residual converges in exactly one step when the
    # inner solve is tight.
    A = np.array([[3.0, 1.0], [1.0, 2.0]])
    b = np.array([1.0, -1.0])
    residual = lambda x: A @ x - b
    jacobian = lambda x: A
    cfg = NewtonConfig(atol=1e-12, eta0=1e-12)
    x, stats = newton_solve(residual, jacobian, np.zeros(2), cfg,
                            _direct_solve)
    assert stats.iterations == 1
    assert stats.converged
    assert np.allclose(A @ x, b, atol=1e-12)


def test_zero_initial_residual_zero_iterations():
    residual = lambda x: np.zeros(2)
    x, stats = newton_solve(residual, lambda x: np.eye(2), np.ones(2),
                            NewtonConfig(atol=1e-10), _direct_solve)
    assert stats.iterations == 0
    assert stats.converged
    assert np.allclose(x, 1.0)


def test_quadratic_convergence_scalar():
    # x^2 - 2 = 0 with tight forcing shows the quadratic tail.
    residual = lambda x: np.array([x[0] ** 2 - 2.0])
    jacobian = lambda x: np.array([[2.0 * x[0]]])
    cfg = NewtonConfig(atol=1e-12, eta0=1e-12, maxit=20)
    x, stats = newton_solve(residual, jacobian, np.array([2.0]), cfg,
                            _direct_solve)
    assert np.isclose(x[0], np.sqrt(2.0), atol=1e-10)
    norms = stats.residual_norms
    # Superlinear: last reduction factor far smaller than the previous.
    assert norms[-1] <= 1e-3 * norms[-2]


def test_max_iterations_raises():
    residual = lambda x: np.array([np.exp(x[0])])  # no root
    jacobian = lambda x: np.array([[np.exp(x[0])]])
    with pytest.raises(NewtonError):
        newton_solve(residual, jacobian, np.zeros(1),
                     NewtonConfig(atol=1e-12, maxit=3), _direct_solve)


def test_forcing_bound_certified():
    # An inner solver that violates the Eisenstat-Walker inequality is
    # rejected with an error rather than silently accepted.
    A = np.array([[2.0]])

    def sloppy(J, F, eta):
        dx = np.linalg.solve(J, -0.5 * F)  # only halves the residual
        return dx, _DirectStats(np.linalg.norm(F + J @ dx))

    residual = lambda x: A @ x - np.array([1.0])
    cfg = NewtonConfig(atol=1e-12, eta0=1e-3)
    with pytest.raises(NewtonError):
        newton_solve(residual, lambda x: A, np.zeros(1), cfg, sloppy)


def test_config_validation():
    with pytest.raises(ValueError):
        NewtonConfig(eta0=1.5)
    with pytest.raises(ValueError):
        NewtonConfig(atol=0.0)
    with pytest.raises(ValueError):
        NewtonConfig(eta_max=1.0)


# -- Navier-Stokes stage solve regression -----------------------------------

def test_taylor_green_step_newton_budget():
    # One coarse-level benchmark step: few Newton iterations, divergence
    # residual controlled (regression values from the first verified run).
    cfg = RunConfig(problem="ns-taylor-green", family="radauiia", stages=2,
                    n0=4, level=1, dt=1.0 / 64, t_final=1.0 / 16)
    row = run_ns_taylor_green(cfg)
    assert row.avg_newton_iters <= 6.0
    assert row.max_div_residual <= 10.0 * 1e-2 * cfg.num_steps ** -3.0
