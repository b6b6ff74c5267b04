"""Inexact Newton driver with Eisenstat-Walker forcing terms.

The linear solve for each Newton direction is stopped adaptively:
||F + J dk|| <= eta ||F||, with eta from the "Choice 2" update
eta_k = gamma (||F_k|| / ||F_{k-1}||)^alpha, safeguarded so convergence
history is not discarded too eagerly.
"""

from dataclasses import dataclass, field

import numpy as np

__all__ = ["NewtonConfig", "NewtonStats", "ew_forcing", "newton_solve", "warm_start"]

ETA_FLOOR = 1e-12


@dataclass
class NewtonConfig:
    atol: float = 1e-10
    maxit: int = 20
    ew_gamma: float = 0.9
    ew_alpha: float = 2.0
    eta0: float = 0.5
    eta_max: float = 0.9
    safeguard: bool = True

    def __post_init__(self):
        if not 0.0 <= self.eta0 < 1.0 or not 0.0 < self.eta_max < 1.0:
            raise ValueError("forcing terms must lie in [0, 1)")
        if self.atol <= 0.0:
            raise ValueError("tolerance must be positive")


@dataclass
class NewtonStats:
    iterations: int = 0
    residual_norms: list = field(default_factory=list)
    linear_stats: list = field(default_factory=list)
    converged: bool = False


class NewtonError(RuntimeError):
    pass


def ew_forcing(eta_prev, norm_k, norm_prev, config):
    """Next forcing term from the residual-reduction history."""
    if norm_prev <= 0.0:
        raise ValueError("previous residual norm must be positive")
    eta = config.ew_gamma * (norm_k / norm_prev) ** config.ew_alpha
    if config.safeguard:
        stale = config.ew_gamma * eta_prev ** config.ew_alpha
        if stale > 0.1:
            eta = max(eta, stale)
    return float(np.clip(eta, ETA_FLOOR, config.eta_max))


def warm_start(previous_stages):
    """Initial guess for the next step's stage vector (copy of the last)."""
    return np.array(previous_stages, dtype=float, copy=True)


def newton_solve(residual, jacobian, x0, config, linear_solve):
    """Newton iteration with adaptive inner tolerances.

    Parameters
    ----------
    residual : callable(x) -> F(x)
    jacobian : callable(x) -> J
        Linearization of the residual at x (any object the linear solver
        understands).
    x0 : initial guess
    config : NewtonConfig
    linear_solve : callable(J, F, eta) -> (dx, stats)
        Solves J dx = -F to relative tolerance eta; the returned stats
        must expose ``final_residual`` so the forcing inequality can be
        certified.

    Returns (x, NewtonStats).  Raises NewtonError when the iteration
    budget is exhausted.
    """
    x = np.array(x0, dtype=float, copy=True)
    stats = NewtonStats()
    F = residual(x)
    norm = np.linalg.norm(F)
    stats.residual_norms.append(norm)
    eta = config.eta0

    while norm > config.atol:
        if stats.iterations >= config.maxit:
            raise NewtonError(
                f"Newton failed to converge in {config.maxit} iterations "
                f"(residual {norm:.3e}, tolerance {config.atol:.3e})")
        J = jacobian(x)
        dx, lin = linear_solve(J, F, eta)
        if lin.final_residual > max(eta * norm, config.atol) * (1.0 + 1e-8):
            raise NewtonError(
                f"inner solve violated the forcing bound: "
                f"{lin.final_residual:.3e} > {eta * norm:.3e}")
        stats.linear_stats.append(lin)
        x += dx
        stats.iterations += 1
        F = residual(x)
        prev = norm
        norm = np.linalg.norm(F)
        stats.residual_norms.append(norm)
        eta = ew_forcing(eta, norm, prev, config)

    stats.converged = True
    return x, stats
