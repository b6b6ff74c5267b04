"""Quadrature on the reference triangle and Lagrange basis evaluation.

The reference triangle is {(x, y) : x >= 0, y >= 0, x + y <= 1}.  Rules are
built by collapsing a Gauss-Legendre x Gauss-Jacobi(1, 0) tensor product
(Duffy transform), so a rule of requested degree is exact for all
polynomials of that total degree, at any degree.
"""

from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

__all__ = ["triangle_rule", "p1_basis", "p2_basis"]


@lru_cache(maxsize=None)
def triangle_rule(degree):
    """Points and weights integrating total degree ``degree`` exactly.

    Returns (points (Q, 2), weights (Q,)); weights sum to the reference
    area 1/2.
    """
    if degree < 0:
        raise ValueError("quadrature degree must be >= 0")
    n = max(1, (degree + 2) // 2)
    xg, wg = roots_legendre(n)  # on [-1, 1]
    u = 0.5 * (xg + 1.0)
    wu = 0.5 * wg
    xj, wj = roots_jacobi(n, 1, 0)  # weight (1 - t) on [-1, 1]
    v = 0.5 * (xj + 1.0)
    wv = 0.25 * wj  # absorbs the mapped (1 - v) Jacobian factor

    uu, vv = np.meshgrid(u, v, indexing="ij")
    x = (uu * (1.0 - vv)).ravel()
    y = vv.ravel()
    w = np.outer(wu, wv).ravel()
    pts = np.column_stack([x, y])
    pts.setflags(write=False)
    w.setflags(write=False)
    return pts, w


def p1_basis(points):
    """P1 barycentric basis and gradients at reference points.

    Returns (phi (3, Q), dphi (3, 2)); gradients are constant.
    """
    x, y = points[:, 0], points[:, 1]
    phi = np.stack([1.0 - x - y, x, y])
    dphi = np.array([[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]])
    return phi, dphi


def p2_basis(points):
    """P2 Lagrange basis at reference points.

    Local nodes: vertices 0..2 then edge midpoints, with midpoint k on the
    edge opposite vertex k.  Returns (phi (6, Q), dphi (6, Q, 2)).
    """
    x, y = points[:, 0], points[:, 1]
    lam = np.stack([1.0 - x - y, x, y])  # (3, Q)
    dlam = np.array([[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]])  # (3, 2)

    Q = len(x)
    phi = np.empty((6, Q))
    dphi = np.empty((6, Q, 2))
    for k in range(3):
        phi[k] = lam[k] * (2.0 * lam[k] - 1.0)
        dphi[k] = (4.0 * lam[k] - 1.0)[:, None] * dlam[k]
    # Midpoint k lies between vertices k+1 and k+2 (mod 3).
    for k in range(3):
        a, b = (k + 1) % 3, (k + 2) % 3
        phi[3 + k] = 4.0 * lam[a] * lam[b]
        dphi[3 + k] = 4.0 * (lam[a][:, None] * dlam[b] + lam[b][:, None] * dlam[a])
    return phi, dphi
