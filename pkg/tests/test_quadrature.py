"""Triangle quadrature exactness and reference basis functions."""

import numpy as np
import pytest

from irkmg.quadrature import p1_basis, p2_basis, triangle_rule


def _monomial_integral(a, b):
    """Exact integral of x^a y^b over the reference triangle."""
    from math import factorial
    return factorial(a) * factorial(b) / factorial(a + b + 2)


@pytest.mark.parametrize("degree", [1, 2, 3, 4, 5, 8])
def test_rule_exact_for_monomials(degree):
    pts, w = triangle_rule(degree)
    assert np.isclose(w.sum(), 0.5)  # reference triangle area
    for a in range(degree + 1):
        for b in range(degree + 1 - a):
            approx = np.sum(w * pts[:, 0] ** a * pts[:, 1] ** b)
            assert np.isclose(approx, _monomial_integral(a, b),
                              rtol=1e-13, atol=1e-15), (a, b)


def test_rule_points_inside_triangle():
    pts, w = triangle_rule(5)
    assert np.all(pts >= 0)
    assert np.all(pts.sum(axis=1) <= 1 + 1e-14)
    assert np.all(w > 0)


def test_p1_basis_nodal_and_partition():
    nodes = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    phi, dphi = p1_basis(nodes)
    assert np.allclose(phi, np.eye(3))
    pts = np.random.default_rng(0).random((10, 2)) * 0.5
    phi, dphi = p1_basis(pts)
    assert np.allclose(phi.sum(axis=0), 1.0)
    assert np.allclose(dphi.sum(axis=0), 0.0)


def test_p2_basis_nodal_and_partition():
    # Nodes: vertices then edge midpoints, midpoint k opposite vertex k.
    nodes = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0],
                      [0.5, 0.5], [0.0, 0.5], [0.5, 0.0]])
    phi, _ = p2_basis(nodes)
    assert np.allclose(phi, np.eye(6), atol=1e-14)
    pts = np.random.default_rng(1).random((10, 2)) * 0.5
    phi, dphi = p2_basis(pts)
    assert np.allclose(phi.sum(axis=0), 1.0)
    assert np.allclose(dphi.sum(axis=0), 0.0)


def test_p2_gradients_match_finite_differences():
    rng = np.random.default_rng(2)
    pts = rng.random((5, 2)) * 0.4 + 0.1
    h = 1e-6
    _, dphi = p2_basis(pts)
    for d, step in enumerate([np.array([h, 0.0]), np.array([0.0, h])]):
        fp, _ = p2_basis(pts + step)
        fm, _ = p2_basis(pts - step)
        fd = (fp - fm) / (2 * h)
        assert np.allclose(dphi[:, :, d], fd, atol=1e-8)
