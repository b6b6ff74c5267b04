"""Butcher tableau registry with consistency and stability analysis."""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ButcherTableau",
    "tableau_lookup",
    "consistency_check",
    "stability_function",
    "registry_keys",
    "tableau_report",
]

_S3 = np.sqrt(3.0)
_S6 = np.sqrt(6.0)
_S15 = np.sqrt(15.0)


@dataclass(frozen=True)
class ButcherTableau:
    name: str
    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    order: int
    stage_order: int
    l_stable: bool

    @property
    def r(self):
        return len(self.b)

    @property
    def stiffly_accurate(self):
        return bool(np.allclose(self.A[-1], self.b, atol=1e-14, rtol=0.0))

    def __post_init__(self):
        object.__setattr__(self, "A", np.asarray(self.A, dtype=float))
        object.__setattr__(self, "b", np.asarray(self.b, dtype=float))
        object.__setattr__(self, "c", np.asarray(self.c, dtype=float))


def _gauss(r):
    if r == 2:
        A = [[1 / 4, 1 / 4 - _S3 / 6], [1 / 4 + _S3 / 6, 1 / 4]]
        b = [1 / 2, 1 / 2]
        c = [1 / 2 - _S3 / 6, 1 / 2 + _S3 / 6]
        return ButcherTableau("Gauss(2)", A, b, c, 4, 2, False)
    if r == 3:
        A = [
            [5 / 36, 2 / 9 - _S15 / 15, 5 / 36 - _S15 / 30],
            [5 / 36 + _S15 / 24, 2 / 9, 5 / 36 - _S15 / 24],
            [5 / 36 + _S15 / 30, 2 / 9 + _S15 / 15, 5 / 36],
        ]
        b = [5 / 18, 4 / 9, 5 / 18]
        c = [1 / 2 - _S15 / 10, 1 / 2, 1 / 2 + _S15 / 10]
        return ButcherTableau("Gauss(3)", A, b, c, 6, 3, False)
    raise KeyError


def _radauiia(r):
    if r == 2:
        A = [[5 / 12, -1 / 12], [3 / 4, 1 / 4]]
        return ButcherTableau("RadauIIA(2)", A, [3 / 4, 1 / 4], [1 / 3, 1.0], 3, 2, True)
    if r == 3:
        A = [
            [(88 - 7 * _S6) / 360, (296 - 169 * _S6) / 1800, (-2 + 3 * _S6) / 225],
            [(296 + 169 * _S6) / 1800, (88 + 7 * _S6) / 360, (-2 - 3 * _S6) / 225],
            [(16 - _S6) / 36, (16 + _S6) / 36, 1 / 9],
        ]
        b = [(16 - _S6) / 36, (16 + _S6) / 36, 1 / 9]
        c = [(4 - _S6) / 10, (4 + _S6) / 10, 1.0]
        return ButcherTableau("RadauIIA(3)", A, b, c, 5, 3, True)
    raise KeyError


def _lobattoiiic(r):
    if r == 2:
        A = [[1 / 2, -1 / 2], [1 / 2, 1 / 2]]
        return ButcherTableau("LobattoIIIC(2)", A, [1 / 2, 1 / 2], [0.0, 1.0], 2, 1, True)
    if r == 3:
        A = [[1 / 6, -1 / 3, 1 / 6], [1 / 6, 5 / 12, -1 / 12], [1 / 6, 2 / 3, 1 / 6]]
        b = [1 / 6, 2 / 3, 1 / 6]
        return ButcherTableau("LobattoIIIC(3)", A, b, [0.0, 1 / 2, 1.0], 4, 2, True)
    raise KeyError


def _pareschi_russo(r):
    if r != 2:
        raise KeyError
    a = 1.0 - np.sqrt(2.0) / 2.0
    A = [[a, 0.0], [1.0 - 2.0 * a, a]]
    return ButcherTableau("DIRK-PareschiRusso(2)", A, [1 / 2, 1 / 2], [a, 1.0 - a], 2, 1, True)


def _alexander(r):
    if r != 3:
        raise KeyError
    # gamma is the real root of g^3 - 3 g^2 + 3 g / 2 - 1/6 in (1/6, 1/2).
    roots = np.roots([1.0, -3.0, 1.5, -1 / 6])
    g = float(min(r.real for r in roots if abs(r.imag) < 1e-12 and 0.0 < r.real < 0.5))
    tau = (1.0 + g) / 2.0
    b1 = -(6.0 * g * g - 16.0 * g + 1.0) / 4.0
    b2 = (6.0 * g * g - 20.0 * g + 5.0) / 4.0
    A = [[g, 0.0, 0.0], [tau - g, g, 0.0], [b1, b2, g]]
    return ButcherTableau("DIRK-Alexander(3)", A, [b1, b2, g], [g, tau, 1.0], 3, 1, True)


def _backward_euler(r):
    if r != 1:
        raise KeyError
    return ButcherTableau("BackwardEuler", [[1.0]], [1.0], [1.0], 1, 1, True)


_FAMILIES = {
    "gauss": _gauss,
    "radauiia": _radauiia,
    "lobattoiiic": _lobattoiiic,
    "dirk-pareschirusso": _pareschi_russo,
    "dirk-alexander": _alexander,
    "backwardeuler": _backward_euler,
}

_ALIASES = {
    "radau": "radauiia",
    "lobatto": "lobattoiiic",
    "pareschirusso": "dirk-pareschirusso",
    "dirk2": "dirk-pareschirusso",
    "alexander": "dirk-alexander",
    "dirk3": "dirk-alexander",
    "be": "backwardeuler",
}


def tableau_lookup(family, stages):
    """Exact coefficients for a supported (family, stage count) pair."""
    key = family.strip().lower().replace("_", "-")
    key = _ALIASES.get(key, key)
    if key not in _FAMILIES:
        raise KeyError(f"unknown tableau family {family!r}")
    try:
        return _FAMILIES[key](int(stages))
    except KeyError:
        raise KeyError(f"family {family!r} does not provide a {stages}-stage scheme") from None


def registry_keys():
    """All supported (family, stages) pairs."""
    return [
        ("gauss", 2), ("gauss", 3),
        ("radauiia", 2), ("radauiia", 3),
        ("lobattoiiic", 2), ("lobattoiiic", 3),
        ("dirk-pareschirusso", 2), ("dirk-alexander", 3),
        ("backwardeuler", 1),
    ]


def stability_function(tab, z):
    """r(z) = 1 + z b^T (I - z A)^{-1} 1 for the Dahlquist test problem."""
    z = complex(z)
    I = np.eye(tab.r)
    mat = I - z * tab.A
    try:
        sol = np.linalg.solve(mat, np.ones(tab.r))
    except np.linalg.LinAlgError:
        raise ZeroDivisionError(f"z={z} is a pole of the stability function") from None
    return 1.0 + z * (tab.b @ sol)


def quadrature_order(tab, tol=1e-12, kmax=20):
    """Largest k with sum(b c^(j-1)) = 1/j for all j <= k."""
    k = 0
    for j in range(1, kmax + 1):
        if abs(tab.b @ tab.c ** (j - 1) - 1.0 / j) > tol:
            break
        k = j
    return k


def stage_order_conditions(tab, tol=1e-12, kmax=20):
    """Largest q with A c^(k-1) = c^k / k for all k <= q (condition C(q))."""
    q = 0
    for k in range(1, kmax + 1):
        if np.max(np.abs(tab.A @ tab.c ** (k - 1) - tab.c ** k / k)) > tol:
            break
        q = k
    return q


def consistency_check(tab, tol=1e-12):
    """Consistency and order-condition report for a tableau.

    Returns a dict with the weight-sum and row-sum defects, the largest
    quadrature order B(k) and stage-order condition C(q) satisfied, and an
    overall pass flag.
    """
    sum_b = float(np.sum(tab.b))
    row_defect = float(np.max(np.abs(tab.A.sum(axis=1) - tab.c)))
    bk = quadrature_order(tab, tol=tol)
    cq = stage_order_conditions(tab, tol=tol)
    ok = abs(sum_b - 1.0) <= 1e-14 and row_defect <= 1e-14 and bk >= tab.order
    return {
        "name": tab.name,
        "sum_b": sum_b,
        "row_sum_defect": row_defect,
        "quadrature_order": bk,
        "stage_order_condition": cq,
        "passed": bool(ok),
    }


def tableau_report(tab):
    """Plain-text report used by the CLI 'tableau-report' subcommand."""
    rep = consistency_check(tab)
    rinf = abs(stability_function(tab, -1e6))
    lines = [
        f"name: {tab.name}",
        f"stages: {tab.r}",
        f"order: {tab.order}",
        f"stage order: {tab.stage_order}",
        f"sum(b): {rep['sum_b']:.16g}",
        f"row-sum defect: {rep['row_sum_defect']:.3e}",
        f"|r(-1e6)|: {rinf:.6e}",
        f"L-stable: {tab.l_stable}",
        f"consistency: {'pass' if rep['passed'] else 'FAIL'}",
    ]
    return "\n".join(lines)
