"""Butcher tableau registry, consistency and stability checks."""

import numpy as np
import pytest

from irkmg.tableaux import (consistency_check, quadrature_order,
                            registry_keys, stability_function,
                            stage_order_conditions, tableau_lookup,
                            tableau_report)

ALL_KEYS = registry_keys()


def test_registry_complete():
    assert ("gauss", 2) in ALL_KEYS
    assert ("radauiia", 3) in ALL_KEYS
    assert ("backwardeuler", 1) in ALL_KEYS
    assert len(ALL_KEYS) == 9


@pytest.mark.parametrize("family,stages", ALL_KEYS)
def test_consistency(family, stages):
    tab = tableau_lookup(family, stages)
    rep = consistency_check(tab)
    assert abs(rep["sum_b"] - 1.0) <= 1e-14
    assert rep["row_sum_defect"] <= 1e-14
    assert rep["quadrature_order"] >= tab.order
    assert rep["passed"]


@pytest.mark.parametrize("family,stages", ALL_KEYS)
def test_stiff_limit(family, stages):
    tab = tableau_lookup(family, stages)
    r_inf = abs(stability_function(tab, -1e6))
    if tab.l_stable:
        assert r_inf <= 1e-4
    else:
        assert r_inf >= 0.99  # Gauss: |r(-inf)| = 1


@pytest.mark.parametrize("family,stages", ALL_KEYS)
def test_dahlquist_observed_order(family, stages):
    # y' = -y on [0, 1]; observed order from two step sizes.
    tab = tableau_lookup(family, stages)
    errs = []
    for N in (8, 16):
        y = 1.0
        for _ in range(N):
            y = y * stability_function(tab, -1.0 / N).real
        errs.append(abs(y - np.exp(-1.0)))
    observed = np.log2(errs[0] / errs[1])
    assert abs(observed - tab.order) < 0.2


def test_stage_order_declarations():
    for family, stages in ALL_KEYS:
        tab = tableau_lookup(family, stages)
        assert stage_order_conditions(tab) >= tab.stage_order


def test_stiffly_accurate_flags():
    assert not tableau_lookup("gauss", 2).stiffly_accurate
    assert not tableau_lookup("gauss", 3).stiffly_accurate
    for family, stages in [("radauiia", 2), ("radauiia", 3),
                           ("lobattoiiic", 2), ("lobattoiiic", 3),
                           ("dirk-alexander", 3), ("backwardeuler", 1)]:
        assert tableau_lookup(family, stages).stiffly_accurate


def test_known_coefficients():
    tab = tableau_lookup("radauiia", 2)
    assert np.allclose(tab.A, [[5 / 12, -1 / 12], [3 / 4, 1 / 4]])
    assert np.allclose(tab.b, [3 / 4, 1 / 4])
    assert np.allclose(tab.c, [1 / 3, 1.0])
    g2 = tableau_lookup("gauss", 2)
    s3 = np.sqrt(3.0)
    assert np.allclose(g2.c, [0.5 - s3 / 6, 0.5 + s3 / 6])
    pr = tableau_lookup("dirk-pareschirusso", 2)
    assert np.isclose(pr.A[0, 0], 1.0 - np.sqrt(2.0) / 2.0)
    assert np.allclose(np.triu(pr.A, 1), 0.0)  # diagonally implicit
    alex = tableau_lookup("dirk-alexander", 3)
    g = alex.A[0, 0]
    assert abs(g ** 3 - 3 * g ** 2 + 1.5 * g - 1 / 6) < 1e-12
    assert np.allclose(np.triu(alex.A, 1), 0.0)


def test_lookup_aliases_and_errors():
    assert tableau_lookup("radau", 2).name == "RadauIIA(2)"
    assert tableau_lookup("Radau_IIA".replace("_", ""), 2).name == "RadauIIA(2)"
    assert tableau_lookup("be", 1).name == "BackwardEuler"
    with pytest.raises(KeyError):
        tableau_lookup("nope", 2)
    with pytest.raises(KeyError):
        tableau_lookup("radauiia", 4)


def test_stability_function_values():
    # Backward Euler: r(z) = 1 / (1 - z).
    be = tableau_lookup("backwardeuler", 1)
    for z in (-0.5, -2.0, 1.0 + 1.0j):
        assert np.isclose(stability_function(be, z), 1.0 / (1.0 - z))
    # Gauss(2) is the (2,2) Pade approximant of exp.
    g2 = tableau_lookup("gauss", 2)
    z = -0.7
    pade = (1 + z / 2 + z ** 2 / 12) / (1 - z / 2 + z ** 2 / 12)
    assert np.isclose(stability_function(g2, z).real, pade, rtol=1e-12)


def test_quadrature_order_matches_declared():
    for family, stages in ALL_KEYS:
        tab = tableau_lookup(family, stages)
        assert quadrature_order(tab) == tab.order


def test_report_text():
    text = tableau_report(tableau_lookup("radauiia", 2))
    assert "RadauIIA(2)" in text
    assert "consistency: pass" in text
    assert "sum(b): 1" in text
