import math

import numpy as np
import pytest

import imexdimsim as dm


def test_catalog_lists_all_methods():
    names = dm.catalog_names()
    assert len(names) == 7
    assert "DIMSIM2L" in names


def test_tableau_shapes_and_order():
    t = dm.catalog("DIMSIM3A")
    assert (t.s, t.r, t.p, t.q) == (3, 3, 3, 3)
    assert t.A.shape == (3, 3)
    assert np.allclose(np.triu(t.A), 0.0)
    assert dm.verify_order(t)["max_residual"] < 1e-10
    d = t.to_dict()
    assert set(d) >= {"s", "r", "p", "q", "c", "A", "Astar", "U", "B", "Bstar", "V", "lambda"}


def test_unknown_method_raises():
    with pytest.raises(dm.UnknownNameError):
        dm.catalog("BOGUS")


def test_ssp_coefficient_2l():
    cert = dm.ssp_coefficient(dm.catalog("DIMSIM2L"))
    assert cert["C"] == pytest.approx(1.17, abs=0.01)
    assert cert["C_eff"] == pytest.approx(cert["C"] / 2, rel=1e-15)


def test_stability_matrix_at_origin_is_v():
    t = dm.catalog("DIMSIM2A")
    M = dm.stability_matrix(t, 0.0, 0.0)
    assert np.allclose(M, t.V)


def test_backward_euler_decay():
    t = dm.catalog("DIMSIM1L")
    prob = dm.make_problem("test", lambda0=0.0, lambda1=-1.0)
    h = 0.125
    run = dm.integrate(t, prob, h, start="exact-stages")
    y = run["y"][:, 0]
    assert run["n_steps"] == 8
    ratios = y[2:] / y[1:-1]
    assert np.allclose(ratios, 1.0 / (1.0 + h), rtol=1e-13)


def test_grid_mismatch():
    t = dm.catalog("DIMSIM2A")
    prob = dm.make_problem("test")
    with pytest.raises(dm.GridMismatchError):
        dm.integrate(t, prob, 0.3)


def test_convergence_on_prothero_robinson():
    t = dm.catalog("DIMSIM2L")
    prob = dm.make_problem("prothero_robinson", epsilon=1.0)
    res = dm.convergence_study(t, prob, [0.0125, 0.00625, 0.003125, 0.0015625], reference="exact", start="exact-stages")
    assert res["order"] == pytest.approx(2.0, abs=0.2)


def test_region_se_of_euler_pair():
    region = dm.region_SE(dm.catalog("DIMSIM1L"), n_angles=180)
    assert region["interval"][0] == pytest.approx(-2.0, abs=1e-3)
    assert region["area"] == pytest.approx(math.pi, abs=0.05)
    assert len(region["theta"]) == 180
