from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dsgeom.tensor import hessian_scalar, sectional_curvature
from dsgeom.warped import (
    GridSpec,
    WarpedMetric,
    bochner_residual,
    comparison_ode_witness,
    distance_function,
    dpsi,
    hessian_identity_residual,
    hessian_norm_sq,
    hessian_r_coeff,
    laplacian_r_closed,
    lct_check,
    psi,
    quoted_laplacian_r,
    radial_hessian,
    radial_laplacian,
)

import oracles


def test_psi_examples():
    assert psi(0.0, 1.7) == 1.7
    assert psi(-1.0, 2.0) == pytest.approx(np.sinh(2.0), rel=1e-14)
    assert psi(-1.0, 2.0) == pytest.approx(3.626860, abs=1e-6)
    assert psi(1.0, np.pi / 2) == pytest.approx(1.0)
    assert dpsi(1.0, np.pi / 2) == pytest.approx(0.0, abs=1e-15)
    for k in (-2.0, 0.0, 3.0):
        assert psi(k, 0.0) == 0.0
        assert dpsi(k, 0.0) == 1.0


@given(st.floats(0.0, 5.0), st.sampled_from([1e-8, -1e-8]))
def test_psi_continuous_in_k(r, k):
    assert abs(psi(k, r) - psi(0.0, r)) <= 1e-6
    assert abs(dpsi(k, r) - dpsi(0.0, r)) <= 1e-6


def test_laplacian_closed_examples():
    assert laplacian_r_closed(0.0, 2.0, 4) == pytest.approx(1.5)
    assert laplacian_r_closed(-1.0, 40.0, 4) == pytest.approx(3.0, abs=1e-12)
    assert laplacian_r_closed(1.0, np.pi / 2, 4) == pytest.approx(0.0, abs=1e-12)
    assert hessian_r_coeff(-4.0, 1.0) == pytest.approx(2 / np.tanh(2.0))


def test_quoted_prefactor_agrees_only_for_unit_k():
    r = np.linspace(0.2, 1.2, 7)
    for k in (-1.0, 0.0, 1.0):
        assert np.allclose(quoted_laplacian_r(k, r, 4), laplacian_r_closed(k, r, 4))
    assert not np.allclose(quoted_laplacian_r(-4.0, r, 4), laplacian_r_closed(-4.0, r, 4))


def test_warped_metric_matches_oracle():
    for k in (-1.0, 0.0, 1.0):
        wm = WarpedMetric(4, k)
        p = wm.point(0.9)[0]
        assert np.allclose(wm.g_fn(p), np.real(oracles.warped_metric(k, p)), atol=1e-14)


def test_radial_laplacian_k_minus_one():
    r = np.linspace(0.1, 5.0, 50)
    lap = radial_laplacian(WarpedMetric(4, -1.0), r)
    assert np.max(np.abs(lap - 3 / np.tanh(r))) <= 1e-4


def test_hessian_identity_and_radial_terms():
    r = np.linspace(0.1, 5.0, 50)
    wm = WarpedMetric(4, -1.0)
    assert hessian_identity_residual(wm, r) <= 1e-4
    hess = radial_hessian(wm, r)
    assert np.max(np.abs(hess[:, 0, 0])) <= 1e-6
    assert np.max(np.abs(hess[:, 0, 1:])) <= 1e-6
    sph = WarpedMetric(4, 1.0)
    assert hessian_identity_residual(sph, np.linspace(0.2, 2.8, 20)) <= 1e-4


@pytest.mark.parametrize("k", [-1.0, 0.0, 1.0])
def test_hessian_eigenvalue_bound(k):
    wm = WarpedMetric(4, k)
    r = np.linspace(0.3, 2.5, 12)
    pts = wm.point(r)
    hess = hessian_scalar(wm.field, distance_function, pts)
    nsq = hessian_norm_sq(wm.g_fn(pts), hess)
    lap = radial_laplacian(wm, r)
    # constant curvature: all tangential eigenvalues equal, so the bound is attained
    assert np.max(lap**2 / 3 - nsq) <= 1e-6
    assert np.max(np.abs(lap**2 / 3 - nsq)) <= 1e-6


def test_lct_equality_and_radial_sectional():
    r = np.linspace(0.1, 5.0, 50)
    rep = lct_check(-1.0, WarpedMetric(4, -1.0), r)
    assert rep.hypothesis_holds
    assert rep.max_equality_deviation <= 1e-4
    wm = WarpedMetric(4, -1.0)
    for x in r[::10]:
        p = wm.point(x)[0]
        assert sectional_curvature(wm.field, p, [1, 0, 0, 0], [0, 0, 1, 0]) == pytest.approx(-1.0, abs=1e-4)


def test_lct_sphere_strict_inequality():
    r = np.linspace(0.1, np.pi - 0.1, 50)
    rep = lct_check(-1.0, WarpedMetric(4, 1.0), r)
    assert rep.hypothesis_holds
    assert np.all(rep.margin > 0)
    assert np.all(rep.inequality_holds)


def test_lct_flat_equality():
    r = np.linspace(0.1, 5.0, 20)
    rep = lct_check(0.0, WarpedMetric(4, 0.0), r)
    assert rep.max_equality_deviation <= 1e-4
    assert np.allclose(rep.bound, 3 / r)


def test_lct_hypothesis_failure_flagged():
    rep = lct_check(1.0, WarpedMetric(4, -1.0), np.linspace(0.2, 2.5, 10))
    assert not rep.hypothesis_holds
    assert rep.notes


@pytest.mark.parametrize("k,r", [(-1.0, 1.0), (0.0, 2.0), (1.0, np.pi / 4)])
def test_bochner_examples(k, r):
    assert bochner_residual(WarpedMetric(4, k), r) <= 1e-3


def test_bochner_closed_forms():
    # oracle: ||Hr||^2 = 3 coth^2 r, (Delta r)' = -3/sinh^2 r, Ric = -3
    r = 1.0
    assert 3 / np.tanh(r) ** 2 - 3 / np.sinh(r) ** 2 - 3 == pytest.approx(0.0, abs=1e-14)


def test_ode_witness():
    assert comparison_ode_witness(-1.0, 4) <= 1e-10
    assert comparison_ode_witness(-4.0, 2) <= 1e-10
    wrong = comparison_ode_witness(-1.0, 4, np.array([1.0]), trial=lambda r: r, dtrial=np.ones_like)
    assert wrong >= 1.0
    with pytest.raises(ValueError):
        comparison_ode_witness(1.0, 4)


def test_grid_spec():
    assert np.allclose(GridSpec(1.0, 3.0, 3).values(), [1, 2, 3])
    assert np.allclose(GridSpec(1.0, 100.0, 3, "log").values(), [1, 10, 100])
    with pytest.raises(ValueError):
        GridSpec(2.0, 1.0, 3).values()


def test_warped_rejects_small_dimension():
    with pytest.raises(ValueError):
        WarpedMetric(1, 0.0)
