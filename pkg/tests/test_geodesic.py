from __future__ import annotations

import io

import numpy as np
import pytest

from dsgeom.charts import chart_metric, make_chart
from dsgeom.errors import DomainError, StepUnderflowError
from dsgeom.geodesic import (
    BOUNDARY_HIT,
    COMPLETE,
    GeodesicState,
    geodesic_rhs,
    integrate,
    metric_norm,
    random_static_states,
    read_csv,
    screened_static_states,
    trajectory_header,
    write_csv,
)
from dsgeom.isometry import VectorField, ambient_generators, coordinate_field, pulled_back
from dsgeom.tensor import flat_metric
from dsgeom.warped import WarpedMetric


def static(R=1.0):
    ch = make_chart("static-47-corrected", R)
    return ch, chart_metric(ch)


def test_rhs_flat_is_zero():
    dx, dv = geodesic_rhs(flat_metric([-1, 1, 1, 1]), GeodesicState([0.0, 1, 2, 3], [1.0, 0.2, 0, 0]))
    assert np.allclose(dx, [1.0, 0.2, 0, 0]) and np.all(dv == 0)


def test_rhs_static_time_direction():
    _, g = static()
    _, dv = geodesic_rhs(g, GeodesicState([0.0, 0.5, 1.0, 0.0], [1.0, 0, 0, 0]))
    # -Gamma^1_00 = +rho A / R^2; a particle at rest is pushed outward
    assert dv[1] == pytest.approx(0.375, abs=1e-8)
    assert np.allclose(dv[[0, 2, 3]], 0, atol=1e-10)


def test_rhs_warped_radial():
    wm = WarpedMetric(4, -1.0)
    _, dv = geodesic_rhs(wm.field, GeodesicState(wm.point(1.0)[0], [1.0, 0, 0, 0]))
    assert np.max(np.abs(dv)) <= 1e-8


def test_flat_straight_line():
    s0 = GeodesicState([0.5, -1.0, 2.0, 0.0], [1.0, 0.3, -0.2, 0.1])
    tr = integrate(flat_metric([-1, 1, 1, 1]), s0, 10.0, 1e-2, sample_every=100)
    exact = s0.x + tr.tau[:, None] * s0.v
    assert np.max(np.abs(tr.x - exact)) <= 1e-10
    assert tr.status == COMPLETE


def test_radial_warped_geodesic_stays_radial():
    wm = WarpedMetric(4, -1.0)
    tr = integrate(wm.field, GeodesicState(wm.point(0.5)[0], [1.0, 0, 0, 0]), 3.0, 1e-2, sample_every=10)
    assert np.max(np.abs(tr.v[:, 1:])) <= 1e-10
    assert tr.x[-1, 0] == pytest.approx(3.5, abs=1e-8)


def test_time_direction_hits_boundary_but_conserves():
    ch, g = static()
    tr = integrate(g, GeodesicState([0.0, 0.5, np.pi / 2, 0.0], [1.0, 0, 0, 0]), 10.0, 1e-3, sample_every=10, margin=0.1)
    # this geodesic leaves the static patch; on its valid segment the invariants hold
    assert tr.status == BOUNDARY_HIT
    assert 1.0 < tr.tau[int(tr.last)] < 2.0
    assert tr.norm[0] == pytest.approx(0.75)
    assert tr.norm_drift() <= 1e-8
    assert tr.charge_drift(g, coordinate_field(4, 0)) <= 1e-8


def test_outward_null_hits_boundary():
    _, g = static()
    rho = 0.3
    a = 1 - rho**2
    v = np.array([1.0 / a, 1.0, 0.0, 0.0])  # A vt^2 - vr^2/A = 0
    s0 = GeodesicState([0.0, rho, 1.0, 0.0], v)
    assert metric_norm(g, s0.x, s0.v) == pytest.approx(0.0, abs=1e-14)
    tr = integrate(g, s0, 10.0, 1e-3, sample_every=50)
    assert tr.status == BOUNDARY_HIT
    rho_path = tr.x[: int(tr.last) + 1, 1]
    assert np.all(np.diff(rho_path) > 0)


def test_rk4_order():
    wm = WarpedMetric(2, 1.0)
    s0 = GeodesicState([1.0, 0.3], [0.4, 0.7])
    ref = integrate(wm.field, s0, 2.0, 0.1 / 16).x[-1]
    e1 = np.max(np.abs(integrate(wm.field, s0, 2.0, 0.1).x[-1] - ref))
    e2 = np.max(np.abs(integrate(wm.field, s0, 2.0, 0.05).x[-1] - ref))
    assert 12.0 <= e1 / e2 <= 20.0


def test_non_killing_charge_drifts():
    _, g = static()
    tr = integrate(g, GeodesicState([0.0, 0.3, 1.0, 0.0], [0.05, 0.01, 0.0, 0.02]), 10.0, 1e-2, sample_every=100)
    dil = VectorField(lambda q: q * np.array([0.0, 1.0, 0.0, 0.0]), "rho d_rho")
    assert tr.charge_drift(g, dil) > 1e-4
    assert tr.charge_drift(g, coordinate_field(4, 0)) <= 1e-10


def test_zero_velocity_stationary():
    _, g = static()
    x0 = np.array([0.0, 0.5, 1.0, 0.0])
    tr = integrate(g, GeodesicState(x0, np.zeros(4)), 1.0, 1e-2)
    assert np.all(tr.x == x0) and np.all(tr.norm == 0.0)


def test_batch_equals_single():
    ch, g = static()
    s = random_static_states(np.random.default_rng(5), 1.0, 3)
    batch = integrate(g, s, 1.0, 1e-2, sample_every=5)
    for i in range(3):
        one = integrate(g, GeodesicState(s.x[i], s.v[i]), 1.0, 1e-2, sample_every=5)
        assert np.allclose(batch.x[:, i], one.x, rtol=0, atol=1e-13)


def test_screened_states_complete(rng):
    _, g = static()
    s0, rejected = screened_static_states(g, rng, 1.0, 5, 10.0, margin=0.1)
    tr = integrate(g, s0, 10.0, 1e-2, sample_every=100, margin=0.1)
    assert np.all(tr.status == COMPLETE)
    assert rejected >= 0


def test_errors():
    _, g = static()
    with pytest.raises(DomainError):
        integrate(g, GeodesicState([0.0, 1.5, 1.0, 0.0], np.zeros(4)), 1.0, 1e-2)
    with pytest.raises(StepUnderflowError):
        integrate(g, GeodesicState([0.0, 0.5, 1.0, 0.0], np.zeros(4)), 1.0, 1e-14)
    with pytest.raises(ValueError):
        integrate(g, GeodesicState([0.0, 0.5, 1.0, 0.0], np.zeros(4)), -1.0, 1e-2)
    with pytest.raises(ValueError):
        GeodesicState([0.0, 1.0], [1.0])


def test_csv_roundtrip(tmp_path):
    ch, g = static()
    tr = integrate(g, GeodesicState([0.0, 0.4, 1.0, 0.0], [0.1, 0.01, 0.0, 0.03]), 0.5, 1e-2, sample_every=10)
    charges = [pulled_back(ch, U) for U in ambient_generators(ch.target)]
    path = tmp_path / "t.csv"
    with open(path, "w", newline="") as fh:
        write_csv(fh, g, tr, charges)
    header, data = read_csv(path)
    assert header == trajectory_header(4, 10)
    assert header[:2] == ["tau", "x0"] and header[-1] == "Q10"
    assert data.shape == (len(tr.tau), 1 + 4 + 4 + 1 + 10)
    assert np.array_equal(data[:, 1:5], tr.x)
    assert np.array_equal(data[:, 9], tr.norm)
    first = path.read_text().splitlines()[1].split(",")
    assert all(float(f"{float(v):.17g}") == float(v) for v in first)
    with pytest.raises(ValueError):
        write_csv(io.StringIO(), g, integrate(g, random_static_states(np.random.default_rng(0), 1.0, 2), 0.1, 1e-2))
