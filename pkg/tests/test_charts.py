from __future__ import annotations

from contextlib import nullcontext

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dsgeom.charts import (
    CHART_NAMES,
    ExpansionProfile,
    beltrami_lift,
    beltrami_metric,
    beltrami_project,
    chart_metric,
    embed,
    embedding_residual,
    jacobian,
    make_chart,
    pullback_metric,
    reduced_static_metric,
    reduced_static_transform,
    robertson_walker_metric,
    sample_points,
    static_printed_lhs,
    zeta_substitution_residual,
)
from dsgeom.errors import DomainError, EquatorialSingularityError, ProjectiveConeError

import oracles


def test_registry_names():
    assert set(CHART_NAMES) == {
        "schrodinger-40", "schrodinger-43", "static-47-printed", "static-47-corrected",
        "sphere-polar", "hyperboloid-polar", "beltrami",
    }
    with pytest.raises(KeyError):
        make_chart("nope")


def test_embed_examples():
    assert np.allclose(embed(make_chart("schrodinger-40"), [0.0, 0.0]), [0, 1, 0], atol=1e-15)
    assert np.allclose(embed(make_chart("schrodinger-43"), [0.0, np.pi / 2 - 1e-9]), [0, 1, 0], atol=1e-8)
    xi = embed(make_chart("static-47-corrected"), [0.0, 0.6, np.pi / 2, 0.0])
    assert xi[1] == pytest.approx(0.6)
    assert abs(xi[2]) < 1e-15 and abs(xi[3]) < 1e-15
    assert abs(oracles.ambient_inner((-1, 1, 1, 1, 1), xi, xi) - 1.0) < 1e-12


def test_printed_static_residual():
    ch = make_chart("static-47-printed", 1.5)
    p = np.array([[0.2, 0.3, 1.0, 0.4], [1.0, 1.2, 2.0, 3.0]])
    res = embedding_residual(ch, p)
    assert np.allclose(res, 2 * p[:, 1] ** 2 - 2 * 1.5**2, atol=1e-12)
    assert np.allclose(static_printed_lhs(1.5, p[:, 1]), 2 * p[:, 1] ** 2 - 1.5**2)


@pytest.mark.parametrize("name", [n for n in CHART_NAMES if n != "static-47-printed"])
@pytest.mark.parametrize("R", [0.5, 1.0, 2.0])
def test_constraint_everywhere(name, R, rng):
    ch = make_chart(name, R)
    p = sample_points(ch, rng, 100)
    assert np.max(np.abs(embedding_residual(ch, p))) <= 1e-12 * R**2


@pytest.mark.parametrize("name", CHART_NAMES)
def test_fd_jacobian_matches_analytic(name, rng):
    ch = make_chart(name, 1.3)
    p = sample_points(ch, rng, 50)
    fd_j = jacobian(ch, p, 1e-5, richardson=True)
    assert np.max(np.abs(fd_j - jacobian(ch, p, analytic=True))) <= 1e-8
    g_fd = pullback_metric(ch, p, 1e-5, richardson=True)
    assert np.max(np.abs(g_fd - pullback_metric(ch, p, analytic=True))) <= 1e-8


def test_jacobian_examples():
    J = jacobian(make_chart("beltrami"), np.zeros(4), analytic=True)
    assert np.allclose(J[:4], np.eye(4)) and np.allclose(J[4], 0)
    J = jacobian(make_chart("schrodinger-40"), np.zeros(2), analytic=True)
    assert J[0, 0] == pytest.approx(1.0)


def test_pullback_examples():
    g = pullback_metric(make_chart("sphere-polar"), [0.5, 1.0, 0.7, 0.2], analytic=True)
    assert g[0, 0] == pytest.approx(4 / 3, abs=1e-12)
    g = pullback_metric(make_chart("static-47-corrected"), [0.0, 0.5, 1.0, 0.0], analytic=True)
    assert g[0, 0] == pytest.approx(0.75, abs=1e-12)
    assert g[1, 1] == pytest.approx(-4 / 3, abs=1e-12)
    assert g[2, 2] == pytest.approx(-0.25, abs=1e-12)
    g = pullback_metric(make_chart("beltrami"), np.zeros(4), analytic=True)
    assert np.max(np.abs(g - np.diag([-1.0, 1, 1, 1]))) <= 1e-12


@pytest.mark.parametrize("R", [0.5, 1.0, 2.0])
def test_static_pullback_is_closed_form(R, rng):
    ch = make_chart("static-47-corrected", R)
    p = sample_points(ch, rng, 100)
    g = pullback_metric(ch, p, analytic=True)
    ref = np.array([np.real(oracles.static_metric(R, q)) for q in p])
    assert np.max(np.abs(g - ref)) <= 1e-10


def test_beltrami_pullback_vs_oracle(rng):
    ch = make_chart("beltrami", 1.7)
    for x in sample_points(ch, rng, 20):
        g = pullback_metric(ch, x, analytic=True)
        assert np.max(np.abs(g - oracles.beltrami_pullback(x, 1.7))) <= 1e-10
        assert np.max(np.abs(beltrami_metric(1.7)(x) - g)) <= 1e-10


def test_beltrami_examples():
    assert np.allclose(beltrami_lift(np.zeros(4), 1.0), [0, 0, 0, 0, -1])
    assert np.allclose(beltrami_project(np.array([0, 0, 0, 0, -2.0]), 2.0), 0)
    xi = beltrami_lift(np.array([0.0, 1.0, 0.0, 0.0]), 1.0)
    assert np.allclose(xi, [0, 1 / np.sqrt(2), 0, 0, -1 / np.sqrt(2)])
    assert np.allclose(xi, oracles.beltrami_lift([0.0, 1.0, 0.0, 0.0], 1.0))
    with pytest.raises(ProjectiveConeError):
        beltrami_lift(np.array([1.0 - 1e-14, 0, 0, 0]), 1.0)
    with pytest.raises(EquatorialSingularityError):
        beltrami_project(np.array([0.0, 1.0, 0, 0, 1e-15]), 1.0)


def test_beltrami_roundtrip_1000(rng):
    R = 1.0
    x = sample_points(make_chart("beltrami", R), rng, 1000)
    s = 1 + (-x[:, 0] ** 2 + np.sum(x[:, 1:] ** 2, 1)) / R**2
    assert np.all(np.abs(s) > 0.1)
    back = beltrami_project(beltrami_lift(x, R), R)
    assert np.max(np.abs(back - x)) <= 1e-12 * max(1.0, np.max(np.abs(x)))


@settings(max_examples=80)
@given(st.lists(st.floats(-3, 3), min_size=4, max_size=4), st.sampled_from([0.5, 1.0, 2.0]))
def test_beltrami_roundtrip_property(x, R):
    x = np.array(x)
    s = 1 + (-x[0] ** 2 + np.sum(x[1:] ** 2)) / R**2
    if s <= 0.1:
        with pytest.raises(ProjectiveConeError) if s <= 1e-12 else nullcontext():
            beltrami_lift(x, R)
        return
    back = beltrami_project(beltrami_lift(x, R), R)
    assert np.max(np.abs(back - x)) <= 1e-12 * max(1.0, np.max(np.abs(x)))


def test_schrodinger_43_reduced_metric():
    ch = make_chart("schrodinger-43", 1.0)
    p = np.array([[0.3, 0.2], [-1.0, 1.1]])
    g = pullback_metric(ch, p, analytic=True)
    assert np.max(np.abs(g - ch.quoted_metrics["g_r"](p))) <= 1e-10
    moved = reduced_static_transform(ch.quoted_metrics["g_r"](p), 1.0, p[:, 1])
    assert np.max(np.abs(moved - reduced_static_metric(1.0, np.sin(p[:, 1])))) <= 1e-10


def test_chart_metric_domain():
    g = chart_metric(make_chart("static-47-corrected", 1.0))
    with pytest.raises(DomainError):
        g.require(np.array([0.0, 1.2, 1.0, 0.0]))


def test_robertson_walker_examples():
    p = np.array([0.0, 0.5, np.pi / 2, 0.0])
    flat = robertson_walker_metric(ExpansionProfile(lambda t: np.ones_like(t), 0.0), p)
    assert np.allclose(flat, np.diag([-1, 1, 0.25, 0.25]))
    closed = robertson_walker_metric(ExpansionProfile(lambda t: np.ones_like(t), 1.0), p)
    assert np.allclose(closed, np.diag([-1, 4 / 3, 0.25, 0.25]))
    two = robertson_walker_metric(ExpansionProfile(lambda t: 2 * np.ones_like(t), 0.0), [0.0, 1.0, np.pi / 2, 0.0])
    assert np.allclose(two, np.diag([-1, 4, 4, 4]))


def test_zeta_substitution():
    assert zeta_substitution_residual(1.0, np.linspace(0.1, 0.9, 30)) <= 1e-8
