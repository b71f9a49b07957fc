"""Coordinate charts on the de Sitter hyperboloid, its Wick-rotated sphere and
the reduced (2+1) model, together with Jacobians and induced metrics.

Charts are addressed by registry name (see :data:`CHART_NAMES`).  A chart
whose ``metric_sign`` is ``-1`` reports its induced metric in the
``(+, -, -, -)`` convention, i.e. ``-J^T eta J``; all others use ``+J^T eta J``.

Closed forms that are published alongside these charts but disagree with the
Jacobian pullback are kept in ``Chart.quoted_metrics`` and only ever compared
against the pullback, never used as ground truth.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np
from scipy.integrate import solve_ivp

from . import fd
from .ambient import DE_SITTER_5, EUCLIDEAN_5, REDUCED_3, Quadric, constraint_residual
from .errors import (
    DomainError,
    EquatorialSingularityError,
    ProjectiveConeError,
    StepTooLargeError,
)
from .tensor import MetricField

DEFAULT_DELTA = 1e-6
BELTRAMI_EPS = 1e-12

CHART_NAMES = (
    "schrodinger-40",
    "schrodinger-43",
    "static-47-printed",
    "static-47-corrected",
    "sphere-polar",
    "hyperboloid-polar",
    "beltrami",
)


@dataclass(frozen=True)
class Chart:
    name: str
    target: Quadric
    coords: tuple[str, ...]
    embed_fn: Callable[[np.ndarray], np.ndarray]
    domain: Callable[[np.ndarray, float], np.ndarray]
    margin: float
    signature: tuple[int, int]
    metric_sign: int = 1
    jacobian_fn: Callable[[np.ndarray], np.ndarray] | None = None
    closed_form_metric: Callable[[np.ndarray], np.ndarray] | None = None
    quoted_metrics: Mapping[str, Callable[[np.ndarray], np.ndarray]] = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return len(self.coords)

    @property
    def radius(self) -> float:
        return self.target.radius

    def contains(self, p, margin: float | None = None) -> bool:
        m = self.margin if margin is None else margin
        return bool(np.all(self.domain(np.asarray(p, dtype=float), m)))


def _unpack(p: np.ndarray):
    return np.moveaxis(p, -1, 0)


def _diag(*entries) -> np.ndarray:
    shape = np.broadcast(*entries).shape
    out = np.zeros(shape + (len(entries), len(entries)))
    for i, e in enumerate(entries):
        out[..., i, i] = e
    return out


def _stack_rows(rows, shape) -> np.ndarray:
    """Assemble a Jacobian from nested lists; scalar 0 entries broadcast."""
    return np.stack(
        [np.stack([np.broadcast_to(e, shape).astype(float) for e in row], -1) for row in rows],
        -2,
    )


# ---------------------------------------------------------------- reduced model


def _schrodinger_40(R: float, delta: float) -> Chart:
    def embed(p):
        t, chi = _unpack(p)
        return np.stack(
            [R * np.sinh(t / R), R * np.cos(chi) * np.cosh(t / R), R * np.sin(chi) * np.cosh(t / R)],
            -1,
        )

    def jac(p):
        t, chi = _unpack(p)
        c, s = np.cosh(t / R), np.sinh(t / R)
        return _stack_rows(
            [
                [c, 0.0],
                [np.cos(chi) * s, -R * np.sin(chi) * c],
                [np.sin(chi) * s, R * np.cos(chi) * c],
            ],
            t.shape,
        )

    def metric(p):
        t, chi = _unpack(p)
        return _diag(np.ones_like(t), -(R**2) * np.cosh(t / R) ** 2)

    def quoted(p):
        t, chi = _unpack(p)
        # cosh argument taken as t/R, the only one in scope
        return _diag(np.full_like(t, R**2), -(R**2) * np.cosh(t / R) ** 2)

    def domain(p, margin):
        return np.all(np.isfinite(p), axis=-1)

    return Chart(
        "schrodinger-40", Quadric(REDUCED_3, R), ("t", "chi"), embed, domain, delta * R,
        signature=(1, 1), metric_sign=-1, jacobian_fn=jac, closed_form_metric=metric,
        quoted_metrics={"Eq(41)": quoted},
    )


def _schrodinger_43(R: float, delta: float) -> Chart:
    def embed(p):
        t, chi = _unpack(p)
        return np.stack(
            [R * np.cos(chi) * np.sinh(t / R), R * np.sin(chi), R * np.cos(chi) * np.cosh(t / R)],
            -1,
        )

    def jac(p):
        t, chi = _unpack(p)
        c, s = np.cosh(t / R), np.sinh(t / R)
        return _stack_rows(
            [
                [np.cos(chi) * c, -R * np.sin(chi) * s],
                [0.0, R * np.cos(chi)],
                [np.cos(chi) * s, -R * np.sin(chi) * c],
            ],
            t.shape,
        )

    def metric(p):
        t, chi = _unpack(p)
        return _diag(np.cos(chi) ** 2, np.full_like(chi, -(R**2)))

    def quoted(p):
        t, chi = _unpack(p)
        return _diag(R**2 * np.cos(chi) ** 2, np.full_like(chi, -(R**2)))

    def domain(p, margin):
        t, chi = _unpack(p)
        return np.isfinite(t) & (np.abs(chi) <= np.pi / 2 - margin / R)

    return Chart(
        "schrodinger-43", Quadric(REDUCED_3, R), ("t", "chi"), embed, domain, delta * R,
        signature=(1, 1), metric_sign=-1, jacobian_fn=jac, closed_form_metric=metric,
        quoted_metrics={"g_r": quoted},
    )


# ---------------------------------------------------------------- static frame


def _spatial(rho, theta, phi):
    st, ct, sp, cp = np.sin(theta), np.cos(theta), np.sin(phi), np.cos(phi)
    xyz = [rho * st * cp, rho * st * sp, rho * ct]
    # rows: xi_1..xi_3; columns: d/drho, d/dtheta, d/dphi
    dxyz = [
        [st * cp, rho * ct * cp, -rho * st * sp],
        [st * sp, rho * ct * sp, rho * st * cp],
        [ct, -rho * st, 0.0],
    ]
    return xyz, dxyz


def static_metric(R: float) -> Callable[[np.ndarray], np.ndarray]:
    """Static-frame de Sitter metric in the (+, -, -, -) convention, coordinates (t, rho, theta, phi)."""

    def metric(p):
        t, rho, theta, phi = _unpack(p)
        a = 1.0 - rho**2 / R**2
        return _diag(a, -1.0 / a, -(rho**2), -(rho**2) * np.sin(theta) ** 2)

    return metric


def _static(R: float, delta: float, corrected: bool) -> Chart:
    def parts(p):
        t, rho, theta, phi = _unpack(p)
        f = np.sqrt(1.0 - rho**2 / R**2)
        c, s = np.cosh(t / R), np.sinh(t / R)
        return t, rho, theta, phi, f, c, s

    def embed(p):
        t, rho, theta, phi, f, c, s = parts(p)
        xyz, _ = _spatial(rho, theta, phi)
        if corrected:
            xi0, xi4 = -R * f * s, R * f * c
        else:
            xi0, xi4 = -R * f * c, R * f * s
        return np.stack([xi0, *xyz, xi4], -1)

    def jac(p):
        t, rho, theta, phi, f, c, s = parts(p)
        _, dxyz = _spatial(rho, theta, phi)
        k = rho / (R * f)  # = -R df/drho
        if corrected:
            row0, row4 = [-f * c, k * s], [f * s, -k * c]
        else:
            row0, row4 = [-f * s, k * c], [f * c, -k * s]
        rows = [
            [row0[0], row0[1], 0.0, 0.0],
            *[[0.0, *r] for r in dxyz],
            [row4[0], row4[1], 0.0, 0.0],
        ]
        return _stack_rows(rows, t.shape)

    def domain(p, margin):
        t, rho, theta, phi = _unpack(p)
        return (
            np.isfinite(t)
            & np.isfinite(phi)
            & (rho > margin)
            & (rho < R - margin)
            & (theta > margin / R)
            & (theta < np.pi - margin / R)
        )

    name = "static-47-corrected" if corrected else "static-47-printed"
    metric = static_metric(R)
    return Chart(
        name, Quadric(DE_SITTER_5, R), ("t", "rho", "theta", "phi"), embed, domain, delta * R,
        signature=(1, 3), metric_sign=-1, jacobian_fn=jac,
        closed_form_metric=metric if corrected else None,
        quoted_metrics={"Eq(48)": metric},
    )


def static_printed_lhs(R: float, rho) -> np.ndarray:
    """Value of the hyperboloid quadratic form on the uncorrected static map."""
    return 2.0 * np.asarray(rho) ** 2 - R**2


# ------------------------------------------------------------ polar embeddings


def _hyperspherical(r, zeta, theta, phi):
    sz, cz, st, ct, sp, cp = (np.sin(zeta), np.cos(zeta), np.sin(theta), np.cos(theta),
                              np.sin(phi), np.cos(phi))
    # ordered xi_1, xi_2, xi_3, xi_4
    pos = [r * sz * st * sp, r * sz * st * cp, r * sz * ct, r * cz]
    # columns d/dr, d/dzeta, d/dtheta, d/dphi
    d = [
        [sz * st * sp, r * cz * st * sp, r * sz * ct * sp, r * sz * st * cp],
        [sz * st * cp, r * cz * st * cp, r * sz * ct * cp, -r * sz * st * sp],
        [sz * ct, r * cz * ct, -r * sz * st, 0.0],
        [cz, -r * sz, 0.0, 0.0],
    ]
    return pos, d


def _polar(R: float, delta: float, sphere: bool) -> Chart:
    sgn = -1.0 if sphere else 1.0

    def embed(p):
        r, zeta, theta, phi = _unpack(p)
        pos, _ = _hyperspherical(r, zeta, theta, phi)
        return np.stack([np.sqrt(sgn * (r**2 - R**2)), *pos], -1)

    def jac(p):
        r, zeta, theta, phi = _unpack(p)
        _, d = _hyperspherical(r, zeta, theta, phi)
        d0 = sgn * r / np.sqrt(sgn * (r**2 - R**2))
        return _stack_rows([[d0, 0.0, 0.0, 0.0], *d], r.shape)

    def metric(p):
        r, zeta, theta, phi = _unpack(p)
        r2 = r**2
        return _diag(1.0 / (1.0 - r2 / R**2), r2, r2 * np.sin(zeta) ** 2,
                     r2 * np.sin(zeta) ** 2 * np.sin(theta) ** 2)

    def angular(r, zeta, theta):
        r2 = r**2
        return r2, r2 * np.sin(zeta) ** 2, r2 * np.sin(zeta) ** 2 * np.sin(theta) ** 2

    def quoted_middle(p):
        r, zeta, theta, phi = _unpack(p)
        return _diag(1.0 + 1.0 / (1.0 - R**2 / r**2), *angular(r, zeta, theta))

    def quoted_final(p):
        r, zeta, theta, phi = _unpack(p)
        k = 1.0 / R**2
        return _diag((2.0 - 1.0 / (k * r**2)) / (1.0 - k * r**2), *angular(r, zeta, theta))

    def domain(p, margin):
        r, zeta, theta, phi = _unpack(p)
        ang = (
            (zeta > margin / R) & (zeta < np.pi - margin / R)
            & (theta > margin / R) & (theta < np.pi - margin / R) & np.isfinite(phi)
        )
        if sphere:
            return ang & (r > margin) & (r < R - margin)
        return ang & (r > R + margin) & np.isfinite(r)

    if sphere:
        return Chart(
            "sphere-polar", Quadric(EUCLIDEAN_5, R), ("r", "zeta", "theta", "phi"), embed, domain,
            delta * R, signature=(4, 0), jacobian_fn=jac, closed_form_metric=metric,
            quoted_metrics={"g_s": metric},
        )
    return Chart(
        "hyperboloid-polar", Quadric(DE_SITTER_5, R), ("r", "zeta", "theta", "phi"), embed, domain,
        delta * R, signature=(3, 1), jacobian_fn=jac, closed_form_metric=metric,
        quoted_metrics={"g_h (middle line)": quoted_middle, "g_h (final line)": quoted_final},
    )


# -------------------------------------------------------------------- Beltrami

MINKOWSKI_4 = np.array([-1.0, 1.0, 1.0, 1.0])


def minkowski_square(x) -> np.ndarray:
    """``sigma^2 = -x0^2 + x1^2 + x2^2 + x3^2``."""
    x = np.asarray(x, dtype=float)
    return np.sum(MINKOWSKI_4 * x * x, axis=-1)


def beltrami_lift(x, R: float, eps: float = BELTRAMI_EPS) -> np.ndarray:
    """Minkowski point -> hyperboloid point on the ``xi_4 < 0`` branch."""
    x = np.asarray(x, dtype=float)
    s = 1.0 + minkowski_square(x) / R**2
    if np.any(s <= eps):
        raise ProjectiveConeError(f"1 + sigma^2/R^2 = {np.min(s):.3g} is not positive")
    root = np.sqrt(s)[..., None]
    return np.concatenate([x / root, -R / root], axis=-1)


def beltrami_project(xi, R: float, eps: float = BELTRAMI_EPS) -> np.ndarray:
    """Ambient point -> Minkowski point ``x^mu = -R xi^mu / xi^4``."""
    xi = np.asarray(xi, dtype=float)
    last = xi[..., 4:5]
    if np.any(np.abs(last) <= eps):
        raise EquatorialSingularityError("projection is undefined where xi_4 = 0")
    return -R * xi[..., :4] / last


def _beltrami_jacobian(R: float, quoted_sign: bool = False):
    def jac(x):
        s = 1.0 + minkowski_square(x) / R**2
        low = MINKOWSKI_4 * x
        s32 = (s**1.5)[..., None, None]
        sign = 1.0 if quoted_sign else -1.0
        top = np.eye(4) / np.sqrt(s)[..., None, None] + sign * x[..., :, None] * low[..., None, :] / (R**2 * s32)
        bottom = low[..., None, :] / (R * s32)
        return np.concatenate([top, bottom], axis=-2)

    return jac


def beltrami_metric(R: float, bracket: float = -1.0):
    """``eta/s + bracket * (x.dx)^2 / (R^2 s^2)`` with ``s = 1 + sigma^2/R^2``.

    ``bracket = -1`` is the induced metric; other values describe alternative
    closed forms under test.
    """

    def metric(x):
        s = 1.0 + minkowski_square(x) / R**2
        low = MINKOWSKI_4 * x
        outer = low[..., :, None] * low[..., None, :]
        return np.diag(MINKOWSKI_4) / s[..., None, None] + bracket * outer / (R**2 * (s**2)[..., None, None])

    return metric


def _beltrami(R: float, delta: float) -> Chart:
    def domain(x, margin):
        s = 1.0 + minkowski_square(x) / R**2
        return np.all(np.isfinite(x), axis=-1) & (s > BELTRAMI_EPS + margin / R)

    # the bracket [x.dx (x) x.dx + 2 x x dx (x) dx], read with Lorentzian
    # contractions throughout, is 3 (x.dx)^2 with a positive prefactor
    return Chart(
        "beltrami", Quadric(DE_SITTER_5, R), ("x0", "x1", "x2", "x3"),
        lambda x: beltrami_lift(x, R), domain, delta * R, signature=(3, 1),
        jacobian_fn=_beltrami_jacobian(R), closed_form_metric=beltrami_metric(R),
        quoted_metrics={"Eq(54)": beltrami_metric(R, bracket=3.0)},
    )


def quoted_beltrami_jacobian(R: float):
    """Implicit-differentiation Jacobian with a positive cross term, kept for comparison."""
    return _beltrami_jacobian(R, quoted_sign=True)


# -------------------------------------------------------------------- registry

_FACTORIES = {
    "schrodinger-40": _schrodinger_40,
    "schrodinger-43": _schrodinger_43,
    "static-47-printed": lambda R, d: _static(R, d, corrected=False),
    "static-47-corrected": lambda R, d: _static(R, d, corrected=True),
    "sphere-polar": lambda R, d: _polar(R, d, sphere=True),
    "hyperboloid-polar": lambda R, d: _polar(R, d, sphere=False),
    "beltrami": _beltrami,
}


def make_chart(name: str, radius: float = 1.0, delta: float = DEFAULT_DELTA) -> Chart:
    try:
        factory = _FACTORIES[name]
    except KeyError:
        raise KeyError(f"unknown chart {name!r}; choose from {', '.join(CHART_NAMES)}") from None
    if not radius > 0:
        raise ValueError("radius must be positive")
    return factory(float(radius), float(delta))


# ------------------------------------------------------------------ operations


def embed(chart: Chart, p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if not chart.contains(p, 0.0):
        raise DomainError(f"{chart.name}: point outside domain: {p}")
    return chart.embed_fn(p)


def jacobian(
    chart: Chart,
    p,
    h: float = fd.DEFAULT_STEP,
    *,
    analytic: bool = False,
    richardson: bool = False,
) -> np.ndarray:
    """``J[..., A, a] = d xi^A / d u^a`` by central differences, or analytically."""
    p = np.asarray(p, dtype=float)
    if not chart.contains(p):
        raise DomainError(f"{chart.name}: point outside domain: {p}")
    if analytic:
        if chart.jacobian_fn is None:
            raise ValueError(f"{chart.name} has no analytic Jacobian")
        return chart.jacobian_fn(p)
    steps = fd.coordinate_steps(p, h)
    for k in range(chart.dim):
        for sign in (1.0, -1.0):
            q = p.copy()
            q[..., k] += sign * steps[..., k]
            if not chart.contains(q, 0.0):
                raise StepTooLargeError(f"{chart.name}: step {h} leaves the domain at {p}")
    grad = fd.gradient(chart.embed_fn, p, h, richardson)  # [..., a, A]
    return np.swapaxes(grad, -1, -2)


def pullback_metric(
    chart: Chart, p, h: float = fd.DEFAULT_STEP, *, analytic: bool = False, richardson: bool = False
) -> np.ndarray:
    """Induced metric ``metric_sign * J^T eta J``."""
    J = jacobian(chart, p, h, analytic=analytic, richardson=richardson)
    eta = chart.target.signature.eta
    g = np.einsum("...Aa,AB,...Bb->...ab", J, eta, J)
    return chart.metric_sign * 0.5 * (g + np.swapaxes(g, -1, -2))


def chart_metric(chart: Chart) -> MetricField:
    """The chart's metric as a :class:`MetricField`.

    Uses the verified closed form when present, otherwise the pullback
    through the analytic Jacobian.
    """
    if chart.closed_form_metric is not None:
        g_fn = chart.closed_form_metric
    else:
        eta = chart.target.signature.eta

        def g_fn(p):
            J = chart.jacobian_fn(p)
            return chart.metric_sign * np.einsum("...Aa,AB,...Bb->...ab", J, eta, J)

    return MetricField(g_fn, chart.dim, chart.domain, chart.signature, chart.margin, chart.name)


def embedding_residual(chart: Chart, p) -> np.ndarray:
    return constraint_residual(chart.target, chart.embed_fn(np.asarray(p, dtype=float)))


def sample_points(chart: Chart, rng: np.random.Generator, count: int, margin_frac: float = 0.05) -> np.ndarray:
    """Uniform interior samples, kept ``margin_frac`` away from coordinate singularities."""
    R = chart.radius
    lo_hi = {
        "t": (-R, R),
        "chi": (-np.pi / 2 * (1 - margin_frac), np.pi / 2 * (1 - margin_frac)),
        "rho": (margin_frac * R, (1 - margin_frac) * R),
        "theta": (margin_frac * np.pi, (1 - margin_frac) * np.pi),
        "zeta": (margin_frac * np.pi, (1 - margin_frac) * np.pi),
        "phi": (0.0, 2 * np.pi),
    }
    if chart.name == "sphere-polar":
        lo_hi["r"] = (margin_frac * R, (1 - margin_frac) * R)
    elif chart.name == "hyperboloid-polar":
        lo_hi["r"] = ((1 + margin_frac) * R, 3.0 * R)
    if chart.name == "beltrami":
        out = np.empty((0, 4))
        while len(out) < count:
            x = rng.uniform(-2 * R, 2 * R, size=(count, 4))
            s = 1.0 + minkowski_square(x) / R**2
            out = np.concatenate([out, x[s > 0.1]])
        return out[:count]
    lows = np.array([lo_hi[c][0] for c in chart.coords])
    highs = np.array([lo_hi[c][1] for c in chart.coords])
    return rng.uniform(lows, highs, size=(count, chart.dim))


# ------------------------------------------------- Robertson-Walker and friends


@dataclass(frozen=True)
class ExpansionProfile:
    a_fn: Callable[[np.ndarray], np.ndarray]
    k: float


def robertson_walker_metric(prof: ExpansionProfile, p) -> np.ndarray:
    """Polar-form Robertson-Walker metric at (t, r, theta, phi)."""
    p = np.asarray(p, dtype=float)
    t, r, theta, phi = _unpack(p)
    if np.any(1.0 - prof.k * r**2 <= 0) or np.any(r <= 0) or np.any((theta <= 0) | (theta >= np.pi)):
        raise DomainError(f"point outside Robertson-Walker coordinate domain: {p}")
    a2 = np.asarray(prof.a_fn(t), dtype=float) ** 2
    if np.any(a2 <= 0):
        raise DomainError("expansion factor must be positive")
    return _diag(-np.ones_like(t), a2 / (1.0 - prof.k * r**2), a2 * r**2, a2 * r**2 * np.sin(theta) ** 2)


def zeta_substitution_residual(k: float, r_grid, r0: float | None = None) -> float:
    """Integrate ``dzeta/dr = sin(zeta)/r`` and compare with ``cos zeta = (1 - k r^2)/(1 + k r^2)``.

    The ODE fixes zeta only up to ``tan(zeta/2) = C r``; the constant is
    matched to the closed form at the first grid point.
    """
    r_grid = np.asarray(r_grid, dtype=float)
    r0 = r_grid[0] if r0 is None else r0
    zeta0 = np.arccos((1 - k * r0**2) / (1 + k * r0**2))
    sol = solve_ivp(
        lambda r, z: np.sin(z) / r, (r0, r_grid[-1]), [zeta0],
        t_eval=r_grid, rtol=1e-12, atol=1e-14, method="DOP853",
    )
    expected = (1 - k * r_grid**2) / (1 + k * r_grid**2)
    return float(np.max(np.abs(np.cos(sol.y[0]) - expected)))


def reduced_static_transform(metric_t_chi: np.ndarray, R: float, chi) -> np.ndarray:
    """Re-express a (t, chi) metric in (eta, rho) with ``rho = R sin chi``, ``eta = R t``."""
    chi = np.asarray(chi, dtype=float)
    inv_jac = _diag(np.full_like(chi, 1.0 / R), 1.0 / (R * np.cos(chi)))  # d(t,chi)/d(eta,rho)
    return np.einsum("...ia,...ij,...jb->...ab", inv_jac, metric_t_chi, inv_jac)


def reduced_static_metric(R: float, rho) -> np.ndarray:
    """Two-dimensional static metric in (eta, rho), (+, -) convention."""
    a = 1.0 - np.asarray(rho, dtype=float) ** 2 / R**2
    return _diag(a, -1.0 / a)
