"""Finite-difference tensor calculus on a coordinate metric.

Index conventions (all arrays broadcast over leading batch axes):

* ``gamma[..., a, b, c]``  = Gamma^a_{bc}
* ``riemann[..., a, b, c, d]`` = R^a_{bcd}
  = d_c Gamma^a_{db} - d_d Gamma^a_{cb} + Gamma^a_{ce} Gamma^e_{db} - Gamma^a_{de} Gamma^e_{cb}
* ``ricci[..., b, d]`` = R^a_{bad}

With these conventions the unit round sphere has Ricci = (n-1) g and
sectional curvature +1.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import fd
from .errors import DegenerateMetricError, DegeneratePlaneError, DomainError, StepTooLargeError

log = logging.getLogger(__name__)

DomainFn = Callable[[np.ndarray, float], np.ndarray]


@dataclass(frozen=True)
class MetricField:
    """A metric given by components in one coordinate chart.

    ``g_fn`` maps points of shape ``(..., m)`` to matrices ``(..., m, m)``.
    ``domain(p, margin)`` returns a boolean array; ``margin`` is the
    distance kept from coordinate singularities when checking interior
    points.
    """

    g_fn: Callable[[np.ndarray], np.ndarray]
    dim: int
    domain: DomainFn | None = None
    signature: tuple[int, int] | None = None
    margin: float = 0.0
    name: str = "metric"

    def __call__(self, p) -> np.ndarray:
        return self.g_fn(np.asarray(p, dtype=float))

    def contains(self, p, margin: float | None = None) -> bool:
        if self.domain is None:
            return bool(np.all(np.isfinite(p)))
        m = self.margin if margin is None else margin
        return bool(np.all(self.domain(np.asarray(p, dtype=float), m)))

    def require(self, p, reach: float = 0.0) -> np.ndarray:
        """Validate ``p`` as an interior point; ``reach`` is the stencil half-width."""
        p = np.asarray(p, dtype=float)
        if p.shape[-1] != self.dim:
            raise DomainError(f"{self.name}: expected {self.dim} coordinates, got {p.shape}")
        if not self.contains(p):
            raise DomainError(f"{self.name}: point outside domain: {p}")
        if reach > 0 and self.domain is not None:
            steps = fd.coordinate_steps(p, reach)
            for k in range(self.dim):
                for sign in (1.0, -1.0):
                    q = p.copy()
                    q[..., k] += sign * steps[..., k]
                    if not self.contains(q, 0.0):
                        raise StepTooLargeError(
                            f"{self.name}: stencil of half-width {reach} leaves the domain at {p}"
                        )
        return p


def flat_metric(signs) -> MetricField:
    signs = np.asarray(signs, dtype=float)
    eta = np.diag(signs)
    npos = int(np.sum(signs > 0))

    def g_fn(p):
        return np.broadcast_to(eta, p.shape[:-1] + eta.shape).copy()

    return MetricField(g_fn, len(signs), signature=(npos, len(signs) - npos), name="flat")


def validate_metric(g: MetricField, p, sym_tol: float = 1e-14, det_tol: float = 1e-12) -> np.ndarray:
    """Evaluate ``g`` at ``p`` and check symmetry, nondegeneracy and signature."""
    mat = g(g.require(p))
    if np.max(np.abs(mat - np.swapaxes(mat, -1, -2))) > sym_tol * max(1.0, np.max(np.abs(mat))):
        raise DegenerateMetricError(f"{g.name}: metric is not symmetric at {p}")
    if np.any(np.abs(np.linalg.det(mat)) <= det_tol):
        raise DegenerateMetricError(f"{g.name}: metric is degenerate at {p}")
    if g.signature is not None:
        eig = np.linalg.eigvalsh(mat)
        counts = (int(np.sum(eig > 0, axis=-1).min()), int(np.sum(eig < 0, axis=-1).max()))
        if counts != g.signature:
            raise DegenerateMetricError(
                f"{g.name}: signature {counts} differs from declared {g.signature}"
            )
    return mat


def inverse_metric(mat: np.ndarray, check: bool = True) -> np.ndarray:
    if check:
        if np.any(np.abs(np.linalg.det(mat)) <= 1e-12):
            raise DegenerateMetricError("metric is degenerate")
        cond = np.linalg.cond(mat)
        if np.any(cond > 1e8):
            log.warning("ill-conditioned metric, condition number %.3g", float(np.max(cond)))
    return np.linalg.inv(mat)


def _sym(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + np.swapaxes(a, -1, -2))


def metric_derivatives(g: MetricField, p, h: float = fd.DEFAULT_STEP, richardson: bool = False):
    """``dg[..., k, a, b] = d_k g_ab``, symmetrised in (a, b)."""
    return _sym(fd.gradient(g.g_fn, p, h, richardson))


def _christoffel_from(ginv: np.ndarray, dg: np.ndarray) -> np.ndarray:
    # lowered[d, b, c] = d_b g_dc + d_c g_db - d_d g_bc
    # dg is symmetric in its last pair, so lowered (and gamma) is exactly
    # symmetric in (b, c) by construction
    swapped = np.swapaxes(dg, -3, -2)  # [..., d, b, c] = d_b g_dc
    lowered = swapped + np.swapaxes(swapped, -1, -2) - dg
    return 0.5 * np.einsum("...ad,...dbc->...abc", ginv, lowered)


def christoffel(g: MetricField, p, h: float = fd.DEFAULT_STEP, richardson: bool = False) -> np.ndarray:
    """Levi-Civita connection coefficients ``gamma[..., a, b, c]``.

    Raises DomainError / StepTooLargeError for points too close to the
    domain boundary and DegenerateMetricError where ``det g`` vanishes.
    """
    p = g.require(p, reach=h)
    ginv = inverse_metric(g(p))
    return _christoffel_from(ginv, metric_derivatives(g, p, h, richardson))


def christoffel_unchecked(g: MetricField, p: np.ndarray, h: float = fd.DEFAULT_STEP) -> np.ndarray:
    """Hot-loop variant of :func:`christoffel` without domain or conditioning checks.

    The metric at ``p`` rides along with the stencil so ``g_fn`` is called once.
    """
    m = p.shape[-1]
    steps = fd.coordinate_steps(p, h)
    offsets = np.eye(m).reshape((m,) + (1,) * (p.ndim - 1) + (m,)) * steps
    vals = g.g_fn(np.concatenate([p + offsets, p - offsets, p[None]]))
    denom = (2.0 * np.moveaxis(steps, -1, 0))[..., None, None]
    dg = np.moveaxis((vals[:m] - vals[m : 2 * m]) / denom, 0, -3)
    return _christoffel_from(np.linalg.inv(vals[2 * m]), _sym(dg))


def covariant_derivative(
    g: MetricField,
    X: Callable[[np.ndarray], np.ndarray],
    Y: Callable[[np.ndarray], np.ndarray],
    p,
    h: float = fd.DEFAULT_STEP,
    dY: Callable[[np.ndarray], np.ndarray] | None = None,
    richardson: bool = False,
) -> np.ndarray:
    """``(D_X Y)^a = X^b d_b Y^a + Gamma^a_bc X^b Y^c``.

    ``dY`` may supply the analytic partials ``dY[..., b, a] = d_b Y^a``.
    """
    p = g.require(p, reach=h)
    gamma = christoffel(g, p, h, richardson)
    xv, yv = X(p), Y(p)
    partial = dY(p) if dY is not None else fd.gradient(Y, p, h, richardson)
    return np.einsum("...b,...ba->...a", xv, partial) + np.einsum(
        "...abc,...b,...c->...a", gamma, xv, yv
    )


@dataclass(frozen=True)
class CurvatureReport:
    riemann: np.ndarray
    ricci: np.ndarray
    point: np.ndarray
    step: float


def _riemann_from(g: MetricField, p: np.ndarray, h: float, h2: float, richardson: bool):
    gmat = g(p)
    ginv = inverse_metric(gmat, check=False)
    dg = metric_derivatives(g, p, h, richardson)
    ddg = _sym(fd.hessian(g.g_fn, p, h2, richardson))  # [..., e, k, a, b]
    gamma = _christoffel_from(ginv, dg)
    lowered = (
        np.einsum("...bdc->...dbc", dg) + np.einsum("...cdb->...dbc", dg) - dg
    )
    d_lowered = (
        np.einsum("...ebdc->...edbc", ddg)
        + np.einsum("...ecdb->...edbc", ddg)
        - ddg
    )
    dginv = -np.einsum("...ad,...edf,...fb->...eab", ginv, dg, ginv)
    dgamma = 0.5 * (
        np.einsum("...ead,...dbc->...eabc", dginv, lowered)
        + np.einsum("...ad,...edbc->...eabc", ginv, d_lowered)
    )
    riem = (
        np.einsum("...cadb->...abcd", dgamma)
        - np.einsum("...dacb->...abcd", dgamma)
        + np.einsum("...ace,...edb->...abcd", gamma, gamma)
        - np.einsum("...ade,...ecb->...abcd", gamma, gamma)
    )
    return riem, gmat


def riemann(
    g: MetricField,
    p,
    h: float = fd.DEFAULT_STEP,
    h2: float = fd.DEFAULT_CURVATURE_STEP,
    richardson: bool = False,
) -> CurvatureReport:
    """Riemann and Ricci tensors at ``p``.

    First derivatives of the metric use step ``h``; second derivatives use
    the wider ``h2`` (recorded as ``CurvatureReport.step``).
    """
    p = g.require(p, reach=max(h, h2))
    riem, _ = _riemann_from(g, p, h, h2, richardson)
    ric = np.einsum("...abad->...bd", riem)
    return CurvatureReport(riemann=riem, ricci=ric, point=p, step=h2)


def ricci(
    g: MetricField, p, h: float = fd.DEFAULT_STEP, h2: float = fd.DEFAULT_CURVATURE_STEP, richardson: bool = False
) -> np.ndarray:
    return riemann(g, p, h, h2, richardson).ricci


def lowered_riemann(g: MetricField, report: CurvatureReport) -> np.ndarray:
    """``R_abcd = g_ae R^e_bcd``."""
    return np.einsum("...ae,...ebcd->...abcd", g(report.point), report.riemann)


def sectional_curvature(
    g: MetricField,
    p,
    u,
    v,
    h: float = fd.DEFAULT_STEP,
    h2: float = fd.DEFAULT_CURVATURE_STEP,
    plane_tol: float = 1e-8,
    richardson: bool = False,
) -> np.ndarray | float:
    """``K = <R(u,v)v, u> / (g(u,u) g(v,v) - g(u,v)^2)``.

    Null and degenerate planes (relative Gram determinant below
    ``plane_tol``) raise DegeneratePlaneError.  Broadcasts over points.
    """
    rep = riemann(g, p, h, h2, richardson)
    out = sectional_from_report(g, rep, u, v, plane_tol)
    return float(out) if np.ndim(out) == 0 else out


def plane_gram(gm: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    guu = np.einsum("...a,...ab,...b->...", u, gm, u)
    gvv = np.einsum("...a,...ab,...b->...", v, gm, v)
    guv = np.einsum("...a,...ab,...b->...", u, gm, v)
    return guu * gvv - guv**2


def sectional_from_report(
    g: MetricField, rep: CurvatureReport, u, v, plane_tol: float = 1e-8
) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    gram = plane_gram(g(rep.point), u, v)
    size = np.sum(u * u, axis=-1) * np.sum(v * v, axis=-1)
    if np.any(np.abs(gram) <= plane_tol * size):
        raise DegeneratePlaneError(
            f"plane is degenerate (Gram determinant {float(np.min(np.abs(gram))):.3g})"
        )
    low = lowered_riemann(g, rep)
    num = np.einsum("...abcd,...a,...b,...c,...d->...", low, u, v, u, v)
    return num / gram


def hessian_scalar(
    g: MetricField,
    f: Callable[[np.ndarray], np.ndarray],
    p,
    h: float = fd.DEFAULT_STEP,
    h2: float = fd.DEFAULT_CURVATURE_STEP,
    df: Callable[[np.ndarray], np.ndarray] | None = None,
    ddf: Callable[[np.ndarray], np.ndarray] | None = None,
) -> np.ndarray:
    """Covariant Hessian ``(Hf)_ab = d_a d_b f - Gamma^c_ab d_c f``."""
    p = g.require(p, reach=max(h, h2))
    gamma = christoffel(g, p, h)
    grad = df(p) if df is not None else fd.gradient(f, p, h)
    second = ddf(p) if ddf is not None else fd.hessian(f, p, h2)
    return _sym(second - np.einsum("...cab,...c->...ab", gamma, grad))


def laplacian_scalar(g: MetricField, f, p, h: float = fd.DEFAULT_STEP, h2: float = fd.DEFAULT_CURVATURE_STEP, **kw) -> np.ndarray | float:
    """Metric trace of :func:`hessian_scalar`."""
    hess = hessian_scalar(g, f, p, h, h2, **kw)
    ginv = inverse_metric(g(np.asarray(p, dtype=float)), check=False)
    out = np.einsum("...ab,...ab->...", ginv, hess)
    return float(out) if np.ndim(out) == 0 else out


def metric_compatibility(g: MetricField, p, h: float = fd.DEFAULT_STEP) -> float:
    """max |nabla_a g_bc|; zero for the Levi-Civita connection."""
    p = g.require(p, reach=h)
    gm = g(p)
    dg = metric_derivatives(g, p, h)
    gamma = christoffel(g, p, h)
    nabla = (
        dg
        - np.einsum("...dab,...dc->...abc", gamma, gm)
        - np.einsum("...dac,...bd->...abc", gamma, gm)
    )
    return float(np.max(np.abs(nabla)))


def bianchi_residual(report: CurvatureReport) -> float:
    """max |R^a_bcd + R^a_cdb + R^a_dbc|."""
    r = report.riemann
    cyc = r + np.einsum("...acdb->...abcd", r) + np.einsum("...adbc->...abcd", r)
    return float(np.max(np.abs(cyc)))
