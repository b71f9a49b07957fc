"""Constant-curvature warped products ``g = dr^2 + psi_k(r)^2 dOmega^2`` and the
Laplacian comparison machinery built on them.

The radial coordinate is the distance function itself, so every quantity
below is the Hessian or Laplacian of the coordinate function ``r``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import fd
from .errors import DomainError
from .tensor import MetricField, hessian_scalar, inverse_metric, laplacian_scalar, ricci

SERIES_CUTOFF = 1e-4


def _check_r(k: float, r: np.ndarray, allow_zero: bool = True) -> None:
    if np.any(r < 0) or (not allow_zero and np.any(r == 0)):
        raise DomainError("r must be positive")
    if k > 0 and np.any(r >= np.pi / np.sqrt(k)):
        raise DomainError(f"r must stay below pi/sqrt(k) = {np.pi / np.sqrt(k):.6g}")


def psi(k: float, r):
    """Warp function: sinh, identity or sin profile according to the sign of ``k``."""
    r = np.asarray(r, dtype=float)
    _check_r(k, r)
    if k < 0:
        a = np.sqrt(-k)
        out = np.sinh(a * r) / a
    elif k == 0:
        out = r.copy()
    else:
        a = np.sqrt(k)
        out = np.sin(a * r) / a
    return float(out) if out.ndim == 0 else out


def dpsi(k: float, r):
    r = np.asarray(r, dtype=float)
    _check_r(k, r)
    if k < 0:
        out = np.cosh(np.sqrt(-k) * r)
    elif k == 0:
        out = np.ones_like(r)
    else:
        out = np.cos(np.sqrt(k) * r)
    return float(out) if out.ndim == 0 else out


def _coth(x):
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < SERIES_CUTOFF
    safe = np.where(small, 1.0, x)
    return np.where(small, 1.0 / np.where(small, x, 1.0) + x / 3.0, 1.0 / np.tanh(safe))


def _cot(x):
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < SERIES_CUTOFF
    safe = np.where(small, 1.0, x)
    return np.where(small, 1.0 / np.where(small, x, 1.0) - x / 3.0, np.cos(safe) / np.sin(safe))


def hessian_r_coeff(k: float, r):
    """``psi'/psi``: the nonzero eigenvalue of the Hessian of ``r``."""
    r = np.asarray(r, dtype=float)
    _check_r(k, r, allow_zero=False)
    if k < 0:
        a = np.sqrt(-k)
        out = a * _coth(a * r)
    elif k == 0:
        out = 1.0 / r
    else:
        a = np.sqrt(k)
        out = a * _cot(a * r)
    return float(out) if np.ndim(out) == 0 else out


def laplacian_r_closed(k: float, r, n: int):
    """Model-space Laplacian of the distance function, ``(n-1) psi'/psi``."""
    return (n - 1) * hessian_r_coeff(k, r)


def quoted_laplacian_r(k: float, r, n: int):
    """Closed form with ``1/sqrt(|k|)`` prefactors; equals the model value only for ``|k| in {0, 1}``."""
    r = np.asarray(r, dtype=float)
    if k < 0:
        a = np.sqrt(-k)
        return (n - 1) * _coth(a * r) / a
    if k == 0:
        return (n - 1) / r
    a = np.sqrt(k)
    return (n - 1) * _cot(a * r) / a


@dataclass(frozen=True)
class WarpedMetric:
    """``dr^2 + psi_k(r)^2`` times the round metric of the unit (n-1)-sphere.

    Coordinates are ``(r, a_1, ..., a_{n-1})`` with hyperspherical angles;
    ``a_1 .. a_{n-2}`` lie in (0, pi).
    """

    n: int
    k: float
    delta: float = 1e-6

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError("dimension must be at least 2")

    @property
    def r_max(self) -> float:
        return np.pi / np.sqrt(self.k) if self.k > 0 else np.inf

    def g_fn(self, p: np.ndarray) -> np.ndarray:
        r = p[..., 0]
        w = psi(self.k, np.abs(r)) ** 2
        out = np.zeros(p.shape[:-1] + (self.n, self.n))
        out[..., 0, 0] = 1.0
        for i in range(1, self.n):
            out[..., i, i] = w
            w = w * np.sin(p[..., i]) ** 2
        return out

    def domain(self, p: np.ndarray, margin: float) -> np.ndarray:
        r = p[..., 0]
        ok = (r > margin) & (r < self.r_max - margin) & np.all(np.isfinite(p), axis=-1)
        for i in range(1, self.n - 1):
            ok &= (p[..., i] > margin) & (p[..., i] < np.pi - margin)
        return ok

    @property
    def field(self) -> MetricField:
        return MetricField(
            self.g_fn, self.n, self.domain, (self.n, 0), self.delta, f"warped(k={self.k:g}, n={self.n})"
        )

    def point(self, r, angles: Sequence[float] | None = None) -> np.ndarray:
        """Chart point(s) at radius ``r`` and fixed generic angles."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        if angles is None:
            angles = [1.1 - 0.15 * i for i in range(self.n - 2)] + [0.4]
        pts = np.empty(r.shape + (self.n,))
        pts[..., 0] = r
        pts[..., 1:] = angles
        return pts


def distance_function(p: np.ndarray) -> np.ndarray:
    return p[..., 0]


def radial_hessian(wm: WarpedMetric, r, h: float = fd.DEFAULT_STEP, h2: float = fd.DEFAULT_CURVATURE_STEP) -> np.ndarray:
    return hessian_scalar(wm.field, distance_function, wm.point(r), h, h2)


def radial_laplacian(wm: WarpedMetric, r, h: float = fd.DEFAULT_STEP, h2: float = fd.DEFAULT_CURVATURE_STEP) -> np.ndarray:
    return np.atleast_1d(laplacian_scalar(wm.field, distance_function, wm.point(r), h, h2))


def hessian_norm_sq(g: np.ndarray, hess: np.ndarray) -> np.ndarray:
    ginv = inverse_metric(g, check=False)
    return np.einsum("...ac,...bd,...ab,...cd->...", ginv, ginv, hess, hess)


def hessian_identity_residual(wm: WarpedMetric, r, **kw) -> float:
    """max |Hr - (psi'/psi)(g - dr (x) dr)| over the given radii."""
    pts = wm.point(r)
    hess = hessian_scalar(wm.field, distance_function, pts, **kw)
    g = wm.g_fn(pts)
    proj = g.copy()
    proj[..., 0, 0] -= 1.0
    coeff = np.asarray(dpsi(wm.k, pts[..., 0]) / psi(wm.k, pts[..., 0]))[..., None, None]
    return float(np.max(np.abs(hess - coeff * proj)))


def ricci_lower_bound_margin(wm: WarpedMetric, k_bound: float, r, **kw) -> float:
    """Minimum eigenvalue of ``Ric - (n-1) k_bound g`` in a g-orthonormal frame."""
    pts = wm.point(r)
    ric = ricci(wm.field, pts, **kw)
    g = wm.g_fn(pts)
    low = np.linalg.cholesky(g)
    linv = np.linalg.inv(low)
    diff = ric - (wm.n - 1) * k_bound * g
    frame = linv @ diff @ np.swapaxes(linv, -1, -2)
    return float(np.min(np.linalg.eigvalsh(0.5 * (frame + np.swapaxes(frame, -1, -2)))))


@dataclass
class LCTReport:
    k_bound: float
    k_test: float
    n: int
    r: np.ndarray
    laplacian: np.ndarray
    bound: np.ndarray
    hypothesis_margin: float
    hypothesis_holds: bool
    tol: float
    notes: list[str] = field(default_factory=list)

    @property
    def margin(self) -> np.ndarray:
        return self.bound - self.laplacian

    @property
    def inequality_holds(self) -> np.ndarray:
        return self.laplacian <= self.bound + self.tol

    @property
    def max_equality_deviation(self) -> float:
        return float(np.max(np.abs(self.margin)))


def lct_check(
    k_bound: float,
    g_test: WarpedMetric,
    r_grid,
    h: float = fd.DEFAULT_STEP,
    h2: float = fd.DEFAULT_CURVATURE_STEP,
    tol: float = 1e-4,
    hypothesis_tol: float = 1e-6,
    hypothesis_steps: tuple[float, float] = (1e-4, 1e-3),
) -> LCTReport:
    """Compare the numerical Laplacian of ``r`` with the model bound for ``k_bound``.

    If the Ricci lower bound fails on the grid the report says so and the
    inequality flags are informational only. The Ricci check uses wider
    steps with Richardson extrapolation, which keeps it at ~1e-8 where the
    default steps are roundoff-limited near 1e-6.
    """
    r_grid = np.asarray(r_grid, dtype=float)
    lap = radial_laplacian(g_test, r_grid, h, h2)
    bound = np.asarray(laplacian_r_closed(k_bound, r_grid, g_test.n), dtype=float)
    hyp = ricci_lower_bound_margin(
        g_test, k_bound, r_grid, h=hypothesis_steps[0], h2=hypothesis_steps[1], richardson=True
    )
    rep = LCTReport(k_bound, g_test.k, g_test.n, r_grid, lap, bound, hyp, hyp >= -hypothesis_tol, tol)
    if not rep.hypothesis_holds:
        rep.notes.append(
            f"Ricci lower bound (n-1)k g fails: minimum eigenvalue {hyp:.3g}; inequality not asserted"
        )
    return rep


def bochner_residual(
    wm: WarpedMetric,
    r: float,
    h: float = fd.DEFAULT_STEP,
    h2: float = fd.DEFAULT_CURVATURE_STEP,
    dr: float = 1e-3,
) -> float:
    """``| ||Hr||^2 + d(Delta r)/dr + Ric(d_r, d_r) |`` at radius ``r``.

    The radial derivative of the Laplacian uses a five-point stencil of
    half-width ``2 dr``.
    """
    pts = wm.point([r - 2 * dr, r - dr, r, r + dr, r + 2 * dr])
    hess = hessian_scalar(wm.field, distance_function, pts[2], h, h2)
    norm_sq = float(hessian_norm_sq(wm.g_fn(pts[2]), hess))
    lap = np.atleast_1d(laplacian_scalar(wm.field, distance_function, pts, h, h2))
    d_lap = (-lap[4] + 8 * lap[3] - 8 * lap[1] + lap[0]) / (12 * dr)
    ric_rr = float(ricci(wm.field, pts[2], h, h2)[0, 0])
    return abs(norm_sq + d_lap + ric_rr)


def comparison_ode_witness(
    k: float,
    n: int,
    r_grid=None,
    trial: Callable[[np.ndarray], np.ndarray] | None = None,
    dtrial: Callable[[np.ndarray], np.ndarray] | None = None,
) -> float:
    """max over the grid of ``|f' + f^2/(n-1) + k(n-1)|``.

    Defaults to ``f = (n-1) sqrt|k| coth(sqrt(-k) r)``, the Riccati solution
    the comparison argument uses; pass ``trial``/``dtrial`` to test others.
    """
    if k >= 0:
        raise ValueError("the comparison witness is defined for k < 0")
    r = np.linspace(0.1, 5.0, 200) if r_grid is None else np.asarray(r_grid, dtype=float)
    a = np.sqrt(-k)
    if trial is None:
        f = (n - 1) * a * _coth(a * r)
        df = -(n - 1) * a * a / np.sinh(a * r) ** 2
    else:
        f, df = trial(r), dtrial(r)
    return float(np.max(np.abs(df + f**2 / (n - 1) + k * (n - 1))))


@dataclass(frozen=True)
class GridSpec:
    min: float
    max: float
    count: int
    spacing: str = "linear"

    def values(self) -> np.ndarray:
        if self.count < 1 or not self.max >= self.min:
            raise ValueError(f"invalid grid {self}")
        if self.spacing == "linear":
            return np.linspace(self.min, self.max, self.count)
        if self.spacing == "log":
            if self.min <= 0:
                raise ValueError("log grid needs a positive minimum")
            return np.geomspace(self.min, self.max, self.count)
        raise ValueError(f"unknown spacing {self.spacing!r}")
