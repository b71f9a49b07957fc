"""Killing fields of the static de Sitter chart.

Ground truth for "is Killing" is the symmetrised covariant derivative of the
lowered field.  The ten ambient rotation/boost generators are pulled back
through the embedding Jacobian; the tabulated fields and the hand-written
Killing equations are then audited against them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import fd
from .ambient import Quadric, Signature, flat_inner
from .charts import Chart, static_metric
from .errors import NonTangentFieldError, RankDeficientJacobianError
from .tensor import MetricField, christoffel

SINGULAR_TOL = 1e-8
TANGENCY_TOL = 1e-8


@dataclass(frozen=True)
class VectorField:
    """Components in the chart basis; ``lowered`` marks covector components."""

    fn: Callable[[np.ndarray], np.ndarray]
    name: str = "u"
    lowered: bool = False
    dfn: Callable[[np.ndarray], np.ndarray] | None = None

    def __call__(self, p) -> np.ndarray:
        return self.fn(np.asarray(p, dtype=float))


def coordinate_field(dim: int, index: int, name: str | None = None) -> VectorField:
    def fn(p):
        out = np.zeros(p.shape[:-1] + (dim,))
        out[..., index] = 1.0
        return out

    def dfn(p):
        return np.zeros(p.shape[:-1] + (dim, dim))

    return VectorField(fn, name or f"d{index}", dfn=dfn)


def lower(g: MetricField, u: VectorField) -> VectorField:
    if u.lowered:
        return u
    return VectorField(lambda p: np.einsum("...ab,...b->...a", g(p), u(p)), u.name, lowered=True)


def raise_index(g: MetricField, u: VectorField) -> VectorField:
    if not u.lowered:
        return u

    def fn(p):
        return np.linalg.solve(g(p), u(p)[..., None])[..., 0]

    return VectorField(fn, u.name, lowered=False)


def killing_residual(
    g: MetricField, u: VectorField, p, h: float = fd.DEFAULT_STEP, richardson: bool = False
) -> np.ndarray:
    """``K_ab = D_a u_b + D_b u_a`` with ``u_b = g_bc u^c``; vanishes iff ``u`` is Killing."""
    p = g.require(p, reach=h)
    low = lower(g, u)
    gamma = christoffel(g, p, h, richardson)
    du = fd.gradient(low.fn, p, h, richardson)  # [..., a, b] = d_a u_b
    grad = du - np.einsum("...cab,...c->...ab", gamma, low(p))
    return grad + np.swapaxes(grad, -1, -2)


# ------------------------------------------------------------ ambient generators


@dataclass(frozen=True)
class AmbientGenerator:
    """Affine ambient field ``U(xi) = matrix @ xi + translation``."""

    matrix: np.ndarray
    translation: np.ndarray
    signature: Signature
    label: str

    def __call__(self, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        return xi @ self.matrix.T + self.translation

    def preserves_metric(self) -> float:
        """max-abs of ``eta M + M^T eta``; zero for infinitesimal isometries."""
        eta = self.signature.eta
        return float(np.max(np.abs(eta @ self.matrix + self.matrix.T @ eta)))


def ambient_generator(A: int, B: int, q: Quadric) -> AmbientGenerator:
    """``u_AB = -xi_A dxi_B + xi_B dxi_A`` as a vector field (indices lowered with eta)."""
    n = q.dim
    if A == B:
        raise ValueError("generator needs two distinct axes")
    if not (0 <= A < n and 0 <= B < n):
        raise ValueError(f"axes must lie in 0..{n - 1}")
    eta = q.signature.signs
    m = np.zeros((n, n))
    m[A, B] = eta[B]
    m[B, A] = -eta[A]
    return AmbientGenerator(m, np.zeros(n), q.signature, f"u{A}{B}")


def ambient_generators(q: Quadric) -> list[AmbientGenerator]:
    return [ambient_generator(a, b, q) for a, b in itertools.combinations(range(q.dim), 2)]


def translation_generator(sigma, q: Quadric) -> AmbientGenerator:
    sigma = np.asarray(sigma, dtype=float)
    return AmbientGenerator(np.zeros((q.dim, q.dim)), sigma, q.signature, "translation")


def tangency_residual(q: Quadric, U: AmbientGenerator, xi) -> np.ndarray:
    """``<U(xi), xi>``: the derivative of the constraint along ``U``, up to a factor 2."""
    return flat_inner(q.signature, U(xi), np.asarray(xi, dtype=float))


def pullback_field(chart: Chart, U: AmbientGenerator, p, tol: float = TANGENCY_TOL) -> np.ndarray:
    """Chart components ``v`` with ``J v = U(embed(p))`` in the least-squares sense."""
    p = np.asarray(p, dtype=float)
    J = chart.jacobian_fn(p)
    target = U(chart.embed_fn(p))
    u_, s, vt = np.linalg.svd(J, full_matrices=False)
    if np.any(s[..., -1] <= SINGULAR_TOL):
        raise RankDeficientJacobianError(
            f"{chart.name}: Jacobian singular value {float(np.min(s[..., -1])):.3g} at {p}"
        )
    coeff = np.einsum("...Aa,...A->...a", u_, target) / s
    v = np.einsum("...ab,...a->...b", vt, coeff)
    recon = np.einsum("...Aa,...a->...A", J, v) - target
    scale = np.maximum(1.0, np.linalg.norm(target, axis=-1))
    resid = np.linalg.norm(recon, axis=-1) / scale
    if np.any(resid > tol):
        raise NonTangentFieldError(
            f"{U.label} is not tangent to the {chart.name} image: residual {float(np.max(resid)):.3g}"
        )
    return v


def pulled_back(chart: Chart, U: AmbientGenerator) -> VectorField:
    return VectorField(lambda p: pullback_field(chart, U, p), U.label)


# --------------------------------------------------------------- tabulated rows

TABLE1_ROWS = 10


def _table1_components(row: int, R: float, p: np.ndarray) -> list:
    t, rho, theta, phi = (p[..., i] for i in range(4))
    om = rho * (1.0 - rho**2 / R**2)
    c, s = np.cosh(t / R), np.sinh(t / R)
    st, ct, sp, cp = np.sin(theta), np.cos(theta), np.sin(phi), np.cos(phi)
    z = np.zeros_like(t)
    rows = {
        1: (rho * om * st * cp * s, -R / om * st * cp * c, -rho * R * om * ct * cp * c, rho * R * om * st * sp * c),
        2: (-rho * om * st * sp * s, -R / om * st * sp * c, -rho * R * om * ct * sp * c, rho * R * om * st * cp * c),
        3: (rho * om * ct * c, -R / om * ct * c, rho * R * om * st * c, z),
        4: (R * om**2, z, z, z),
        5: (z, z, z, -(rho**2) * st**2),
        6: (z, z, rho**2 * cp, -(rho**2) * st**2 * ct * sp),
        7: (-rho * om * st * cp * c, R / om * st * cp * s, rho * R * om * ct * cp * s, rho * R * om * st * sp * s),
        8: (z, z, rho**2 * sp, rho**2 * st**2 * ct * cp),
        9: (-rho * om * st * sp * c, R / om * st * sp * s, rho * R * om * ct * sp * s, rho * R * om * st * cp * s),
        10: (-rho * om * ct * s, R / om * ct * s, -rho * R * om * st * s, z),
    }
    return rows[row]


def table1_field(row: int, R: float = 1.0) -> VectorField:
    """Tabulated field ``row`` (1..10) with its four entries read as covector components."""
    if not 1 <= row <= TABLE1_ROWS:
        raise ValueError(f"row must be in 1..{TABLE1_ROWS}, got {row}")

    def fn(p):
        return np.stack(np.broadcast_arrays(*_table1_components(row, R, p)), -1)

    return VectorField(fn, f"row{row}", lowered=True)


@dataclass
class RowMatch:
    row: int
    coefficients: np.ndarray
    span_residual: float
    nearest: str
    nearest_scale: float
    nearest_residual: float
    killing_residual: float
    tol: float

    @property
    def matched(self) -> bool:
        return self.span_residual <= self.tol


def _field_samples(fields: list[VectorField], p: np.ndarray) -> np.ndarray:
    """Stack field values at the sample points into rows of shape ``(len(fields), N*m)``."""
    return np.stack([f(p).reshape(-1) for f in fields])


def generator_sample_matrix(chart: Chart, p) -> np.ndarray:
    gens = [pulled_back(chart, U) for U in ambient_generators(chart.target)]
    return _field_samples(gens, np.asarray(p, dtype=float))


def match_row(
    g: MetricField, chart: Chart, row: int, p, tol: float = 1e-6, h: float = fd.DEFAULT_STEP
) -> RowMatch:
    """Least-squares match of a raised tabulated row against the pulled-back generators.

    Residuals are max-abs over the samples, relative to ``max(1, max|row|)``.
    """
    p = np.asarray(p, dtype=float)
    gens = ambient_generators(chart.target)
    basis = generator_sample_matrix(chart, p)
    w = raise_index(g, table1_field(row, chart.radius))(p).reshape(-1)
    scale = max(1.0, float(np.max(np.abs(w))))
    coeff, *_ = np.linalg.lstsq(basis.T, w, rcond=None)
    span_res = float(np.max(np.abs(basis.T @ coeff - w))) / scale
    best = (np.inf, 0.0, "")
    for U, b in zip(gens, basis):
        c = float(b @ w / (b @ b))
        r = float(np.max(np.abs(w - c * b))) / scale
        if r < best[0]:
            best = (r, c, U.label)
    kres = float(np.max(np.abs(killing_residual(g, raise_index(g, table1_field(row, chart.radius)), p, h))))
    return RowMatch(row, coeff, span_res, best[2], best[1], best[0], kres, tol)


def conserved_charge(g: MetricField, u: VectorField, x, v) -> np.ndarray:
    """``Q = g_ab u^a v^b``; constant along geodesics when ``u`` is Killing."""
    x = np.asarray(x, dtype=float)
    uv = u(x)
    if u.lowered:
        return np.einsum("...a,...a->...", uv, v)
    return np.einsum("...ab,...a,...b->...", g(x), uv, v)


# ------------------------------------------------- hand-written Killing equations

_STATIC_INDEX = {"t": 0, "rho": 1, "theta": 2, "phi": 3}


@dataclass(frozen=True)
class KillingEquation:
    """``s (d_a u_b + d_b u_a) + sum_c coeff_c(p) u_c = 0`` with ``s = 1/2`` on the diagonal."""

    a: int
    b: int
    coeff: Callable[[np.ndarray, float], np.ndarray] | None
    label: str

    @property
    def scale(self) -> float:
        return 0.5 if self.a == self.b else 1.0


def _coeffs(**kw) -> Callable[[np.ndarray, float], np.ndarray]:
    def fn(p, R):
        rho = p[..., 1]
        om = rho * (1.0 - rho**2 / R**2)
        out = np.zeros(p.shape[:-1] + (4,))
        for name, f in kw.items():
            out[..., _STATIC_INDEX[name]] = f(rho, om, R)
        return out

    return fn


def printed_killing_equations() -> list[KillingEquation]:
    """The eight equations as printed, plus placeholders for the two absent pairs."""
    return [
        KillingEquation(2, 2, _coeffs(rho=lambda r, om, R: om), "theta-theta"),
        KillingEquation(1, 2, _coeffs(theta=lambda r, om, R: -2.0 / r), "rho-theta"),
        KillingEquation(1, 3, _coeffs(phi=lambda r, om, R: -2.0 / r), "rho-phi"),
        KillingEquation(0, 3, _coeffs(), "t-phi"),
        KillingEquation(0, 2, _coeffs(), "t-theta"),
        KillingEquation(0, 1, _coeffs(t=lambda r, om, R: 2.0 * om / R**2), "t-rho"),
        KillingEquation(1, 1, _coeffs(t=lambda r, om, R: -1.0 / (R**2 * om)), "rho-rho"),
        KillingEquation(0, 0, _coeffs(rho=lambda r, om, R: om / R**2), "t-t"),
        KillingEquation(2, 3, None, "theta-phi"),
        KillingEquation(3, 3, None, "phi-phi"),
    ]


def generated_killing_coefficients(g: MetricField, a: int, b: int, p, h: float = fd.DEFAULT_STEP) -> np.ndarray:
    """Coefficients of ``u_c`` in the scaled component ``(a, b)`` of the Killing operator."""
    gamma = christoffel(g, p, h)
    scale = 0.5 if a == b else 1.0
    return -2.0 * scale * gamma[..., :, a, b]


@dataclass
class EquationDiff:
    label: str
    present: bool
    coeff_deviation: float
    max_on_generators: float
    max_generated: float


def audit_killing_equations(
    chart: Chart, p, h: float = fd.DEFAULT_STEP, richardson: bool = True
) -> list[EquationDiff]:
    """Printed vs generated coefficients, with both equation sets applied to the generators.

    ``max_on_generators`` is NaN for pairs the printed list omits.
    """
    p = np.asarray(p, dtype=float)
    R = chart.radius
    g = MetricField(static_metric(R), 4, chart.domain, (1, 3), chart.margin, "static")
    gens = [lower(g, pulled_back(chart, U)) for U in ambient_generators(chart.target)]
    vals = [u(p) for u in gens]
    grads = [fd.gradient(u.fn, p, h, richardson) for u in gens]
    gamma = christoffel(g, p, h, richardson)

    def worst(eq: KillingEquation, coeff: np.ndarray) -> float:
        out = 0.0
        for val, du in zip(vals, grads):
            lhs = eq.scale * (du[..., eq.a, eq.b] + du[..., eq.b, eq.a])
            lhs = lhs + np.einsum("...c,...c->...", coeff, val)
            out = max(out, float(np.max(np.abs(lhs))))
        return out

    out = []
    for eq in printed_killing_equations():
        gen = -2.0 * eq.scale * gamma[..., :, eq.a, eq.b]
        gen_res = worst(eq, gen)
        if eq.coeff is None:
            out.append(EquationDiff(eq.label, False, float(np.max(np.abs(gen))), float("nan"), gen_res))
            continue
        printed = eq.coeff(p, R)
        out.append(
            EquationDiff(eq.label, True, float(np.max(np.abs(printed - gen))), worst(eq, printed), gen_res)
        )
    return out


@dataclass
class GeneratorCheck:
    label: str
    killing_residual: float
    tangency: float
    preserves_metric: float
    extra: dict = field(default_factory=dict)


def check_generators(
    g: MetricField, chart: Chart, p, h: float = fd.DEFAULT_STEP, richardson: bool = True
) -> list[GeneratorCheck]:
    p = np.asarray(p, dtype=float)
    xi = chart.embed_fn(p)
    out = []
    for U in ambient_generators(chart.target):
        res = killing_residual(g, pulled_back(chart, U), p, h, richardson)
        tang = float(np.max(np.abs(tangency_residual(chart.target, U, xi))))
        out.append(GeneratorCheck(U.label, float(np.max(np.abs(res))), tang, U.preserves_metric()))
    return out

