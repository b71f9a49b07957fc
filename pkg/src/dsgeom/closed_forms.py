"""Closed-form connection data for the static de Sitter metric.

Coordinates are indexed t=0, rho=1, theta=2, phi=3, and ``A = 1 - rho^2/R^2``.
``printed_christoffel`` transcribes the published list verbatim, including
two entries that disagree with the metric.  ``derived_christoffel`` is the
independent hand derivation from ``diag(A, -1/A, -rho^2, -rho^2 sin^2 theta)``
and serves as the oracle.
"""

from __future__ import annotations

import numpy as np

T, RHO, THETA, PHI = range(4)

# (upper, lower, lower) entries named in the published list, symmetric pairs included
LISTED = {
    (T, T, RHO), (T, RHO, T), (RHO, RHO, RHO), (RHO, T, T), (RHO, THETA, THETA),
    (RHO, PHI, PHI), (THETA, PHI, PHI), (THETA, RHO, THETA), (THETA, THETA, RHO),
    (PHI, RHO, PHI), (PHI, PHI, RHO), (PHI, THETA, PHI), (PHI, PHI, THETA),
}


def _parts(p: np.ndarray, R: float):
    rho, theta = p[..., 1], p[..., 2]
    a = 1.0 - rho**2 / R**2
    return rho, theta, a, np.sin(theta), np.cos(theta)


def _fill(p: np.ndarray, entries: dict) -> np.ndarray:
    out = np.zeros(p.shape[:-1] + (4, 4, 4))
    for (a, b, c), val in entries.items():
        out[..., a, b, c] = val
        out[..., a, c, b] = val
    return out


def printed_christoffel(R: float, p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    rho, theta, a, st, ct = _parts(p, R)
    k = rho / (R**2 * a)
    return _fill(p, {
        (T, T, RHO): -k,
        (RHO, RHO, RHO): k,
        (RHO, T, T): rho * a / R**2,
        (RHO, THETA, THETA): -rho * a,
        (RHO, PHI, PHI): -rho * a * st,
        (THETA, PHI, PHI): -st * ct,
        (THETA, RHO, THETA): 1.0 / rho,
        (PHI, RHO, PHI): 1.0 / rho,
        (PHI, THETA, PHI): ct / st,
    })


def derived_christoffel(R: float, p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    rho, theta, a, st, ct = _parts(p, R)
    k = rho / (R**2 * a)
    return _fill(p, {
        (T, T, RHO): -k,
        (RHO, RHO, RHO): k,
        (RHO, T, T): -rho * a / R**2,
        (RHO, THETA, THETA): -rho * a,
        (RHO, PHI, PHI): -rho * a * st**2,
        (THETA, PHI, PHI): -st * ct,
        (THETA, RHO, THETA): 1.0 / rho,
        (PHI, RHO, PHI): 1.0 / rho,
        (PHI, THETA, PHI): ct / st,
    })


CHRISTOFFEL_LABELS = {
    (T, T, RHO): "G0_01", (RHO, RHO, RHO): "G1_11", (RHO, T, T): "G1_00",
    (RHO, THETA, THETA): "G1_22", (RHO, PHI, PHI): "G1_33", (THETA, PHI, PHI): "G2_33",
    (THETA, RHO, THETA): "G2_12", (PHI, RHO, PHI): "G3_13", (PHI, THETA, PHI): "G3_23",
}


def printed_connection_table(R: float, p) -> np.ndarray:
    """``table[..., mu, nu, a]``: component ``a`` of ``D_{d_mu} d_nu`` read off the printed D(d_nu) forms."""
    p = np.asarray(p, dtype=float)
    rho, theta, a, st, ct = _parts(p, R)
    k = rho / (R**2 * a)
    out = np.zeros(p.shape[:-1] + (4, 4, 4))
    # D(d_theta)
    out[..., THETA, THETA, RHO] = -rho * a
    out[..., PHI, THETA, PHI] = ct / st
    out[..., RHO, THETA, THETA] = 1.0 / rho
    # D(d_t)
    out[..., RHO, T, T] = -k
    out[..., T, T, RHO] = -rho * a / R**2
    # D(d_phi)
    out[..., THETA, PHI, PHI] = ct / st
    out[..., PHI, PHI, THETA] = -st * ct
    out[..., PHI, PHI, RHO] = -rho * a * st**2
    out[..., RHO, PHI, PHI] = 1.0 / rho
    # D(d_rho)
    out[..., T, RHO, T] = -k
    out[..., RHO, RHO, RHO] = k
    out[..., THETA, RHO, THETA] = 1.0 / rho
    out[..., PHI, RHO, PHI] = 1.0 / rho
    return out


def printed_accelerations(R: float, p) -> dict[str, np.ndarray]:
    """``D_{d_mu} d_mu`` for each coordinate, as printed."""
    p = np.asarray(p, dtype=float)
    rho, theta, a, st, ct = _parts(p, R)
    z = np.zeros(p.shape[:-1] + (4,))
    acc = {name: z.copy() for name in ("t", "rho", "theta", "phi")}
    acc["theta"][..., RHO] = -rho * a
    acc["t"][..., RHO] = -rho * a / R**2
    acc["rho"][..., RHO] = rho / (R**2 * a)
    acc["phi"][..., THETA] = -st * ct
    acc["phi"][..., RHO] = -rho * a * st**2
    return acc


ACCELERATION_INDEX = {"t": T, "rho": RHO, "theta": THETA, "phi": PHI}
