"""Geodesic flow on a coordinate metric: right-hand side, fixed-step RK4 and CSV export.

Integration is batched over leading axes of the initial state so a family of
geodesics advances in lock-step; each member stops independently when it
leaves the metric's domain.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import IO, Sequence

import numpy as np

from . import fd
from .errors import DomainError, StepUnderflowError
from .isometry import VectorField, conserved_charge, coordinate_field
from .tensor import MetricField, christoffel, christoffel_unchecked, covariant_derivative

COMPLETE = "complete"
BOUNDARY_HIT = "boundary-hit"
MIN_STEP = 1e-12


@dataclass
class GeodesicState:
    x: np.ndarray
    v: np.ndarray
    tau: float = 0.0

    def __post_init__(self) -> None:
        self.x = np.asarray(self.x, dtype=float)
        self.v = np.asarray(self.v, dtype=float)
        if self.x.shape != self.v.shape:
            raise ValueError(f"position {self.x.shape} and velocity {self.v.shape} differ in shape")


def geodesic_rhs(g: MetricField, s: GeodesicState, h: float = fd.DEFAULT_STEP):
    """``(dx, dv) = (v, -Gamma^a_bc v^b v^c)``."""
    gamma = christoffel(g, s.x, h)
    return s.v.copy(), -np.einsum("...abc,...b,...c->...a", gamma, s.v, s.v)


def frame_acceleration(
    g: MetricField, mu: int, p, h: float = fd.DEFAULT_STEP, richardson: bool = False
) -> np.ndarray:
    """``D_{d_mu} d_mu`` in the chart basis."""
    e = coordinate_field(g.dim, mu)
    return covariant_derivative(g, e.fn, e.fn, p, h, dY=e.dfn, richardson=richardson)


def metric_norm(g: MetricField, x, v) -> np.ndarray:
    return np.einsum("...ab,...a,...b->...", g(x), v, v)


@dataclass
class Trajectory:
    """Samples ``tau[k]``, ``x[k]``, ``v[k]``; batch axes follow the sample axis.

    ``last[i]`` is the index of the final valid sample of member ``i``; later
    samples repeat that state.
    """

    tau: np.ndarray
    x: np.ndarray
    v: np.ndarray
    dt: float
    status: np.ndarray
    last: np.ndarray
    norm: np.ndarray

    @property
    def batch_shape(self) -> tuple[int, ...]:
        return self.x.shape[1:-1]

    def valid_mask(self) -> np.ndarray:
        k = np.arange(len(self.tau)).reshape((-1,) + (1,) * len(self.batch_shape))
        return k <= self.last

    def norm_drift(self) -> np.ndarray:
        """max over valid samples of ``|g(v,v) - g(v,v)_0| / max(1, |g(v,v)_0|)``."""
        n0 = self.norm[0]
        rel = np.abs(self.norm - n0) / np.maximum(1.0, np.abs(n0))
        return np.max(np.where(self.valid_mask(), rel, 0.0), axis=0)

    def charge_drift(self, g: MetricField, u: VectorField) -> np.ndarray:
        q = conserved_charge(g, u, self.x, self.v)
        rel = np.abs(q - q[0]) / np.maximum(1.0, np.abs(q[0]))
        return np.max(np.where(self.valid_mask(), rel, 0.0), axis=0)

    def select(self, index) -> "Trajectory":
        """One member, truncated to its valid samples."""
        index = np.index_exp[index] if not isinstance(index, tuple) else index
        last = int(self.last[index])
        sl = (slice(0, last + 1),) + index
        return Trajectory(
            self.tau[: last + 1], self.x[sl], self.v[sl], self.dt,
            np.asarray(self.status[index]), np.asarray(last), self.norm[sl],
        )


def _accel(g: MetricField, x: np.ndarray, v: np.ndarray, h: float) -> np.ndarray:
    return -np.einsum("...abc,...b,...c->...a", christoffel_unchecked(g, x, h), v, v)


def integrate(
    g: MetricField,
    s0: GeodesicState,
    tau_end: float,
    dt: float,
    h: float = fd.DEFAULT_STEP,
    sample_every: int = 1,
    margin: float | None = None,
) -> Trajectory:
    """Classical RK4 with fixed step ``dt``; no renormalisation of the velocity.

    A member whose next state comes within ``margin`` of the domain boundary
    (default: the metric's own margin) or turns non-finite is frozen at its
    last valid state with status ``boundary-hit``.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    span = tau_end - s0.tau
    if span < 0:
        raise ValueError("tau_end precedes the initial parameter")
    if dt < MIN_STEP or s0.tau + dt == s0.tau:
        raise StepUnderflowError(f"step {dt:g} underflows at tau = {s0.tau:g}")
    if sample_every < 1:
        raise ValueError("sample_every must be at least 1")
    if not g.contains(s0.x):
        raise DomainError(f"{g.name}: initial point outside domain")

    stop = g.margin if margin is None else margin
    batch = s0.x.shape[:-1]
    m = s0.x.shape[-1]
    x = s0.x.reshape(-1, m).copy()
    v = s0.v.reshape(-1, m).copy()
    n = x.shape[0]
    nsteps = int(np.ceil(span / dt - 1e-9))
    taus = s0.tau + dt * np.arange(nsteps + 1)
    taus[-1] = tau_end if nsteps else s0.tau

    keep = sorted(set(range(0, nsteps + 1, sample_every)) | {nsteps})
    xs, vs = [x.copy()], [v.copy()]
    active = np.ones(n, dtype=bool)
    last = np.zeros(n, dtype=int)

    for k in range(1, nsteps + 1):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            if k in keep:
                xs.append(x.copy())
                vs.append(v.copy())
            continue
        step = taus[k] - taus[k - 1]
        xa, va = x[idx], v[idx]
        with np.errstate(all="ignore"):
            k1x, k1v = va, _accel(g, xa, va, h)
            k2x = va + 0.5 * step * k1v
            k2v = _accel(g, xa + 0.5 * step * k1x, k2x, h)
            k3x = va + 0.5 * step * k2v
            k3v = _accel(g, xa + 0.5 * step * k2x, k3x, h)
            k4x = va + step * k3v
            k4v = _accel(g, xa + step * k3x, k4x, h)
            xn = xa + step / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x)
            vn = va + step / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)
        ok = np.all(np.isfinite(xn), axis=-1) & np.all(np.isfinite(vn), axis=-1)
        if g.domain is not None:
            ok &= g.domain(np.where(np.isfinite(xn), xn, 0.0), stop)
        x[idx[ok]] = xn[ok]
        v[idx[ok]] = vn[ok]
        active[idx[~ok]] = False
        if k in keep:
            xs.append(x.copy())
            vs.append(v.copy())
            last[active] = len(xs) - 1

    xs_arr = np.stack(xs).reshape((len(xs),) + batch + (m,))
    vs_arr = np.stack(vs).reshape((len(vs),) + batch + (m,))
    status = np.where(active, COMPLETE, BOUNDARY_HIT).reshape(batch)
    return Trajectory(
        taus[keep], xs_arr, vs_arr, dt, status, last.reshape(batch), metric_norm(g, xs_arr, vs_arr)
    )


def trajectory_header(m: int, n_charges: int) -> list[str]:
    return (
        ["tau"]
        + [f"x{i}" for i in range(m)]
        + [f"v{i}" for i in range(m)]
        + ["norm"]
        + [f"Q{i + 1}" for i in range(n_charges)]
    )


def write_csv(
    out: IO[str], g: MetricField, traj: Trajectory, charges: Sequence[VectorField] = ()
) -> None:
    """One row per sample, every number formatted with 17 significant digits."""
    if traj.x.ndim != 2:
        raise ValueError("write_csv expects a single trajectory; use Trajectory.select")
    m = traj.x.shape[-1]
    q = [conserved_charge(g, u, traj.x, traj.v) for u in charges]
    cols = [traj.tau, *traj.x.T, *traj.v.T, traj.norm, *q]
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(trajectory_header(m, len(charges)))
    for row in zip(*cols):
        writer.writerow([f"{float(val):.17g}" for val in row])


def read_csv(path) -> tuple[list[str], np.ndarray]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float)


def random_static_states(
    rng: np.random.Generator, R: float, count: int, speed: float = 0.05
) -> GeodesicState:
    """Seeded initial data well inside the static patch.

    Positions: t in [-R, R], rho in [0.2, 0.5] R, theta in [pi/4, 3pi/4],
    phi in [0, 2pi), drawn in that order per member; then velocities uniform
    in ``[-speed, speed] * min(1, R)^2`` componentwise.
    """
    x = np.column_stack(
        [
            rng.uniform(-R, R, count),
            rng.uniform(0.2, 0.5, count) * R,
            rng.uniform(np.pi / 4, 3 * np.pi / 4, count),
            rng.uniform(0.0, 2 * np.pi, count),
        ]
    )
    v = rng.uniform(-speed, speed, (count, 4)) * min(1.0, R) ** 2
    return GeodesicState(x, v)


def screened_static_states(
    g: MetricField,
    rng: np.random.Generator,
    R: float,
    count: int,
    tau_end: float,
    speed: float = 0.05,
    margin: float | None = None,
    screen_dt: float = 1e-2,
    max_rounds: int = 20,
) -> tuple[GeodesicState, int]:
    """Draw ``count`` initial states whose geodesics stay in the chart up to ``tau_end``.

    Most geodesics of the static patch eventually cross the horizon.  Pools of
    ``2 * count`` candidates from :func:`random_static_states` are integrated
    with the coarse step ``screen_dt`` and a margin 1.5 times wider than the
    one used later; survivors are kept in draw order.  Returns the states and
    the number of rejected candidates.
    """
    stop = (g.margin if margin is None else margin) * 1.5
    xs, vs, rejected = [], [], 0
    for _ in range(max_rounds):
        cand = random_static_states(rng, R, 2 * count, speed)
        tr = integrate(g, cand, tau_end, screen_dt, sample_every=max(1, int(round(tau_end / screen_dt))), margin=stop)
        ok = tr.status == COMPLETE
        xs.extend(cand.x[ok])
        vs.extend(cand.v[ok])
        rejected += int(np.sum(~ok))
        if len(xs) >= count:
            return GeodesicState(np.array(xs[:count]), np.array(vs[:count])), rejected
    raise DomainError(f"fewer than {count} of the sampled geodesics stay in the chart until tau = {tau_end:g}")
