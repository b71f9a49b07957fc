"""Central finite differences with the package-wide step policy.

The step along coordinate ``k`` is ``h * max(1, |p_k|)``.  All stencil points
for one derivative are evaluated in a single call of the target function, so
callables must broadcast over leading axes.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

DEFAULT_STEP = 1e-5
# second derivatives: roundoff grows like eps/h^2, so a larger step wins
DEFAULT_CURVATURE_STEP = 1e-4


def coordinate_steps(p: np.ndarray, h: float) -> np.ndarray:
    return h * np.maximum(1.0, np.abs(p))


def _expand(steps: np.ndarray, extra: int) -> np.ndarray:
    return steps.reshape(steps.shape + (1,) * extra)


def _gradient_once(fn, p, h):
    m = p.shape[-1]
    steps = coordinate_steps(p, h)
    eye = np.eye(m).reshape((m,) + (1,) * (p.ndim - 1) + (m,))
    offsets = eye * steps
    vals = fn(np.concatenate([p + offsets, p - offsets]))
    out_rank = vals.ndim - p.ndim
    diffs = vals[:m] - vals[m:]
    denom = 2.0 * np.moveaxis(steps, -1, 0)
    diffs = diffs / _expand(denom, out_rank)
    # (m, batch..., S...) -> (batch..., m, S...)
    return np.moveaxis(diffs, 0, p.ndim - 1)


def gradient(fn: Callable, p, h: float = DEFAULT_STEP, richardson: bool = False) -> np.ndarray:
    """Partial derivatives ``d fn / d p_k``; result shape ``(..., m, *out)``."""
    p = np.asarray(p, dtype=float)
    coarse = _gradient_once(fn, p, h)
    if not richardson:
        return coarse
    fine = _gradient_once(fn, p, h / 2.0)
    return (4.0 * fine - coarse) / 3.0


def hessian(fn: Callable, p, h: float = DEFAULT_CURVATURE_STEP, richardson: bool = False) -> np.ndarray:
    """Second partials ``d^2 fn / dp_k dp_l``; result shape ``(..., m, m, *out)``."""
    p = np.asarray(p, dtype=float)
    coarse = _hessian_once(fn, p, h)
    if not richardson:
        return coarse
    fine = _hessian_once(fn, p, h / 2.0)
    return (4.0 * fine - coarse) / 3.0


def _hessian_once(fn, p, h):
    m = p.shape[-1]
    steps = coordinate_steps(p, h)
    pairs = [(k, l) for k in range(m) for l in range(k + 1, m)]
    n_pts = 1 + 2 * m + 4 * len(pairs)
    pts = np.broadcast_to(p, (n_pts,) + p.shape).copy()
    idx = 1
    for k in range(m):
        pts[idx, ..., k] += steps[..., k]
        pts[idx + 1, ..., k] -= steps[..., k]
        idx += 2
    for k, l in pairs:
        for sk, sl in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
            pts[idx, ..., k] += sk * steps[..., k]
            pts[idx, ..., l] += sl * steps[..., l]
            idx += 1
    vals = fn(pts)
    out_rank = vals.ndim - p.ndim
    centre = vals[0]
    out = np.empty((m, m) + centre.shape)
    idx = 1
    for k in range(m):
        hk = _expand(steps[..., k], out_rank)
        out[k, k] = (vals[idx] - 2.0 * centre + vals[idx + 1]) / hk**2
        idx += 2
    for k, l in pairs:
        hk = _expand(steps[..., k], out_rank)
        hl = _expand(steps[..., l], out_rank)
        out[k, l] = out[l, k] = (
            vals[idx] - vals[idx + 1] - vals[idx + 2] + vals[idx + 3]
        ) / (4.0 * hk * hl)
        idx += 4
    batch = p.ndim - 1
    return np.moveaxis(out, (0, 1), (batch, batch + 1))
