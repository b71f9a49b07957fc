"""Pseudo-Euclidean ambient spaces and their quadric hypersurfaces.

Coordinates are always ordered ``(xi_0, xi_1, ..., xi_{n-1})``; the sign of
each axis lives in the :class:`Signature`, so the timelike axis of the de
Sitter ambient space is simply the one carrying ``-1``.

Every function broadcasts over leading axes: an array of shape ``(..., n)``
is a stack of ambient points.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError


@dataclass(frozen=True)
class Signature:
    signs: tuple[int, ...]

    def __post_init__(self) -> None:
        signs = tuple(int(s) for s in self.signs)
        if len(signs) < 2:
            raise ValueError("signature needs at least two axes")
        if any(s not in (1, -1) for s in signs):
            raise ValueError(f"signature entries must be +1 or -1, got {signs}")
        if 1 not in signs:
            raise ValueError("signature needs at least one positive axis")
        object.__setattr__(self, "signs", signs)

    @property
    def dim(self) -> int:
        return len(self.signs)

    @property
    def eta(self) -> np.ndarray:
        return np.diag(np.asarray(self.signs, dtype=float))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.signs, dtype=float)


EUCLIDEAN_5 = Signature((1, 1, 1, 1, 1))
DE_SITTER_5 = Signature((-1, 1, 1, 1, 1))
REDUCED_3 = Signature((-1, 1, 1))


@dataclass(frozen=True)
class Quadric:
    """The level set ``<xi, xi> = R^2`` of a flat ambient metric."""

    signature: Signature
    radius: float

    def __post_init__(self) -> None:
        if not (np.isfinite(self.radius) and self.radius > 0):
            raise ValueError(f"quadric radius must be positive, got {self.radius}")

    @property
    def dim(self) -> int:
        return self.signature.dim


def _check_dim(sig: Signature, *arrays: np.ndarray) -> None:
    for a in arrays:
        if a.shape[-1] != sig.dim:
            raise DimensionError(
                f"expected {sig.dim} ambient coordinates, got shape {a.shape}"
            )


def flat_inner(sig: Signature, a, b) -> np.ndarray | float:
    """Flat pairing ``sum_A signs[A] a[A] b[A]``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    _check_dim(sig, a, b)
    out = np.sum(sig.as_array() * a * b, axis=-1)
    return float(out) if out.ndim == 0 else out


def constraint_residual(q: Quadric, p) -> np.ndarray | float:
    """``<p, p> - R^2``; zero exactly on the quadric."""
    return flat_inner(q.signature, p, p) - q.radius**2


def boost(sig: Signature, i: int, j: int, rapidity: float) -> np.ndarray:
    """Ambient transformation preserving ``flat_inner`` in the (i, j) plane.

    A Euclidean rotation when both axes share a sign, a hyperbolic boost
    otherwise.
    """
    m = np.eye(sig.dim)
    if sig.signs[i] == sig.signs[j]:
        c, s = np.cos(rapidity), np.sin(rapidity)
        m[i, i], m[i, j], m[j, i], m[j, j] = c, -s, s, c
    else:
        c, s = np.cosh(rapidity), np.sinh(rapidity)
        m[i, i], m[i, j], m[j, i], m[j, j] = c, s, s, c
    return m
