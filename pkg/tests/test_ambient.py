from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dsgeom.ambient import DE_SITTER_5, EUCLIDEAN_5, Quadric, Signature, boost, constraint_residual, flat_inner
from dsgeom.errors import DimensionError

from oracles import ambient_inner

finite = st.floats(-1e3, 1e3, allow_nan=False)
vec5 = st.lists(finite, min_size=5, max_size=5)


def test_flat_inner_euclidean_unit():
    assert flat_inner(EUCLIDEAN_5, [1, 0, 0, 0, 0], [1, 0, 0, 0, 0]) == 1.0


def test_flat_inner_timelike_axis():
    assert flat_inner(DE_SITTER_5, [1, 0, 0, 0, 0], [1, 0, 0, 0, 0]) == -1.0


def test_flat_inner_mixed():
    assert flat_inner(DE_SITTER_5, [3, 4, 0, 0, 0], [3, 4, 0, 0, 0]) == 7.0


def test_constraint_residual_examples():
    hyp = Quadric(DE_SITTER_5, 1.0)
    assert constraint_residual(hyp, [0, 1, 0, 0, 0]) == 0.0
    assert constraint_residual(Quadric(EUCLIDEAN_5, 2.0), [0, 0, 0, 0, 2]) == 0.0
    assert constraint_residual(hyp, [1, 1, 0, 0, 0]) == -1.0


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        flat_inner(DE_SITTER_5, [1, 0, 0], [1, 0, 0])


@pytest.mark.parametrize("signs", [(1,), (-1, -1), (1, 2)])
def test_bad_signature(signs):
    with pytest.raises(ValueError):
        Signature(signs)


def test_bad_radius():
    with pytest.raises(ValueError):
        Quadric(DE_SITTER_5, 0.0)


def test_batched_matches_scalar(rng):
    a = rng.normal(size=(7, 5))
    b = rng.normal(size=(7, 5))
    batch = flat_inner(DE_SITTER_5, a, b)
    for i in range(7):
        assert batch[i] == pytest.approx(ambient_inner(DE_SITTER_5.signs, a[i], b[i]), abs=1e-12)


@given(vec5, vec5)
def test_flat_inner_symmetric(a, b):
    assert flat_inner(DE_SITTER_5, a, b) == flat_inner(DE_SITTER_5, b, a)


@settings(max_examples=60)
@given(vec5.map(lambda v: np.array(v) / 1e3), st.integers(0, 4), st.integers(0, 4), st.floats(-2, 2))
def test_residual_invariant_under_isometries(p, i, j, angle):
    if i == j:
        return
    q = Quadric(DE_SITTER_5, 1.0)
    m = boost(DE_SITTER_5, i, j, angle)
    before = constraint_residual(q, p)
    after = constraint_residual(q, m @ p)
    scale = max(1.0, float(np.sum((m @ p) ** 2)))
    assert abs(after - before) <= 1e-12 * scale


def test_boost_preserves_eta():
    eta = DE_SITTER_5.eta
    for i, j in [(0, 1), (1, 2), (0, 4), (3, 4)]:
        m = boost(DE_SITTER_5, i, j, 0.7)
        assert np.max(np.abs(m.T @ eta @ m - eta)) < 1e-14
