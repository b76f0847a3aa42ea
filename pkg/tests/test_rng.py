"""Determinism and shape contracts of the seeded randomness helpers."""

import numpy as np
import pytest

from ttmera.rng import random_isometry, random_orthogonal, standard_normal, stream


def test_stream_reproducible():
    a = standard_normal(stream(42, 1, 2), (3, 4))
    b = standard_normal(stream(42, 1, 2), (3, 4))
    np.testing.assert_array_equal(a, b)


def test_stream_paths_distinct():
    a = standard_normal(stream(42, 1), 8)
    b = standard_normal(stream(42, 2), 8)
    c = standard_normal(stream(43, 1), 8)
    assert not np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_stream_seed_range():
    with pytest.raises(ValueError):
        stream(-1)
    with pytest.raises(ValueError):
        stream(2**64)


def test_standard_normal_moments():
    x = standard_normal(stream(7), 200_000)
    assert abs(x.mean()) < 0.01
    assert abs(x.std() - 1.0) < 0.01


def test_standard_normal_odd_count():
    assert standard_normal(stream(1), 7).shape == (7,)
    assert standard_normal(stream(1), (3, 5)).shape == (3, 5)


def test_random_orthogonal():
    Q = random_orthogonal(stream(5), 9)
    np.testing.assert_allclose(Q.T @ Q, np.eye(9), atol=1e-12)
    np.testing.assert_allclose(Q @ Q.T, np.eye(9), atol=1e-12)


def test_random_isometry():
    W = random_isometry(stream(5), 12, 4)
    assert W.shape == (12, 4)
    np.testing.assert_allclose(W.T @ W, np.eye(4), atol=1e-12)


def test_random_isometry_needs_tall():
    with pytest.raises(ValueError):
        random_isometry(stream(0), 3, 5)
