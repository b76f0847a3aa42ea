"""Seedable, splittable randomness with portable output.

All experiment randomness flows through a Philox counter-based generator
keyed by a user seed plus an explicit stream path, so any constituent
(an isometry, a scan point, a trial index) can be regenerated in isolation.
Standard normals are produced by an explicit Box-Muller transform on the
generator's uniforms rather than a library sampler, so the values depend
only on the Philox bit stream.
"""

from __future__ import annotations

import numpy as np

from .kernels import qr_thin

__all__ = ["stream", "standard_normal", "random_orthogonal", "random_isometry"]


def stream(seed: int, *path: int) -> np.random.Generator:
    """Generator for the sub-stream identified by ``path`` under ``seed``."""
    if not 0 <= int(seed) < 2**64:
        raise ValueError(f"seed must fit in 64 bits, got {seed}")
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.Philox(ss))


def standard_normal(gen: np.random.Generator, shape) -> np.ndarray:
    """Standard normals via Box-Muller on Philox uniforms."""
    n = int(np.prod(shape)) if np.ndim(shape) else int(shape)
    pairs = (n + 1) // 2
    u1 = 1.0 - gen.random(pairs)  # in (0, 1], keeps the log finite
    u2 = gen.random(pairs)
    r = np.sqrt(-2.0 * np.log(u1))
    out = np.concatenate([r * np.cos(2 * np.pi * u2), r * np.sin(2 * np.pi * u2)])
    return out[:n].reshape(shape)


def random_orthogonal(gen: np.random.Generator, n: int) -> np.ndarray:
    """Haar-ish orthogonal matrix from a QR of a Gaussian draw."""
    Q, _ = qr_thin(standard_normal(gen, (n, n)))
    return Q


def random_isometry(gen: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    """Matrix with orthonormal columns, ``rows >= cols``."""
    if rows < cols:
        raise ValueError(f"isometry needs rows >= cols, got {rows} < {cols}")
    Q, _ = qr_thin(standard_normal(gen, (rows, cols)))
    return Q
