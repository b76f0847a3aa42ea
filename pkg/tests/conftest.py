"""Shared corpus builders.

Plain Gaussian trains have nearly flat link spectra and refuse to truncate
at practical tolerances, which would make every error-accounting test
vacuous.  ``decaying_train`` scales each core geometrically along its right
link index so rounding and Tucker sweeps have real energy to shed.
"""

from __future__ import annotations

import numpy as np

from ttmera.dense import DenseTensor
from ttmera.rng import standard_normal, stream
from ttmera.train import TensorTrain


def random_dense(seed: int, dims) -> DenseTensor:
    return DenseTensor(standard_normal(stream(seed), tuple(dims)))


def decaying_train(
    seed: int, dims, max_rank: int = 8, decay: float = 0.5
) -> TensorTrain:
    dims = tuple(int(d) for d in dims)
    gen = stream(seed, 77)
    ranks = [1]
    for _ in range(len(dims) - 1):
        ranks.append(int(gen.integers(2, max_rank + 1)))
    ranks.append(1)
    cores = []
    for d, n in enumerate(dims):
        g = standard_normal(stream(seed, d + 1), (ranks[d], n, ranks[d + 1]))
        cores.append(g * decay ** np.arange(ranks[d + 1]))
    return TensorTrain(cores)
