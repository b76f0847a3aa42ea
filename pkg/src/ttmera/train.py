"""Tensor trains: decomposition, canonical forms, rounding, and interfaces.

A tensor train represents an order-``D`` tensor through 3-way cores
``G_d`` of shape ``(R_d, I_d, R_{d+1})`` with ``R_1 = R_{D+1} = 1``:

    t(i_1, ..., i_D) = sum over ranks of
        G_1(1, i_1, r_2) G_2(r_2, i_2, r_3) ... G_D(r_D, i_D, 1).

Core ``d`` is left-orthogonal when its ``(R_d I_d, R_{d+1})`` reshape has
orthonormal columns and right-orthogonal when its ``(R_d, I_d R_{d+1})``
reshape has orthonormal rows.  A train is site-``d``-mixed-canonical when
cores ``1..d-1`` are left-orthogonal and cores ``d+1..D`` right-orthogonal;
the full Frobenius norm then lives in core ``d``.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .dense import DenseTensor
from .errors import CapacityError, NumericError
from .kernels import qr_thin, svd_trunc

__all__ = [
    "TensorTrain",
    "InterfaceMatrices",
    "tt_svd",
    "orthogonalize",
    "tt_contract",
    "tt_norm",
    "tt_round",
    "merge_cores",
    "split_core",
    "interface_matrices",
    "tt_storage",
    "tt_dense_inner",
]

DENSE_ENTRY_BUDGET = 10**8


class TensorTrain:
    """Immutable chain of 3-way cores, optionally tagged with its canonical site.

    ``canonical_site`` is trusted metadata: constructors of operations set it
    when the sweep they performed guarantees the form, and it is dropped to
    ``None`` whenever cores are replaced wholesale.
    """

    __slots__ = ("_cores", "_site")

    def __init__(
        self, cores: Sequence[np.ndarray], canonical_site: int | None = None
    ):
        if not cores:
            raise ValueError("a tensor train needs at least one core")
        checked = []
        for d, c in enumerate(cores):
            c = np.asarray(c, dtype=np.float64)
            if c.ndim != 3:
                raise ValueError(f"core {d + 1} must be 3-way, got {c.ndim} axes")
            if not np.all(np.isfinite(c)):
                raise NumericError(f"core {d + 1} contains non-finite entries")
            checked.append(c)
        if checked[0].shape[0] != 1:
            raise ValueError(f"leading rank must be 1, got {checked[0].shape[0]}")
        if checked[-1].shape[2] != 1:
            raise ValueError(f"trailing rank must be 1, got {checked[-1].shape[2]}")
        for d in range(len(checked) - 1):
            if checked[d].shape[2] != checked[d + 1].shape[0]:
                raise ValueError(
                    f"rank mismatch between cores {d + 1} and {d + 2}: "
                    f"{checked[d].shape[2]} vs {checked[d + 1].shape[0]}"
                )
        if canonical_site is not None and not 1 <= canonical_site <= len(checked):
            raise ValueError(f"canonical site {canonical_site} outside 1..{len(checked)}")
        for c in checked:
            c.setflags(write=False)
        self._cores = tuple(checked)
        self._site = canonical_site

    @property
    def cores(self) -> tuple[np.ndarray, ...]:
        return self._cores

    def core(self, d: int) -> np.ndarray:
        """Core at 1-based position ``d``."""
        if not 1 <= d <= self.order:
            raise ValueError(f"core index {d} outside 1..{self.order}")
        return self._cores[d - 1]

    @property
    def order(self) -> int:
        return len(self._cores)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(c.shape[1] for c in self._cores)

    @property
    def ranks(self) -> tuple[int, ...]:
        """All ``D+1`` ranks including the unit boundaries."""
        return tuple(c.shape[0] for c in self._cores) + (1,)

    @property
    def canonical_site(self) -> int | None:
        return self._site

    def __repr__(self) -> str:  # pragma: no cover
        return f"TensorTrain(dims={self.dims}, ranks={self.ranks})"


def tt_storage(tt: TensorTrain) -> int:
    """Number of stored entries, ``sum_d R_d * I_d * R_{d+1}``."""
    return sum(c.size for c in tt.cores)


def _left_mat(core: np.ndarray) -> np.ndarray:
    r, n, s = core.shape
    return np.reshape(core, (r * n, s), order="F")


def _right_mat(core: np.ndarray) -> np.ndarray:
    r, n, s = core.shape
    return np.reshape(core, (r, n * s), order="F")


def _from_left(M: np.ndarray, r: int, n: int) -> np.ndarray:
    return np.reshape(M, (r, n, M.shape[1]), order="F")


def _from_right(M: np.ndarray, n: int, s: int) -> np.ndarray:
    return np.reshape(M, (M.shape[0], n, s), order="F")


def tt_svd(t: DenseTensor, epsilon: float) -> TensorTrain:
    """Decompose a dense tensor with relative accuracy ``epsilon``.

    Each of the ``D-1`` sequential truncations gets an equal share
    ``epsilon * |t|_F / sqrt(D-1)`` of the error budget, so the result
    satisfies ``|t - reconstruction|_F <= epsilon * |t|_F``.  The returned
    train is site-``D``-mixed-canonical; ``epsilon=0`` truncates only
    numerically zero singular values.
    """
    if epsilon < 0:
        raise ValueError(f"epsilon must be non-negative, got {epsilon}")
    D = t.order
    dims = t.dims
    if D == 1:
        return TensorTrain([t.data.reshape(1, dims[0], 1)], canonical_site=1)
    delta = epsilon * t.norm() / math.sqrt(D - 1)
    cores = []
    C = t.data.reshape(dims[0], -1, order="F")
    r = 1
    for d in range(D - 1):
        f = svd_trunc(C, delta)
        if f.rank == 0:
            raise ValueError(f"mode {d + 1} fully truncated; epsilon too large")
        cores.append(_from_left(f.U, r, dims[d]))
        r = f.rank
        C = f.sigma[:, None] * f.V.T
        if d < D - 2:
            C = np.reshape(C, (r * dims[d + 1], -1), order="F")
    cores.append(C.reshape(r, dims[D - 1], 1))
    return TensorTrain(cores, canonical_site=D)


def orthogonalize(tt: TensorTrain, d: int) -> TensorTrain:
    """Return an equivalent train in site-``d``-mixed-canonical form."""
    if not 1 <= d <= tt.order:
        raise ValueError(f"site {d} outside 1..{tt.order}")
    if tt.canonical_site == d:
        return tt
    cores = list(tt.cores)
    for k in range(d - 1):
        Q, R = qr_thin(_left_mat(cores[k]))
        cores[k] = _from_left(Q, cores[k].shape[0], cores[k].shape[1])
        cores[k + 1] = np.tensordot(R, cores[k + 1], axes=([1], [0]))
    for k in range(tt.order - 1, d - 1, -1):
        Q, R = qr_thin(_right_mat(cores[k]).T)
        cores[k] = _from_right(Q.T, cores[k].shape[1], cores[k].shape[2])
        cores[k - 1] = np.tensordot(cores[k - 1], R.T, axes=([2], [0]))
    return TensorTrain(cores, canonical_site=d)


def tt_norm(tt: TensorTrain) -> float:
    """Frobenius norm of the represented tensor, computed core-locally."""
    site = tt.canonical_site
    if site is None:
        tt = orthogonalize(tt, 1)
        site = 1
    return float(np.linalg.norm(tt.core(site).ravel()))


def tt_contract(tt: TensorTrain) -> DenseTensor:
    """Materialize the represented tensor.

    Refuses to allocate more than ``DENSE_ENTRY_BUDGET`` entries.
    """
    total = math.prod(tt.dims)
    if total > DENSE_ENTRY_BUDGET:
        raise CapacityError(
            f"contraction would create {total} entries "
            f"(budget {DENSE_ENTRY_BUDGET})"
        )
    G = tt.cores[0].reshape(tt.dims[0], -1, order="F")
    for c in tt.cores[1:]:
        r, n, s = c.shape
        G = G @ np.reshape(c, (r, n * s), order="F")
        G = np.reshape(G, (-1, s), order="F")
    return DenseTensor.from_flat(G.ravel(order="F"), tt.dims)


def tt_dense_inner(tt: TensorTrain, t: DenseTensor) -> float:
    """Inner product ``<t, tt>`` without materializing the train."""
    if t.dims != tt.dims:
        raise ValueError(f"dimension mismatch: {t.dims} vs {tt.dims}")
    C = t.data.reshape(1, -1)
    for c in tt.cores:
        r, n, s = c.shape
        C = np.reshape(C, (r * n, -1), order="F")
        C = _left_mat(c).T @ C
    return float(C.reshape(()))


def tt_round(tt: TensorTrain, epsilon: float) -> TensorTrain:
    """Recompress a train to relative accuracy ``epsilon``.

    Right-orthogonalizes, then sweeps left to right truncating each core at
    ``epsilon * |tt|_F / sqrt(D-1)``.  Result is site-``D``-mixed-canonical.
    ``epsilon=0`` removes only numerically zero singular values.
    """
    if epsilon < 0:
        raise ValueError(f"epsilon must be non-negative, got {epsilon}")
    if tt.order == 1:
        return TensorTrain(list(tt.cores), canonical_site=1)
    tt = orthogonalize(tt, 1)
    delta = epsilon * float(np.linalg.norm(tt.core(1).ravel())) / math.sqrt(tt.order - 1)
    cores = list(tt.cores)
    for d in range(tt.order - 1):
        f = svd_trunc(_left_mat(cores[d]), delta)
        if f.rank == 0:
            raise ValueError(f"mode {d + 1} fully truncated; epsilon too large")
        cores[d] = _from_left(f.U, cores[d].shape[0], cores[d].shape[1])
        carry = f.sigma[:, None] * f.V.T
        cores[d + 1] = np.tensordot(carry, cores[d + 1], axes=([1], [0]))
    return TensorTrain(cores, canonical_site=tt.order)


def merge_cores(tt: TensorTrain, d: int) -> TensorTrain:
    """Contract cores ``d`` and ``d+1`` into one supercore.

    The merged free index is the fused pair ``[i_d i_{d+1}]`` with ``i_d``
    fastest, so the result represents the same tensor reshaped.
    """
    if not 1 <= d <= tt.order - 1:
        raise ValueError(f"cannot merge at {d}: need cores {d} and {d + 1}")
    a, b = tt.cores[d - 1], tt.cores[d]
    super_ = np.tensordot(a, b, axes=([2], [0]))
    r, n, m, s = super_.shape
    super_ = np.reshape(super_, (r, n * m, s), order="F")
    cores = list(tt.cores[: d - 1]) + [super_] + list(tt.cores[d + 1 :])
    return TensorTrain(cores)


def split_core(
    tt: TensorTrain,
    d: int,
    left_dim: int,
    right_dim: int,
    delta: float = 0.0,
    right_orthogonal: bool = False,
) -> tuple[TensorTrain, float]:
    """Split core ``d`` (free dimension ``left_dim * right_dim``) in two.

    The supercore is matricized as ``(R_d * left_dim, right_dim * R_{d+2})``
    and factored by :func:`svd_trunc` at ``delta``.  By default the new left
    core takes the orthonormal factor; with ``right_orthogonal`` the roles
    swap.  Returns the new train and the discarded energy, whose square root
    is the error introduced when the surrounding cores are orthogonal.
    """
    core = tt.core(d)
    r, n, s = core.shape
    if left_dim * right_dim != n:
        raise ValueError(
            f"split {left_dim}x{right_dim} does not match free dimension {n} "
            f"of core {d}"
        )
    M = np.reshape(core, (r * left_dim, right_dim * s), order="F")
    f = svd_trunc(M, delta)
    if f.rank == 0:
        raise ValueError(f"core {d} fully truncated; delta too large")
    if right_orthogonal:
        left = _from_left(f.U * f.sigma, r, left_dim)
        right = _from_right(f.V.T, right_dim, s)
    else:
        left = _from_left(f.U, r, left_dim)
        right = _from_right(f.sigma[:, None] * f.V.T, right_dim, s)
    cores = list(tt.cores[: d - 1]) + [left, right] + list(tt.cores[d:])
    return TensorTrain(cores), f.discarded_energy


@dataclass(frozen=True)
class InterfaceMatrices:
    """The three matricizations attached to site ``d`` of a train.

    ``left`` is ``R_d x (I_1 ... I_{d-1})``, ``right`` is
    ``R_{d+1} x (I_{d+1} ... I_D)``, and ``center`` is the core's
    ``I_d x (R_d R_{d+1})`` unfolding with ``r_d`` fastest.  The mode-``d``
    matricization of the represented tensor factors as
    ``center @ kron(right, left)``.
    """

    left: np.ndarray
    right: np.ndarray
    center: np.ndarray


def _chain(cores: Sequence[np.ndarray]) -> np.ndarray:
    """Contract a run of cores into ``(R_first, prod free dims, R_last)``."""
    T = cores[0]
    for c in cores[1:]:
        T = np.tensordot(T, c, axes=([2], [0]))
        r, n, m, s = T.shape
        T = np.reshape(T, (r, n * m, s), order="F")
    return T


def interface_matrices(tt: TensorTrain, d: int) -> InterfaceMatrices:
    """Interface matrices at site ``d``; boundary interfaces are unit scalars."""
    if not 1 <= d <= tt.order:
        raise ValueError(f"site {d} outside 1..{tt.order}")
    dims = tt.dims
    left_size = math.prod(dims[: d - 1]) * tt.ranks[d - 1]
    right_size = math.prod(dims[d:]) * tt.ranks[d]
    if max(left_size, right_size) > DENSE_ENTRY_BUDGET:
        raise CapacityError(
            f"interface at site {d} would create "
            f"{max(left_size, right_size)} entries (budget {DENSE_ENTRY_BUDGET})"
        )
    if d == 1:
        left = np.ones((1, 1))
    else:
        T = _chain(tt.cores[: d - 1])
        left = T.reshape(T.shape[1], T.shape[2], order="F").T.copy()
    if d == tt.order:
        right = np.ones((1, 1))
    else:
        T = _chain(tt.cores[d:])
        right = T.reshape(T.shape[0], T.shape[1], order="F").copy()
    core = tt.core(d)
    r, n, s = core.shape
    center = np.reshape(core.transpose(1, 0, 2), (n, r * s), order="F")
    return InterfaceMatrices(left=left, right=right, center=center)
