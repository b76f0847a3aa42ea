"""Multiscale entanglement renormalization ansatz built from tensor trains.

A MERA layer coarse-grains ``D`` incoming indices to ``D/K`` outgoing ones.
Each *isometry* fuses ``K`` consecutive indices into one smaller index
through a matrix ``W ((I_1 ... I_K) x S)`` with orthonormal columns.  Each
*disentangler* is an orthogonal matrix acting on the fused pair of indices
straddling two neighbouring isometry groups; it is rank-reducing
bookkeeping, never a source of error.  Stacked layers end in a small dense
top tensor, and since every constituent is orthogonal the norm of the
represented tensor equals the norm of the top.

Layer layout is the brick pattern: isometries cover ``(1..K), (K+1..2K),
...`` and disentanglers sit at the group boundaries ``(K, K+1), (2K, 2K+1),
...``; boundary cores get no disentangler.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .dense import DenseTensor
from .errors import NumericError
from .kernels import procrustes_solve, svd_full, svd_trunc
from .train import (
    TensorTrain,
    merge_cores,
    orthogonalize,
    split_core,
    tt_contract,
    tt_norm,
    tt_round,
    tt_svd,
)
from .tucker import tucker_sweep

__all__ = [
    "Isometry",
    "Disentangler",
    "MeraLayer",
    "Mera",
    "DisentanglerReport",
    "shuf",
    "shuf_inv",
    "find_disentangler",
    "disentangler_positions",
    "isometry_positions",
    "tt_to_mera",
    "mera_to_tt",
    "mera_storage",
    "mera_relative_error",
]

log = logging.getLogger(__name__)

ORTHO_TOL = 1e-12


@dataclass(frozen=True)
class Isometry:
    """Column-orthonormal map fusing ``input_dims`` into ``output_dim``.

    ``data`` is ``(prod(input_dims), output_dim)`` with the input indices
    fused first-index-fastest.
    """

    input_dims: tuple[int, ...]
    output_dim: int
    data: np.ndarray

    def __post_init__(self):
        rows = math.prod(self.input_dims)
        if self.data.shape != (rows, self.output_dim):
            raise ValueError(
                f"isometry data must be {rows}x{self.output_dim}, "
                f"got {self.data.shape}"
            )
        if self.output_dim > rows:
            raise ValueError(
                f"output dimension {self.output_dim} exceeds fused input {rows}"
            )
        gram = self.data.T @ self.data
        if np.max(np.abs(gram - np.eye(self.output_dim))) > ORTHO_TOL:
            raise ValueError("isometry columns are not orthonormal")


@dataclass(frozen=True)
class Disentangler:
    """Orthogonal matrix on the fused pair ``(I_1, I_2)``.

    ``data @ shuf(supercore)`` re-mixes the two free indices; applying
    ``data.T`` undoes it exactly.
    """

    dims: tuple[int, int]
    data: np.ndarray

    def __post_init__(self):
        n = self.dims[0] * self.dims[1]
        if self.data.shape != (n, n):
            raise ValueError(
                f"disentangler data must be {n}x{n}, got {self.data.shape}"
            )
        if np.max(np.abs(self.data.T @ self.data - np.eye(n))) > ORTHO_TOL:
            raise ValueError("disentangler is not orthogonal")

    def as_tensor(self) -> DenseTensor:
        """4-way view with dimensions ``(I_1, I_2, I_1, I_2)``."""
        i, j = self.dims
        return DenseTensor.from_flat(self.data.ravel(order="F"), (i, j, i, j))


@dataclass(frozen=True)
class MeraLayer:
    """One coarse-graining level.

    Positions are 1-based indices of the leftmost incoming index each
    constituent touches.  Isometry groups must tile ``1..input_arity`` in
    consecutive runs; disentanglers must straddle group boundaries without
    overlapping each other.
    """

    input_arity: int
    isometries: tuple[tuple[int, Isometry], ...]
    disentanglers: tuple[tuple[int, Disentangler], ...]

    def __post_init__(self):
        covered = []
        for pos, iso in self.isometries:
            covered.append((pos, pos + len(iso.input_dims) - 1))
        covered.sort()
        expect = 1
        for lo, hi in covered:
            if lo != expect:
                raise ValueError(
                    f"isometry coverage gap: expected group start {expect}, got {lo}"
                )
            expect = hi + 1
        if expect != self.input_arity + 1:
            raise ValueError(
                f"isometries cover 1..{expect - 1}, layer arity is {self.input_arity}"
            )
        boundaries = {hi for _, hi in covered[:-1]}
        seen: set[int] = set()
        for pos, _ in self.disentanglers:
            if pos not in boundaries:
                raise ValueError(
                    f"disentangler at {pos} does not straddle a group boundary"
                )
            if pos in seen or pos + 1 in seen:
                raise ValueError(f"disentanglers overlap at position {pos}")
            seen.update((pos, pos + 1))

    @property
    def output_arity(self) -> int:
        return len(self.isometries)


@dataclass(frozen=True)
class Mera:
    """Bottom-up stack of layers closed by a dense top tensor."""

    layers: tuple[MeraLayer, ...]
    top: DenseTensor

    def __post_init__(self):
        if not self.layers:
            raise ValueError("a MERA needs at least one layer")
        for a, b in zip(self.layers, self.layers[1:]):
            if b.input_arity != a.output_arity:
                raise ValueError(
                    f"layer arity mismatch: {a.output_arity} outputs feed "
                    f"{b.input_arity} inputs"
                )
        if self.top.order != self.layers[-1].output_arity:
            raise ValueError(
                f"top tensor order {self.top.order} does not match "
                f"{self.layers[-1].output_arity} outgoing indices"
            )

    @property
    def input_dims(self) -> tuple[int, ...]:
        dims: list[int] = []
        for _, iso in sorted(self.layers[0].isometries):
            dims.extend(iso.input_dims)
        return tuple(dims)


@dataclass(frozen=True)
class DisentanglerReport:
    """Outcome of one iterative disentangler search.

    ``iterations`` counts Procrustes updates actually applied.  A run that
    hits the iteration budget is reported with ``converged=False`` rather
    than raised.  ``achieved_rank`` is the rank of the returned transformed
    matricization at a ``1e-8`` relative Frobenius floor (robust against
    the rounding noise accumulated rotations inject).
    ``singular_value_trace`` holds ``(iteration, sigmas)`` samples when
    tracing was requested.
    """

    target_rank: int
    iterations: int
    final_gap: float
    achieved_rank: int
    converged: bool
    singular_value_trace: tuple[tuple[int, np.ndarray], ...] | None = None


def disentangler_positions(order: int, arity: int) -> list[int]:
    """Left indices of the boundary-straddling pairs for the brick pattern."""
    _check_layer_shape(order, arity)
    return [k * arity for k in range(1, order // arity)]


def isometry_positions(order: int, arity: int) -> list[int]:
    """Left indices of the consecutive ``arity``-sized groups."""
    _check_layer_shape(order, arity)
    return [k * arity + 1 for k in range(order // arity)]


def _check_layer_shape(order: int, arity: int) -> None:
    if arity < 2:
        raise ValueError(f"isometry arity must be at least 2, got {arity}")
    if order % arity != 0:
        raise ValueError(f"layer of {order} indices not divisible by arity {arity}")


# ---------------------------------------------------------------------------
# shuffle bookkeeping between the two supercore matricizations


def _shuf_mat(M: np.ndarray, rl: int, il: int, ir: int, rr: int) -> np.ndarray:
    """From ``(R_l I_l, I_r R_r)`` to ``(I_l I_r, R_l R_r)``."""
    T = np.reshape(M, (rl, il, ir, rr), order="F")
    return np.reshape(T.transpose(1, 2, 0, 3), (il * ir, rl * rr), order="F")


def _shuf_inv_mat(A: np.ndarray, rl: int, il: int, ir: int, rr: int) -> np.ndarray:
    """From ``(I_l I_r, R_l R_r)`` back to ``(R_l I_l, I_r R_r)``."""
    T = np.reshape(A, (il, ir, rl, rr), order="F")
    return np.reshape(T.transpose(2, 0, 1, 3), (rl * il, ir * rr), order="F")


def _supercore_mat(supercore: DenseTensor, split: tuple[int, int]) -> np.ndarray:
    rl, n, rr = supercore.dims
    il, ir = split
    if il * ir != n:
        raise ValueError(f"split {il}x{ir} does not match fused free dimension {n}")
    return np.reshape(supercore.to_array(), (rl * il, ir * rr), order="F")


def shuf(supercore: DenseTensor, split: tuple[int, int]) -> np.ndarray:
    """Matricize a supercore with the free pair on rows, ranks on columns.

    The supercore has dimensions ``(R_l, I_l * I_r, R_r)``; the result is
    ``(I_l I_r) x (R_l R_r)``, a pure reordering of the same entries.
    """
    rl, n, rr = supercore.dims
    il, ir = split
    return _shuf_mat(_supercore_mat(supercore, split), rl, il, ir, rr)


def shuf_inv(
    A: np.ndarray, dims: tuple[int, int, int, int]
) -> tuple[DenseTensor, np.ndarray]:
    """Undo :func:`shuf`.

    ``dims`` is ``(R_l, I_l, I_r, R_r)``.  Returns the supercore tensor of
    dimensions ``(R_l, I_l * I_r, R_r)`` together with its
    ``(R_l I_l, I_r R_r)`` matricization.
    """
    rl, il, ir, rr = dims
    A = np.asarray(A, dtype=np.float64)
    if A.shape != (il * ir, rl * rr):
        raise ValueError(
            f"expected shape {(il * ir, rl * rr)} for dims {dims}, got {A.shape}"
        )
    M = _shuf_inv_mat(A, rl, il, ir, rr)
    T = np.reshape(M, (rl, il * ir, rr), order="F")
    return DenseTensor(T), M


# ---------------------------------------------------------------------------
# iterative disentangler search


def find_disentangler(
    supercore: DenseTensor,
    split: tuple[int, int],
    target_rank: int,
    gap_threshold: float = 1e12,
    max_iters: int = 50_000,
    trace_stride: int = 0,
    fixed_reference: bool = False,
) -> tuple[Disentangler, DenseTensor, DisentanglerReport]:
    """Search for an orthogonal mix of the two free indices that drops the
    supercore's internal rank to ``target_rank``.

    Alternates two steps on the ``(R_l I_l, I_r R_r)`` matricization ``M``:
    take the best rank-``target_rank`` approximation of ``M``, then solve an
    orthogonal Procrustes problem for the update that moves the fused-index
    rows of ``M`` closest to that approximation.  Convergence is declared
    when ``sigma_R' / sigma_{R'+1} >= gap_threshold``; exhausting the
    iteration budget reports ``converged=False`` instead of raising.

    ``fixed_reference`` freezes the low-rank reference at the first iterate
    instead of refreshing it every sweep; refreshing is the default because
    it keeps each Procrustes step optimal for the current iterate.

    Returns ``(disentangler, transformed supercore, report)``.
    """
    rl, n, rr = supercore.dims
    il, ir = split
    if il * ir != n:
        raise ValueError(f"split {il}x{ir} does not match fused dimension {n}")
    max_rank = min(rl * il, ir * rr)
    if not 1 <= target_rank <= max_rank:
        raise ValueError(f"target rank {target_rank} outside 1..{max_rank}")
    if gap_threshold <= 1:
        raise ValueError(f"gap threshold must exceed 1, got {gap_threshold}")
    M = _supercore_mat(supercore, split)
    A0 = _shuf_mat(M, rl, il, ir, rr)
    V = np.eye(il * ir)
    trace: list[tuple[int, np.ndarray]] = []
    reference: np.ndarray | None = None
    iterations = 0
    while True:
        U, s, Wt = np.linalg.svd(M, full_matrices=False)
        if not np.all(np.isfinite(s)):
            raise NumericError("singular values became non-finite")
        gap = _rank_gap(s, target_rank)
        if trace_stride and iterations % trace_stride == 0:
            trace.append((iterations, s.copy()))
        if gap >= gap_threshold:
            converged = True
            break
        if iterations >= max_iters:
            converged = False
            break
        iterations += 1
        if reference is None or not fixed_reference:
            reference = U[:, :target_rank] @ (
                s[:target_rank, None] * Wt[:target_rank]
            )
        A = _shuf_mat(M, rl, il, ir, rr)
        A_low = _shuf_mat(reference, rl, il, ir, rr)
        Vhat = procrustes_solve(A, A_low)
        M = _shuf_inv_mat(Vhat @ A, rl, il, ir, rr)
        V = Vhat @ V
    # Long products of near-orthogonal updates drift; snap the accumulated
    # transform back onto the orthogonal manifold, then rebuild the final
    # matrix from it so the returned supercore is exactly the stored map
    # applied to the input.
    P, _, Qt = svd_full(V)
    V = P @ Qt
    M = _shuf_inv_mat(V @ A0, rl, il, ir, rr)
    # The accumulated rotations inject rounding noise a few times above the
    # strict elementwise rank cutoff; a small relative Frobenius floor makes
    # the reported rank robust to it.
    achieved = svd_trunc(M, 1e-8 * float(np.linalg.norm(M))).rank
    report = DisentanglerReport(
        target_rank=target_rank,
        iterations=iterations,
        final_gap=gap,
        achieved_rank=achieved,
        converged=converged,
        singular_value_trace=tuple(trace) if trace_stride else None,
    )
    transformed = DenseTensor(np.reshape(M, (rl, n, rr), order="F"))
    return Disentangler(dims=(il, ir), data=V), transformed, report


def _rank_gap(s: np.ndarray, r: int) -> float:
    """Ratio ``sigma_r / sigma_{r+1}``, infinite past the spectrum's end."""
    if r >= s.size or s[r] == 0.0:
        return math.inf
    return float(s[r - 1] / s[r])


# ---------------------------------------------------------------------------
# train -> MERA


def tt_to_mera(
    tt: TensorTrain,
    arity: int,
    epsilon: float,
    layers: int = 1,
    strategy: Literal["hosvd", "procrustes"] = "hosvd",
    target_ranks: list[list[int]] | None = None,
    gap_threshold: float = 1e12,
    max_iters: int = 50_000,
    max_output_dim: int | Sequence[int] | None = None,
) -> tuple[Mera, list[float]]:
    """Convert a train into a ``layers``-deep MERA with relative error at
    most ``epsilon``.

    Per layer: fuse neighbouring cores at the disentangler positions, obtain
    a disentangler for each fused pair (an exact full SVD of the pair's free
    unfolding under ``strategy="hosvd"``, or the iterative rank-targeting
    search under ``strategy="procrustes"``), split the pairs again, fuse the
    isometry groups, and run the truncated Tucker sweep whose factors become
    the isometries.  Only the isometry truncations discard energy; each one
    is budgeted ``epsilon * |tt|_F / sqrt(total isometry count)``, so the
    total squared error is at most ``(epsilon * |tt|_F)^2``.  After the last
    layer the remaining train is contracted into the top tensor.

    ``target_ranks[layer][k]`` fixes the rank goal of the ``k``-th
    disentangler of that layer under ``strategy="procrustes"``; without it,
    the goal falls back to the pair's numerically significant rank at the
    isometry tolerance, a conservative choice that is logged.  A search
    that fails to converge is logged and its transform used as-is; the
    error guarantee is unaffected because disentanglers are orthogonal.

    ``max_output_dim`` forces an upper bound on every isometry's output
    size (one integer, or one per layer).  Forced truncation can discard
    far more energy than ``epsilon`` allows; the reported discarded
    energies stay exact either way.

    Returns the MERA and the per-isometry discarded energies in
    construction order.
    """
    if epsilon < 0:
        raise ValueError(f"epsilon must be non-negative, got {epsilon}")
    if layers < 1:
        raise ValueError(f"need at least one layer, got {layers}")
    if strategy not in ("hosvd", "procrustes"):
        raise ValueError(f"unknown strategy {strategy!r}")
    if target_ranks is not None and len(target_ranks) != layers:
        raise ValueError(
            f"target_ranks has {len(target_ranks)} entries for {layers} layers"
        )
    if max_output_dim is None:
        caps: list[int | None] = [None] * layers
    elif isinstance(max_output_dim, int):
        caps = [max_output_dim] * layers
    else:
        caps = list(max_output_dim)
        if len(caps) != layers:
            raise ValueError(
                f"{len(caps)} output-dim caps for {layers} layers"
            )
    order = tt.order
    total_isometries = 0
    for _ in range(layers):
        _check_layer_shape(order, arity)
        order //= arity
        total_isometries += order
    delta = epsilon * tt_norm(tt) / math.sqrt(total_isometries)
    current = tt
    built_layers: list[MeraLayer] = []
    discarded: list[float] = []
    for ell in range(layers):
        layer, current, layer_discarded = _build_layer(
            current,
            arity,
            delta,
            strategy,
            target_ranks[ell] if target_ranks is not None else None,
            gap_threshold,
            max_iters,
            caps[ell],
        )
        built_layers.append(layer)
        discarded.extend(layer_discarded)
    top = tt_contract(current)
    return Mera(layers=tuple(built_layers), top=top), discarded


def _build_layer(
    tt: TensorTrain,
    arity: int,
    delta: float,
    strategy: str,
    ranks_goal: list[int] | None,
    gap_threshold: float,
    max_iters: int,
    output_cap: int | None,
) -> tuple[MeraLayer, TensorTrain, list[float]]:
    order = tt.order
    dims = tt.dims
    dis_pos = disentangler_positions(order, arity)
    if ranks_goal is not None and len(ranks_goal) != len(dis_pos):
        raise ValueError(
            f"{len(ranks_goal)} target ranks for {len(dis_pos)} disentanglers"
        )

    # Fuse each boundary pair.  Merging removes one core per pair, so after
    # the pairs left of it are fused, the k-th pair sits at position p - k.
    merged = tt
    for k, p in enumerate(dis_pos):
        merged = merge_cores(merged, p - k)

    disentanglers: list[tuple[int, Disentangler]] = []
    for k, p in enumerate(dis_pos):
        site = p - k
        merged = orthogonalize(merged, site)
        pair = (dims[p - 1], dims[p])
        if strategy == "hosvd":
            dis, transformed = _hosvd_disentangler(merged.core(site), pair)
        else:
            supercore = DenseTensor(merged.core(site))
            goal = ranks_goal[k] if ranks_goal is not None else None
            if goal is None:
                goal = max(1, svd_trunc(_supercore_mat(supercore, pair), delta).rank)
                log.info(
                    "disentangler at pair (%d,%d): auto target rank %d", p, p + 1, goal
                )
            dis, transformed, report = find_disentangler(
                supercore,
                pair,
                goal,
                gap_threshold=gap_threshold,
                max_iters=max_iters,
            )
            if not report.converged:
                log.warning(
                    "disentangler at pair (%d,%d) did not converge: gap %.3e "
                    "after %d iterations",
                    p, p + 1, report.final_gap, report.iterations,
                )
        disentanglers.append((p, dis))
        cores = list(merged.cores)
        cores[site - 1] = transformed.to_array()
        merged = TensorTrain(cores)

    # Split the fused pairs apart again.  Each split grows the train by
    # one core, which restores original positions for the pairs to come.
    for p in dis_pos:
        merged, _ = split_core(merged, p, dims[p - 1], dims[p], delta=0.0)

    # Fuse the isometry groups and extract the truncated factors.
    iso_pos = isometry_positions(order, arity)
    grouped = merged
    for g in range(len(iso_pos)):
        for _ in range(arity - 1):
            grouped = merge_cores(grouped, g + 1)
    max_ranks = None if output_cap is None else [output_cap] * len(iso_pos)
    factors, next_tt, group_discarded = tucker_sweep(grouped, delta, max_ranks)
    isometries = []
    for j, p in enumerate(iso_pos):
        group_dims = tuple(dims[p - 1 : p - 1 + arity])
        isometries.append(
            (p, Isometry(input_dims=group_dims, output_dim=factors[j].shape[1],
                         data=factors[j]))
        )
    layer = MeraLayer(
        input_arity=order,
        isometries=tuple(isometries),
        disentanglers=tuple(disentanglers),
    )
    return layer, next_tt, list(group_discarded)


def _hosvd_disentangler(
    core: np.ndarray, pair: tuple[int, int]
) -> tuple[Disentangler, DenseTensor]:
    """Square orthogonal factor of the supercore's free unfolding.

    A full SVD of the ``(I_l I_r) x (R_l R_r)`` center gives an orthogonal
    basis ``U``; ``U.T`` applied to the fused free index concentrates the
    pair's energy in the leading rows without discarding anything.
    """
    r, n, s = core.shape
    center = np.reshape(core.transpose(1, 0, 2), (n, r * s), order="F")
    U, _, _ = svd_full(center)
    transformed = np.reshape(U.T @ center, (n, r, s), order="F").transpose(1, 0, 2)
    return Disentangler(dims=pair, data=U.T.copy()), DenseTensor(transformed)


# ---------------------------------------------------------------------------
# MERA -> train


def mera_to_tt(m: Mera, round_eps: float = 1e-14) -> TensorTrain:
    """Evaluate a MERA back into a train without densifying.

    Walks top-down: the top tensor starts as an exact train; each layer's
    isometries expand one core per outgoing index, which is split back into
    the incoming indices, and each disentangler's transpose is applied to
    its fused pair.  Splits keep every numerically nonzero singular value;
    one rounding pass at ``round_eps`` per layer clears the noise ranks
    that exact splits accumulate.
    """
    if round_eps < 0:
        raise ValueError(f"round_eps must be non-negative, got {round_eps}")
    current = tt_svd(m.top, 0.0)
    for layer in reversed(m.layers):
        isometries = sorted(layer.isometries)
        if current.order != len(isometries):
            raise ValueError(
                f"train of order {current.order} cannot feed "
                f"{len(isometries)} isometries"
            )
        current = orthogonalize(current, 1)
        cores = [
            np.einsum("rks,mk->rms", core, iso.data, optimize=True)
            for core, (_, iso) in zip(current.cores, isometries)
        ]
        current = TensorTrain(cores)
        # Unfuse each expanded core into its arity-many incoming indices.
        offset = 0
        for _, iso in isometries:
            group = iso.input_dims
            for k in range(len(group) - 1):
                tail = math.prod(group[k + 1 :])
                current, _ = split_core(
                    current, offset + 1 + k, group[k], tail, delta=0.0
                )
            offset += len(group)
        for pos, dis in sorted(layer.disentanglers):
            current = _apply_disentangler(current, pos, dis, forward=False)
        if layer.disentanglers:
            current = tt_round(current, round_eps)
    return current


def _apply_disentangler(
    tt: TensorTrain, pos: int, dis: Disentangler, forward: bool
) -> TensorTrain:
    """Multiply the fused free pair ``(pos, pos+1)`` by the disentangler
    (or its transpose for the expanding direction), then split exactly."""
    il, ir = dis.dims
    if tt.dims[pos - 1] != il or tt.dims[pos] != ir:
        raise ValueError(
            f"disentangler {dis.dims} does not fit pair "
            f"({tt.dims[pos - 1]}, {tt.dims[pos]}) at position {pos}"
        )
    merged = merge_cores(tt, pos)
    core = merged.core(pos)
    r, n, s = core.shape
    center = np.reshape(core.transpose(1, 0, 2), (n, r * s), order="F")
    mix = dis.data if forward else dis.data.T
    transformed = np.reshape(mix @ center, (n, r, s), order="F").transpose(1, 0, 2)
    cores = list(merged.cores)
    cores[pos - 1] = transformed
    merged = TensorTrain(cores)
    out, _ = split_core(merged, pos, il, ir, delta=0.0)
    return out


# ---------------------------------------------------------------------------
# bookkeeping


def mera_storage(m: Mera) -> int:
    """Stored entries across disentanglers, isometries, and the top."""
    count = m.top.size
    for layer in m.layers:
        for _, dis in layer.disentanglers:
            count += dis.data.size
        for _, iso in layer.isometries:
            count += iso.data.size
    return count


def mera_relative_error(m: Mera, reference: TensorTrain) -> float:
    """``|reference - mera|_F / |reference|_F`` in train arithmetic.

    The MERA is evaluated as a train; the difference is formed by core-wise
    block concatenation and its norm taken through orthogonalization, so
    nothing is densified.  Small problems fall back to a dense subtraction.
    """
    rec = mera_to_tt(m)
    if rec.dims != reference.dims:
        raise ValueError(
            f"dimension mismatch: MERA evaluates to {rec.dims}, "
            f"reference is {reference.dims}"
        )
    ref_norm = tt_norm(reference)
    if ref_norm == 0.0:
        raise ValueError("reference tensor has zero norm")
    if math.prod(reference.dims) <= 10**6:
        diff = tt_contract(reference).to_array() - tt_contract(rec).to_array()
        return float(np.linalg.norm(diff.ravel())) / ref_norm
    return _tt_diff_norm(reference, rec) / ref_norm


def _tt_diff_norm(a: TensorTrain, b: TensorTrain) -> float:
    """Frobenius norm of ``a - b`` through block-concatenated cores."""
    if a.dims != b.dims:
        raise ValueError(f"dimension mismatch: {a.dims} vs {b.dims}")
    if a.order == 1:
        return float(np.linalg.norm(a.cores[0].ravel() - b.cores[0].ravel()))
    cores = []
    D = a.order
    for d in range(D):
        ca = a.cores[d]
        cb = -b.cores[d] if d == 0 else b.cores[d]
        ra, n, sa = ca.shape
        rb, _, sb = cb.shape
        if d == 0:
            cores.append(np.concatenate([ca, cb], axis=2))
        elif d == D - 1:
            cores.append(np.concatenate([ca, cb], axis=0))
        else:
            block = np.zeros((ra + rb, n, sa + sb))
            block[:ra, :, :sa] = ca
            block[ra:, :, sa:] = cb
            cores.append(block)
    return tt_norm(TensorTrain(cores))
