"""Reproducible experiment drivers.

Each ``run_*`` function is the engine behind one CLI subcommand.  They are
deterministic given a seed (and a thread count of one for the scans): every
random constituent draws from its own named substream, so results do not
depend on evaluation order.  Wall-clock timings are reported but are the
only nondeterministic outputs.

Artifacts are written into an output directory when one is given: binary
tensors, PGM images, CSV tables with a header row, and JSON reports.
"""

from __future__ import annotations

import json
import math
import statistics
import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .dense import DenseTensor
from .errors import ConfigError
from .formats import load_pgm, save_mera, save_pgm, save_tensor, write_csv
from .heat import HeatConfig, reshape_to_factors, solve_heat
from .mera import (
    Disentangler,
    DisentanglerReport,
    Isometry,
    Mera,
    MeraLayer,
    _hosvd_disentangler,
    disentangler_positions,
    find_disentangler,
    isometry_positions,
    mera_relative_error,
    mera_storage,
    mera_to_tt,
    tt_to_mera,
)
from .rng import random_isometry, random_orthogonal, standard_normal, stream
from .train import (
    TensorTrain,
    merge_cores,
    orthogonalize,
    tt_dense_inner,
    tt_norm,
    tt_storage,
    tt_svd,
)
from .tucker import (
    compression_ratio,
    sthosvd_dense,
    tt_to_hosvd,
    tucker_reconstruct_tt,
)

__all__ = [
    "CompressionReport",
    "PAPER_HEAT",
    "DESK_HEAT",
    "run_heat2d",
    "run_compress",
    "run_planted",
    "run_rmin_scan",
    "run_iters_vs_rank",
    "run_mera12",
    "random_mera_plant",
    "planted_pair_tensor",
]

PAPER_HEAT = HeatConfig(ds=1e-2, dt=0.25e-4, t_end=0.25)
DESK_HEAT = HeatConfig(ds=2e-2, dt=None, t_end=0.25)

COMPRESS_METHODS = ("sthosvd", "tt", "tt-tucker")


@dataclass(frozen=True)
class CompressionReport:
    """One row of a compression comparison.

    ``elapsed_seconds`` covers building the decomposition only, not the
    error measurement.  ``ranks`` holds multilinear ranks for Tucker-style
    methods, internal train ranks for ``tt``, and isometry output sizes for
    ``mera``.  ``detail`` carries method-specific extras (stage timings,
    strategy names).
    """

    method: str
    elapsed_seconds: float
    relative_error: float
    storage_count: int
    compression_ratio: float
    ranks: tuple[int, ...]
    detail: dict | None = None

    def as_dict(self) -> dict:
        out = {
            "method": self.method,
            "elapsed_seconds": self.elapsed_seconds,
            "relative_error": self.relative_error,
            "storage_count": self.storage_count,
            "compression_ratio": self.compression_ratio,
            "ranks": list(self.ranks),
        }
        if self.detail is not None:
            out.update(self.detail)
        return out


def _out_dir(out_dir: str | Path | None) -> Path | None:
    if out_dir is None:
        return None
    p = Path(out_dir)
    p.mkdir(parents=True, exist_ok=True)
    return p


# ---------------------------------------------------------------------------
# heat-equation data generation


def run_heat2d(cfg: HeatConfig, out_path: str | Path) -> Path:
    """Solve the heat equation and write the snapshot tensor.

    A sibling ``<name>.json`` records the discretisation next to the
    binary tensor file.
    """
    out_path = Path(out_path)
    t = solve_heat(cfg)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    save_tensor(out_path, t)
    meta = {
        "dims": list(t.dims),
        "ds": cfg.ds,
        "dt": cfg.time_step,
        "t_end": cfg.t_end,
        "nodes": cfg.nodes,
        "steps": cfg.steps,
    }
    out_path.with_suffix(out_path.suffix + ".json").write_text(
        json.dumps(meta, indent=2) + "\n"
    )
    return out_path


# ---------------------------------------------------------------------------
# compression comparison


def _error_from_slabs(
    t: DenseTensor, slab: np.ndarray, right: np.ndarray, norm: float
) -> float:
    """Relative error of the rank-structured reconstruction
    ``slab @ right`` against a 3-way tensor, one last-mode slice at a time.

    ``slab`` is ``(I_1 I_2, R)``, ``right`` is ``(R, I_3)``; nothing of the
    reconstruction larger than one slice is ever materialised.
    """
    a = t.to_array()
    i1, i2, i3 = t.dims
    err2 = 0.0
    for k in range(i3):
        diff = a[:, :, k].ravel(order="F") - slab @ right[:, k]
        err2 += float(diff @ diff)
    return math.sqrt(err2) / norm


def _tt_slab(tt: TensorTrain) -> tuple[np.ndarray, np.ndarray]:
    """Split a 3-core train into ``(I_1 I_2, R_3)`` and ``(R_3, I_3)``."""
    g1, g2, g3 = tt.cores
    slab = np.tensordot(g1[0], g2, axes=([1], [0]))
    i1, i2, r3 = slab.shape
    return np.reshape(slab, (i1 * i2, r3), order="F"), g3[:, :, 0]


def _tt_relative_error(tt: TensorTrain, t: DenseTensor, norm: float) -> float:
    """Relative error of a train against a dense tensor.

    3-way inputs get the exact slice-streamed subtraction; otherwise the
    expansion ``|t - tt|^2 = |t|^2 - 2 <t, tt> + |tt|^2`` is used, which
    never materialises the train.
    """
    if t.order == 3:
        slab, right = _tt_slab(tt)
        return _error_from_slabs(t, slab, right, norm)
    inner = tt_dense_inner(tt, t)
    tnorm = tt_norm(tt)
    err2 = max(norm * norm - 2.0 * inner + tnorm * tnorm, 0.0)
    return math.sqrt(err2) / norm


def _compress_sthosvd(t: DenseTensor, epsilon: float, norm: float):
    start = time.perf_counter()
    factors, core, _ = sthosvd_dense(t, epsilon)
    elapsed = time.perf_counter() - start
    storage = core.size + sum(f.size for f in factors)
    if t.order == 3:
        small = np.einsum(
            "abc,ia,jb->ijc", core.to_array(), factors[0], factors[1],
            optimize=True,
        )
        s3 = core.dims[2]
        slab = np.reshape(small, (-1, s3), order="F")
        err = _error_from_slabs(t, slab, factors[2].T, norm)
    else:
        # Each step is an orthogonal projection, so the squared error is
        # exactly the energy the core lost.
        err2 = max(norm * norm - core.norm() ** 2, 0.0)
        err = math.sqrt(err2) / norm
    return CompressionReport(
        method="sthosvd",
        elapsed_seconds=elapsed,
        relative_error=err,
        storage_count=int(storage),
        compression_ratio=compression_ratio(t.size, int(storage)),
        ranks=tuple(core.dims),
    )


def _compress_tt(t: DenseTensor, epsilon: float, norm: float):
    start = time.perf_counter()
    tt = tt_svd(t, epsilon)
    elapsed = time.perf_counter() - start
    storage = tt_storage(tt)
    err = _tt_relative_error(tt, t, norm)
    return CompressionReport(
        method="tt",
        elapsed_seconds=elapsed,
        relative_error=err,
        storage_count=int(storage),
        compression_ratio=compression_ratio(t.size, int(storage)),
        ranks=tuple(tt.ranks[1:-1]),
    )


def _compress_tt_tucker(t: DenseTensor, epsilon: float, norm: float):
    # The two stages split the budget so the combined error stays within
    # epsilon: each gets epsilon / sqrt(2) and the stage errors add almost
    # orthogonally.
    stage_eps = epsilon / math.sqrt(2.0)
    start = time.perf_counter()
    tt = tt_svd(t, stage_eps)
    t_build = time.perf_counter() - start
    start = time.perf_counter()
    tuck = tt_to_hosvd(tt, stage_eps)
    t_convert = time.perf_counter() - start
    err = _tt_relative_error(tucker_reconstruct_tt(tuck), t, norm)
    return CompressionReport(
        method="tt-tucker",
        elapsed_seconds=t_build + t_convert,
        relative_error=err,
        storage_count=int(tuck.storage_count),
        compression_ratio=compression_ratio(t.size, int(tuck.storage_count)),
        ranks=tuple(tuck.multilinear_rank),
        detail={"tt_svd_seconds": t_build, "conversion_seconds": t_convert},
    )


def run_compress(
    source: DenseTensor | str | Path,
    epsilon: float = 1e-3,
    methods: Sequence[str] = COMPRESS_METHODS,
    factorize: bool = False,
    out_dir: str | Path | None = None,
) -> list[CompressionReport]:
    """Compare decompositions of one tensor at a shared error budget.

    ``source`` is a tensor or the path of a tensor file.  ``factorize``
    first splits every dimension into its prime factors, turning the
    3-way heat tensor into a 16-way one.  Per method the decomposition is
    built at ``epsilon`` and its storage, compression ratio, wall time,
    and measured relative error are reported.
    """
    if not methods:
        raise ConfigError("no compression methods requested")
    for m in methods:
        if m not in COMPRESS_METHODS:
            raise ConfigError(
                f"unknown method {m!r}; choose from {', '.join(COMPRESS_METHODS)}"
            )
    if epsilon <= 0:
        raise ConfigError(f"epsilon must be positive, got {epsilon}")
    if isinstance(source, DenseTensor):
        t = source
    else:
        from .formats import load_tensor

        t = load_tensor(source)
    if factorize:
        t = reshape_to_factors(t)
    norm = t.norm()
    if norm == 0.0:
        raise ConfigError("input tensor has zero norm")
    builders = {
        "sthosvd": _compress_sthosvd,
        "tt": _compress_tt,
        "tt-tucker": _compress_tt_tucker,
    }
    reports = [builders[m](t, epsilon, norm) for m in methods]
    out = _out_dir(out_dir)
    if out is not None:
        write_csv(
            out / "compress.csv",
            ["method", "elapsed_seconds", "relative_error", "storage_count",
             "compression_ratio", "ranks"],
            [
                [r.method, r.elapsed_seconds, r.relative_error,
                 r.storage_count, r.compression_ratio,
                 "|".join(str(x) for x in r.ranks)]
                for r in reports
            ],
        )
        payload = {
            "epsilon": epsilon,
            "factorize": factorize,
            "dims": list(t.dims),
            "original_entries": t.size,
            "reports": [r.as_dict() for r in reports],
        }
        (out / "compress.json").write_text(json.dumps(payload, indent=2) + "\n")
    return reports


# ---------------------------------------------------------------------------
# planted single-layer constructions


def _synthetic_image(seed: int, n: int) -> np.ndarray:
    """Deterministic grayscale stand-in for a photograph.

    Smooth seeded bumps over a gradient, plus a little uniform noise so the
    spectrum keeps a healthy floor (a numerically rank-deficient plant
    would change the experiment).
    """
    gen = stream(seed, 7)
    x = np.linspace(0.0, 1.0, n)
    X, Y = np.meshgrid(x, x, indexing="ij")
    img = 0.25 + 0.3 * X + 0.2 * Y
    for _ in range(6):
        cx, cy = gen.random(2)
        width = 0.08 + 0.25 * gen.random()
        amp = 0.35 * (gen.random() - 0.3)
        img += amp * np.exp(-((X - cx) ** 2 + (Y - cy) ** 2) / (2 * width**2))
    img += 0.02 * gen.random((n, n))
    return _to_unit(img)


def _to_unit(a: np.ndarray) -> np.ndarray:
    lo = float(np.min(a))
    hi = float(np.max(a))
    if hi <= lo:
        return np.zeros_like(a)
    return (a - lo) / (hi - lo)


def _resize_bilinear(a: np.ndarray, rows: int, cols: int) -> np.ndarray:
    r = np.linspace(0.0, a.shape[0] - 1.0, rows)
    c = np.linspace(0.0, a.shape[1] - 1.0, cols)
    i0 = np.floor(r).astype(int)
    j0 = np.floor(c).astype(int)
    i1 = np.minimum(i0 + 1, a.shape[0] - 1)
    j1 = np.minimum(j0 + 1, a.shape[1] - 1)
    fi = (r - i0)[:, None]
    fj = (c - j0)[None, :]
    return (
        a[np.ix_(i0, j0)] * (1 - fi) * (1 - fj)
        + a[np.ix_(i1, j0)] * fi * (1 - fj)
        + a[np.ix_(i0, j1)] * (1 - fi) * fj
        + a[np.ix_(i1, j1)] * fi * fj
    )


def _apply_middle_pair(M: np.ndarray, Q: np.ndarray, side: int) -> np.ndarray:
    """Rotate the fused middle index pair of a square matrix.

    ``M`` is ``(side^2, side^2)`` viewed as a 4-way tensor with two indices
    per axis; ``Q`` acts on the fused pair (axes 2 and 3), and the result
    is reshaped back to the same matrix form.
    """
    t = DenseTensor.from_flat(M.ravel(order="F"), (side,) * 4)
    mid = t.permute([2, 3, 4, 1]).reshape((side * side, side * side))
    rotated = Q @ mid.to_array()
    t2 = DenseTensor.from_flat(rotated.ravel(order="F"), (side,) * 4)
    back = t2.permute([4, 1, 2, 3]).reshape((side * side, side * side))
    return back.to_array()


def planted_pair_tensor(
    I: int, rprime: int, seed: int, top: np.ndarray | None = None
) -> dict:
    """Build the single-layer plant: top matrix, two identical isometries,
    one entangling orthogonal transform.

    Returns the ``(I, I, I, I)`` tensor whose middle-pair rank was raised
    from ``rprime`` to (generically) ``I^2``, alongside the intermediate
    matrices.  The plant is fully determined by ``(I, rprime, seed)`` and
    the optional ``top``.
    """
    if I < 2:
        raise ConfigError(f"index size must be at least 2, got {I}")
    if not 1 <= rprime <= I * I:
        raise ConfigError(f"planted rank {rprime} outside 1..{I * I}")
    if top is None:
        top = standard_normal(stream(seed, 0), (rprime, rprime))
    elif top.shape != (rprime, rprime):
        raise ConfigError(
            f"top matrix must be {rprime}x{rprime}, got {top.shape}"
        )
    W = random_isometry(stream(seed, 1), I * I, rprime)
    V = random_orthogonal(stream(seed, 2), I * I)
    low = W @ top @ W.T
    entangled = _apply_middle_pair(low, V, I)
    tensor = DenseTensor.from_flat(entangled.ravel(order="F"), (I,) * 4)
    return {
        "top": top,
        "isometry": W,
        "entangler": V,
        "low_rank_matrix": low,
        "entangled_matrix": entangled,
        "tensor": tensor,
    }


def _plant_supercore(tensor: DenseTensor) -> tuple[TensorTrain, DenseTensor]:
    """Exact train of the plant and its mixed-canonical middle supercore."""
    tt = tt_svd(tensor, 0.0)
    merged = merge_cores(orthogonalize(tt, 2), 2)
    return tt, DenseTensor(merged.core(2))


def run_planted(
    I: int = 8,
    rprime: int = 32,
    seed: int = 0,
    image: str | Path | None = None,
    gap_threshold: float = 1e12,
    max_iters: int = 50_000,
    trace_stride: int = 50,
    out_dir: str | Path | None = None,
) -> dict:
    """Recover a planted rank-lowering disentangler and compare it with the
    single-SVD rotation of the supercore's free unfolding.

    The plant applies two identical random isometries to a top matrix
    (``rprime`` square; a supplied image, or a seeded random matrix) and
    then entangles the middle index pair with a random orthogonal matrix.
    Emits singular-value decay tables for the original, SVD-rotated, and
    iteratively disentangled supercore, plus image renderings of each
    matrix stage.
    """
    if image is not None:
        top = _resize_bilinear(load_pgm(image), rprime, rprime)
    else:
        top = None
    plant = planted_pair_tensor(I, rprime, seed, top=top)
    tt, supercore = _plant_supercore(plant["tensor"])

    mat = np.reshape(
        supercore.to_array(), (supercore.dims[0] * I, I * supercore.dims[2]),
        order="F",
    )
    original_sigma = np.linalg.svd(mat, compute_uv=False)

    _, hosvd_transformed = _hosvd_disentangler(supercore.to_array(), (I, I))
    hosvd_mat = np.reshape(
        hosvd_transformed.to_array(), mat.shape, order="F"
    )
    hosvd_sigma = np.linalg.svd(hosvd_mat, compute_uv=False)

    start = time.perf_counter()
    dis, transformed, report = find_disentangler(
        supercore,
        (I, I),
        rprime,
        gap_threshold=gap_threshold,
        max_iters=max_iters,
        trace_stride=trace_stride,
    )
    elapsed = time.perf_counter() - start
    found_mat = np.reshape(transformed.to_array(), mat.shape, order="F")
    found_sigma = np.linalg.svd(found_mat, compute_uv=False)

    result = {
        "I": I,
        "rprime": rprime,
        "seed": seed,
        "tt_ranks": tuple(tt.ranks),
        "report": report,
        "elapsed_seconds": elapsed,
        "original_sigma": original_sigma,
        "hosvd_sigma": hosvd_sigma,
        "found_sigma": found_sigma,
        "disentangler": dis,
    }
    out = _out_dir(out_dir)
    if out is not None:
        save_pgm(out / "top.pgm", _to_unit(plant["top"]))
        save_pgm(out / "low_rank.pgm", _to_unit(plant["low_rank_matrix"]))
        save_pgm(out / "entangled.pgm", _to_unit(plant["entangled_matrix"]))
        recovered = _apply_middle_pair(
            plant["entangled_matrix"], dis.data, I
        )
        save_pgm(out / "disentangled.pgm", _to_unit(recovered))
        write_csv(
            out / "sigma_decay.csv",
            ["index", "original", "svd_rotation", "iterative"],
            [
                [k + 1, float(original_sigma[k]), float(hosvd_sigma[k]),
                 float(found_sigma[k])]
                for k in range(len(original_sigma))
            ],
        )
        if report.singular_value_trace:
            write_csv(
                out / "sigma_trace.csv",
                ["iteration", "index", "sigma"],
                [
                    [it, k + 1, float(v)]
                    for it, sig in report.singular_value_trace
                    for k, v in enumerate(sig)
                ],
            )
        (out / "report.json").write_text(
            json.dumps(
                {
                    "I": I,
                    "rprime": rprime,
                    "seed": seed,
                    "tt_ranks": list(tt.ranks),
                    "target_rank": report.target_rank,
                    "iterations": report.iterations,
                    "final_gap": report.final_gap,
                    "achieved_rank": report.achieved_rank,
                    "converged": report.converged,
                    "elapsed_seconds": elapsed,
                },
                indent=2,
            )
            + "\n"
        )
    return result


# ---------------------------------------------------------------------------
# convergence scans


def _scan_point(
    I: int, rprime: int, seed: int, gap_threshold: float, max_iters: int
) -> DisentanglerReport:
    """One plant-and-search trial; used by both scans."""
    plant = planted_pair_tensor(I, rprime, seed)
    _, supercore = _plant_supercore(plant["tensor"])
    _, _, report = find_disentangler(
        supercore,
        (I, I),
        rprime,
        gap_threshold=gap_threshold,
        max_iters=max_iters,
    )
    return report


def _rmin_for_seed(
    I: int, seed: int, gap_threshold: float, max_iters: int
) -> int:
    # Isolated convergence below the boundary exists (rank 1 always
    # converges, occasional small ranks do too), so the table value is the
    # start of the contiguous convergent range ending at full rank.
    # Scanning downward finds it with a single exhausted-budget run.
    boundary = I * I
    for rprime in range(I * I - 1, 1, -1):
        if _scan_point(I, rprime, seed, gap_threshold, max_iters).converged:
            boundary = rprime
        else:
            break
    return boundary


def run_rmin_scan(
    I_values: Sequence[int] = (2, 3, 4, 5),
    gap_threshold: float = 1e12,
    max_iters: int = 50_000,
    seed: int = 0,
    seeds: int = 3,
    threads: int = 1,
    out_dir: str | Path | None = None,
) -> list[dict]:
    """Smallest target rank with stable convergence, per index size.

    For each ``I`` the scan walks target ranks downward from ``I^2`` while
    the search keeps reaching the gap threshold within budget; the boundary
    is where the contiguous convergent range starts.  Rank 1 is excluded as
    trivial (it always converges), and isolated convergent ranks below the
    boundary do not move it.  The scan repeats for ``seeds`` plants and
    reports the majority value; ties resolve to the smaller rank.
    """
    if any(I < 2 for I in I_values):
        raise ConfigError("index sizes must be at least 2")
    if seeds < 1:
        raise ConfigError(f"need at least one seed, got {seeds}")
    if threads < 1:
        raise ConfigError(f"need at least one thread, got {threads}")
    work = [(I, s) for I in I_values for s in range(seeds)]

    def job(point):
        I, s = point
        return _rmin_for_seed(I, seed + s, gap_threshold, max_iters)

    if threads == 1:
        votes = [job(p) for p in work]
    else:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            votes = list(ex.map(job, work))
    by_I: dict[int, list[int]] = {I: [] for I in I_values}
    for (I, _), v in zip(work, votes):
        by_I[I].append(v)
    rows = []
    for I in I_values:
        counts = Counter(by_I[I])
        best = max(counts.values())
        majority = min(v for v, c in counts.items() if c == best)
        rows.append({"I": I, "rmin": majority, "votes": tuple(by_I[I])})
    out = _out_dir(out_dir)
    if out is not None:
        write_csv(
            out / "rmin.csv",
            ["I", "rmin", "votes"],
            [[r["I"], r["rmin"], "|".join(str(v) for v in r["votes"])]
             for r in rows],
        )
    return rows


def run_iters_vs_rank(
    I: int = 4,
    rprimes: Sequence[int] | None = None,
    gap_threshold: float = 1e12,
    max_iters: int = 50_000,
    seed: int = 0,
    seeds: int = 1,
    threads: int = 1,
    out_dir: str | Path | None = None,
) -> list[dict]:
    """Iteration counts of the disentangler search as the target rank
    varies at fixed index size.

    Each target rank gets a fresh plant per seed; the reported iteration
    count is the median over seeds, and ``converged`` is true only if all
    seeds converged.  Counts grow steeply as the target rank approaches
    the smallest convergent value from above.
    """
    if I < 2:
        raise ConfigError(f"index size must be at least 2, got {I}")
    if rprimes is None:
        rprimes = list(range(2, I * I + 1))
    if any(not 1 <= r <= I * I for r in rprimes):
        raise ConfigError(f"target ranks must lie in 1..{I * I}")
    if threads < 1:
        raise ConfigError(f"need at least one thread, got {threads}")
    work = [(r, s) for r in rprimes for s in range(seeds)]

    def job(point):
        r, s = point
        return _scan_point(I, r, seed + s, gap_threshold, max_iters)

    if threads == 1:
        reports = [job(p) for p in work]
    else:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            reports = list(ex.map(job, work))
    grouped: dict[int, list[DisentanglerReport]] = {r: [] for r in rprimes}
    for (r, _), rep in zip(work, reports):
        grouped[r].append(rep)
    rows = []
    for r in rprimes:
        its = [rep.iterations for rep in grouped[r]]
        rows.append(
            {
                "rprime": r,
                "iterations": statistics.median(its),
                "converged": all(rep.converged for rep in grouped[r]),
            }
        )
    out = _out_dir(out_dir)
    if out is not None:
        write_csv(
            out / "iterations.csv",
            ["rprime", "iterations", "converged"],
            [[r["rprime"], r["iterations"], r["converged"]] for r in rows],
        )
    return rows


# ---------------------------------------------------------------------------
# deep plant and recovery


def random_mera_plant(
    I: int,
    S: int,
    arity: int = 2,
    order: int = 12,
    layers: int = 2,
    seed: int = 0,
) -> Mera:
    """Random MERA with orthogonal constituents.

    Layer 1 coarse-grains indices of size ``I``; all further layers work on
    size ``S``.  Isometries and disentanglers come from QR factorizations
    of seeded Gaussian matrices; the top tensor stays plain Gaussian.
    """
    if order < arity**layers:
        raise ConfigError(
            f"{layers} layers of arity {arity} need at least "
            f"{arity**layers} indices, got {order}"
        )
    built = []
    cur_order = order
    for ell in range(1, layers + 1):
        d = I if ell == 1 else S
        if S > d**arity:
            raise ConfigError(
                f"isometry output {S} exceeds fused input {d**arity}"
            )
        dis_pos = disentangler_positions(cur_order, arity)
        iso_pos = isometry_positions(cur_order, arity)
        disentanglers = tuple(
            (p, Disentangler(dims=(d, d),
                             data=random_orthogonal(stream(seed, ell, 0, p),
                                                    d * d)))
            for p in dis_pos
        )
        isometries = tuple(
            (p, Isometry(input_dims=(d,) * arity, output_dim=S,
                         data=random_isometry(stream(seed, ell, 1, p),
                                              d**arity, S)))
            for p in iso_pos
        )
        built.append(
            MeraLayer(input_arity=cur_order, isometries=isometries,
                      disentanglers=disentanglers)
        )
        cur_order //= arity
    top = DenseTensor(
        standard_normal(stream(seed, layers + 1, 0, 0), (S,) * cur_order)
    )
    return Mera(layers=tuple(built), top=top)


def _recovery_targets(m: Mera, round_eps: float) -> list[list[int]]:
    """Per-layer disentangler rank goals taken from the plant.

    The goal for layer ``ell`` is the list of internal train ranks of the
    evaluated stack above it: those are the link ranks that remain once
    that layer's entanglement is removed.
    """
    targets = []
    for ell in range(1, len(m.layers) + 1):
        if ell < len(m.layers):
            above = Mera(layers=m.layers[ell:], top=m.top)
            train = mera_to_tt(above, round_eps=round_eps)
        else:
            train = tt_svd(m.top, 0.0)
        targets.append([int(r) for r in train.ranks[1:-1]])
    return targets


def run_mera12(
    paper_scale: bool = False,
    I: int | None = None,
    S: int | None = None,
    arity: int = 2,
    order: int = 12,
    layers: int = 2,
    seed: int = 0,
    epsilon: float = 1e-11,
    gap_threshold: float = 1e13,
    max_iters: int = 50_000,
    strategies: Sequence[str] = ("hosvd", "procrustes"),
    out_dir: str | Path | None = None,
) -> dict:
    """Plant a deep MERA, expand it into a train, and recover it.

    Reports the storage of both representations, then reruns the
    train-to-MERA conversion with each requested strategy: the pure SVD
    rotation cannot lower the link ranks and loses essentially all energy
    once the isometry output is forced back to the planted size, while
    the iterative search recovers the plant to within the tolerance.
    Rank goals for the iterative search come from the plant.
    """
    I = I if I is not None else (10 if paper_scale else 4)
    S = S if S is not None else (5 if paper_scale else 2)
    for name, v in (("I", I), ("S", S), ("arity", arity), ("order", order),
                    ("layers", layers)):
        if v < 2 and name != "layers":
            raise ConfigError(f"{name} must be at least 2, got {v}")
    if layers < 1:
        raise ConfigError(f"need at least one layer, got {layers}")
    for strat in strategies:
        if strat not in ("hosvd", "procrustes"):
            raise ConfigError(f"unknown strategy {strat!r}")
    round_eps = 1e-12 if paper_scale else 1e-14
    plant = random_mera_plant(I, S, arity, order, layers, seed)
    total = math.prod(plant.input_dims)
    mera_store = mera_storage(plant)

    start = time.perf_counter()
    tt = mera_to_tt(plant, round_eps=round_eps)
    expand_seconds = time.perf_counter() - start
    tt_store = tt_storage(tt)

    reports = [
        CompressionReport(
            method="tt",
            elapsed_seconds=expand_seconds,
            relative_error=0.0,
            storage_count=int(tt_store),
            compression_ratio=compression_ratio(total, int(tt_store)),
            ranks=tuple(tt.ranks[1:-1]),
        ),
        CompressionReport(
            method="mera",
            elapsed_seconds=0.0,
            relative_error=0.0,
            storage_count=int(mera_store),
            compression_ratio=compression_ratio(total, int(mera_store)),
            ranks=tuple(
                iso.output_dim
                for layer in plant.layers
                for _, iso in sorted(layer.isometries, key=lambda t: t[0])
            ),
            detail={"strategy": "plant"},
        ),
    ]

    targets = _recovery_targets(plant, round_eps)
    recovered: dict[str, Mera] = {}
    for strat in strategies:
        start = time.perf_counter()
        if strat == "procrustes":
            m2, _ = tt_to_mera(
                tt,
                arity,
                epsilon,
                layers=layers,
                strategy="procrustes",
                target_ranks=targets,
                gap_threshold=gap_threshold,
                max_iters=max_iters,
            )
        else:
            m2, _ = tt_to_mera(
                tt, arity, epsilon, layers=layers, strategy="hosvd",
                max_output_dim=S,
            )
        elapsed = time.perf_counter() - start
        err = mera_relative_error(m2, tt)
        store = mera_storage(m2)
        recovered[strat] = m2
        reports.append(
            CompressionReport(
                method="mera",
                elapsed_seconds=elapsed,
                relative_error=err,
                storage_count=int(store),
                compression_ratio=compression_ratio(total, int(store)),
                ranks=tuple(
                    iso.output_dim
                    for layer in m2.layers
                    for _, iso in sorted(layer.isometries, key=lambda t: t[0])
                ),
                detail={"strategy": strat},
            )
        )

    out = _out_dir(out_dir)
    if out is not None:
        if "procrustes" in recovered:
            save_mera(out / "recovered.mera", recovered["procrustes"])
        write_csv(
            out / "mera12.csv",
            ["method", "strategy", "elapsed_seconds", "relative_error",
             "storage_count", "compression_ratio", "ranks"],
            [
                [r.method,
                 (r.detail or {}).get("strategy", ""),
                 r.elapsed_seconds, r.relative_error, r.storage_count,
                 r.compression_ratio, "|".join(str(x) for x in r.ranks)]
                for r in reports
            ],
        )
        payload = {
            "I": I,
            "S": S,
            "arity": arity,
            "order": order,
            "layers": layers,
            "seed": seed,
            "epsilon": epsilon,
            "gap_threshold": gap_threshold,
            "original_entries": total,
            "tt_ranks": list(tt.ranks),
            "recovery_targets": targets,
            "reports": [r.as_dict() for r in reports],
        }
        (out / "mera12.json").write_text(json.dumps(payload, indent=2) + "\n")
    return {
        "plant": plant,
        "train": tt,
        "reports": reports,
        "targets": targets,
        "recovered": recovered,
    }
