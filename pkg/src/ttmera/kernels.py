"""Dense matrix factorizations with a deterministic sign convention.

Singular vectors and Q columns are only defined up to sign, which would make
downstream decompositions run-to-run unstable.  Convention used everywhere:
in each left singular vector (or Q column) the entry of largest magnitude is
made non-negative, ties resolved toward the lowest row index, and the
compensating sign is pushed into the right factor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericError

__all__ = ["TruncatedSvd", "svd_trunc", "svd_full", "qr_thin", "procrustes_solve"]


def _require_matrix(M: np.ndarray, name: str) -> np.ndarray:
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2:
        raise ValueError(f"{name} must be a matrix, got {M.ndim} axes")
    if M.size == 0:
        raise ValueError(f"{name} must be non-empty")
    if not np.all(np.isfinite(M)):
        raise NumericError(f"{name} contains non-finite entries")
    return M


def _fix_signs(U: np.ndarray, W: np.ndarray) -> None:
    """Flip columns of ``U`` (rows of ``W``) so the largest-magnitude entry
    of each ``U`` column is non-negative.  In place."""
    for j in range(U.shape[1]):
        i = int(np.argmax(np.abs(U[:, j])))
        if U[i, j] < 0.0:
            U[:, j] = -U[:, j]
            W[j, :] = -W[j, :]


@dataclass(frozen=True)
class TruncatedSvd:
    """Rank-``r`` factorization ``M ~ U @ diag(sigma) @ V.T``.

    ``discarded_energy`` is the sum of squared singular values dropped by the
    truncation, so ``|M - U diag(sigma) V.T|_F^2 == discarded_energy``.
    """

    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray
    discarded_energy: float

    @property
    def rank(self) -> int:
        return self.sigma.size


# Very wide or tall matrices at loose tolerances go through a Gram-matrix
# eigendecomposition instead of a direct SVD: far less memory traffic and
# arithmetic when min(m, n) is small.  Squaring halves the usable precision,
# so the path is gated on the tolerance being far above the noise floor and
# bails out whenever a kept direction would be unreliable.
_GRAM_MIN_ENTRIES = 1 << 22
_GRAM_DELTA_FLOOR = 1e-7


def svd_trunc(M: np.ndarray, delta: float, want_v: bool = True) -> TruncatedSvd:
    """Truncated SVD keeping the smallest rank whose discarded tail satisfies
    ``sqrt(sum of squared dropped singular values) <= delta``.

    ``delta=0`` keeps every numerically nonzero singular value, using the
    threshold ``max(m, n) * machine_eps * sigma_1``.

    ``want_v=False`` returns an empty ``V``; for very wide inputs this skips
    materializing a right factor as large as ``M`` itself, so callers that
    only consume ``U`` should pass it.
    """
    M = _require_matrix(M, "M")
    if delta < 0:
        raise ValueError(f"delta must be non-negative, got {delta}")
    if M.size >= _GRAM_MIN_ENTRIES and delta > _GRAM_DELTA_FLOOR * np.linalg.norm(M):
        result = _svd_trunc_gram(M, delta, want_v)
        if result is not None:
            return result
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    tails = np.concatenate([np.cumsum(s[::-1] ** 2)[::-1], [0.0]])
    if delta == 0.0:
        thresh = max(M.shape) * np.finfo(np.float64).eps * (s[0] if s.size else 0.0)
        r = int(np.count_nonzero(s > thresh))
    else:
        r = int(np.argmax(tails <= delta * delta))
    Ur = U[:, :r].copy()
    Vtr = Vt[:r] if want_v else np.zeros((r, 0))
    _fix_signs(Ur, Vtr)
    V = Vtr.T.copy() if want_v else np.zeros((M.shape[1], 0))
    return TruncatedSvd(
        U=Ur, sigma=s[:r].copy(), V=V, discarded_energy=float(tails[r])
    )


def _svd_trunc_gram(
    M: np.ndarray, delta: float, want_v: bool = True
) -> TruncatedSvd | None:
    """Gram-matrix route for :func:`svd_trunc`; ``None`` means fall back.

    Eigenvalues of ``M M^T`` (or ``M^T M``, whichever is smaller) give the
    squared singular values; the other side's vectors are recovered by one
    projection pass over ``M``.  Rank selection shaves an eigenvalue-noise
    margin off ``delta^2`` so the discarded tail never exceeds the budget.
    """
    m, n = M.shape
    rows_small = m <= n
    G = M @ M.T if rows_small else M.T @ M
    lam, P = np.linalg.eigh(G)
    if not np.all(np.isfinite(lam)):
        raise NumericError("Gram eigenvalues became non-finite")
    lam = np.clip(lam[::-1], 0.0, None)
    P = P[:, ::-1]
    s = np.sqrt(lam)
    tails = np.concatenate([np.cumsum(lam[::-1])[::-1], [0.0]])
    noise = lam.size * np.finfo(np.float64).eps * (lam[0] if lam.size else 0.0)
    budget = delta * delta - noise
    if budget <= 0.0:
        return None
    r = int(np.argmax(tails <= budget))
    if r > 0 and lam[r - 1] < np.sqrt(np.finfo(np.float64).eps) * lam[0]:
        # The smallest kept direction is too close to the squared-precision
        # noise floor to trust; use the exact path instead.
        return None
    if rows_small:
        U = np.ascontiguousarray(P[:, :r])
        if want_v and r:
            # One projection pass; scale in place and hand out the
            # transposed view so the wide right factor is never duplicated.
            Vt = U.T @ M
            _fix_signs(U, Vt)
            Vt /= s[:r, None]
            V = Vt.T
        else:
            _fix_signs(U, np.zeros((r, 0)))
            V = np.zeros((n, 0))
    else:
        V = P[:, :r]
        U = np.ascontiguousarray(M @ V / s[:r][None, :]) if r else np.zeros((m, 0))
        W = np.ascontiguousarray(V.T)
        _fix_signs(U, W)
        V = W.T if want_v else np.zeros((n, 0))
    return TruncatedSvd(
        U=U, sigma=s[:r].copy(), V=V, discarded_energy=float(tails[r]),
    )


def svd_full(M: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Full SVD ``M = U diag(s) Vt`` with square orthogonal ``U`` and ``Vt``
    and the package sign convention applied to ``U``'s columns.

    Sign flips beyond ``min(m, n)`` columns have no right factor to
    compensate into; they are legitimate because those columns multiply
    zero singular values.
    """
    M = _require_matrix(M, "M")
    U, s, Vt = np.linalg.svd(M, full_matrices=True)
    U = np.ascontiguousarray(U)
    extra = max(0, U.shape[1] - Vt.shape[0])
    W = np.vstack([Vt, np.zeros((extra, Vt.shape[1]))]) if extra else Vt.copy()
    _fix_signs(U, W)
    return U, s, W[: Vt.shape[0]]


def qr_thin(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Thin QR with the package sign convention applied to Q's columns."""
    M = _require_matrix(M, "M")
    Q, R = np.linalg.qr(M)
    Q = np.ascontiguousarray(Q)
    _fix_signs(Q, R)
    return Q, R


def procrustes_solve(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Orthogonal matrix minimizing ``|V @ A - B|_F``.

    Solution ``V = P @ Q.T`` where ``B @ A.T = P diag(s) Q.T`` is a full SVD.
    Zero singular values keep the factors LAPACK produced, so the result is
    deterministic for a given input.
    """
    A = _require_matrix(A, "A")
    B = _require_matrix(B, "B")
    if A.shape != B.shape:
        raise ValueError(f"shape mismatch: A is {A.shape}, B is {B.shape}")
    P, _, Qt = np.linalg.svd(B @ A.T, full_matrices=True)
    P = np.ascontiguousarray(P)
    Qt = np.ascontiguousarray(Qt)
    _fix_signs(P, Qt)
    return P @ Qt
