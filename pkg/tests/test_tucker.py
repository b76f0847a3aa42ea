"""Tucker conversion: error accounting, bounds, caps, reconstruction."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import decaying_train, random_dense
from ttmera.tucker import (
    TuckerTT,
    compression_ratio,
    sthosvd_dense,
    tt_to_hosvd,
    tucker_reconstruct_tt,
    tucker_sweep,
)
from ttmera.train import orthogonalize, tt_contract, tt_norm, tt_svd

SEEDS = st.integers(0, 2**32 - 1)


def dense_error_sq(tuck, reference):
    recon = tt_contract(tucker_reconstruct_tt(tuck))
    return float(np.linalg.norm(recon.data - reference.data) ** 2)


class TestHosvdFromTrain:
    @settings(max_examples=40, deadline=None)
    @given(SEEDS, st.sampled_from([1e-1, 1e-3]))
    def test_discarded_energies_are_exact(self, seed, epsilon):
        tt = decaying_train(seed, (4, 3, 4, 3))
        t = tt_contract(tt)
        tuck = tt_to_hosvd(tt, epsilon)
        err2 = dense_error_sq(tuck, t)
        total = float(np.sum(tuck.mode_discarded))
        # guard the denominator: when nothing is discarded both sides are
        # rounding noise and their ratio is meaningless
        denom = max(err2, total, 1e-10 * t.norm() ** 2)
        assert abs(err2 - total) / denom <= 1e-9

    @settings(max_examples=40, deadline=None)
    @given(SEEDS, st.sampled_from([1e-1, 1e-3]))
    def test_error_within_budget(self, seed, epsilon):
        tt = decaying_train(seed, (3, 4, 3, 4))
        t = tt_contract(tt)
        tuck = tt_to_hosvd(tt, epsilon)
        assert dense_error_sq(tuck, t) <= (epsilon * t.norm()) ** 2 * (1 + 1e-9)

    @settings(max_examples=20, deadline=None)
    @given(SEEDS)
    def test_factor_orthonormality_and_shapes(self, seed):
        tt = decaying_train(seed, (4, 3, 5))
        tuck = tt_to_hosvd(tt, 1e-2)
        assert tuck.dims == (4, 3, 5)
        assert tuck.multilinear_rank == tuck.core.dims
        for U, n, s in zip(tuck.factors, tuck.dims, tuck.multilinear_rank):
            assert U.shape == (n, s)
            np.testing.assert_allclose(U.T @ U, np.eye(s), atol=1e-12)
        assert tuck.storage_count == sum(U.size for U in tuck.factors) + sum(
            c.size for c in tuck.core.cores
        )

    def test_lossless_at_zero_epsilon(self):
        tt = decaying_train(7, (3, 4, 3))
        t = tt_contract(tt)
        tuck = tt_to_hosvd(tt, 0.0)
        assert dense_error_sq(tuck, t) <= 1e-22 * t.norm() ** 2

    def test_epsilon_validated(self):
        with pytest.raises(ValueError):
            tt_to_hosvd(decaying_train(0, (2, 2)), -1.0)

    def test_factor_count_validated(self):
        tt = decaying_train(0, (2, 2, 2))
        with pytest.raises(ValueError, match="factors"):
            TuckerTT(factors=[np.eye(2)], core=tt)


class TestRankCaps:
    def test_caps_bound_ranks_and_keep_accounting_exact(self):
        tt = decaying_train(11, (5, 4, 5), max_rank=8)
        t = tt_contract(tt)
        ortho = orthogonalize(tt, 1)
        caps = [2, 3, 2]
        factors, core, discarded = tucker_sweep(ortho, 0.0, max_ranks=caps)
        assert all(s <= cap for s, cap in zip(core.dims, caps))
        tuck = TuckerTT(factors=factors, core=core, mode_discarded=discarded)
        err2 = dense_error_sq(tuck, t)
        total = float(np.sum(discarded))
        assert total > 0.0
        assert abs(err2 - total) / max(err2, total) <= 1e-9

    def test_cap_length_validated(self):
        tt = orthogonalize(decaying_train(0, (3, 3)), 1)
        with pytest.raises(ValueError):
            tucker_sweep(tt, 0.0, max_ranks=[2])
        with pytest.raises(ValueError):
            tucker_sweep(tt, 0.0, max_ranks=[2, 0])


class TestSthosvdDense:
    @settings(max_examples=30, deadline=None)
    @given(SEEDS, st.booleans())
    def test_projection_identity(self, seed, ascending):
        t = tt_contract(decaying_train(seed, (4, 3, 5)))
        factors, core, discarded = sthosvd_dense(t, 1e-1, ascending=ascending)
        recon = core
        for d, U in enumerate(factors, start=1):
            recon = recon.mode_product(d, U)
        err2 = np.linalg.norm(recon.data - t.data) ** 2
        total = float(np.sum(discarded))
        denom = max(err2, total, 1e-10 * t.norm() ** 2)
        assert abs(err2 - total) / denom <= 1e-9
        assert err2 <= (1e-1 * t.norm()) ** 2 * (1 + 1e-9)
        # orthonormal projections: discarded energy equals the norm gap
        assert t.norm() ** 2 - recon.norm() ** 2 == pytest.approx(
            total, rel=1e-9, abs=1e-12 * t.norm() ** 2
        )

    def test_ascending_matches_original_mode_order(self):
        t = random_dense(3, (5, 2, 4))
        factors, core, _ = sthosvd_dense(t, 1e-1, ascending=True)
        assert [U.shape[0] for U in factors] == [5, 2, 4]
        assert core.order == 3

    def test_agrees_with_train_route_on_ranks(self):
        # both routes see the same per-mode singular spectra, so at a clear
        # truncation threshold they select identical multilinear ranks
        tt = decaying_train(13, (4, 4, 4), decay=0.3)
        t = tt_contract(tt)
        tuck = tt_to_hosvd(tt, 1e-2)
        factors, core, _ = sthosvd_dense(t, 1e-2)
        # sequential truncation can only shrink later spectra relative to
        # the train route's exact per-mode spectra
        assert tuple(U.shape[1] for U in factors) <= tuck.multilinear_rank


class TestReconstructAndRatio:
    def test_reconstruct_shapes(self):
        tt = decaying_train(5, (4, 3, 4))
        tuck = tt_to_hosvd(tt, 1e-1)
        back = tucker_reconstruct_tt(tuck)
        assert back.dims == (4, 3, 4)
        assert back.ranks == tuck.core.ranks

    def test_compression_ratio(self):
        assert compression_ratio(1000, 10) == 100.0
        with pytest.raises(ValueError):
            compression_ratio(0, 10)
        with pytest.raises(ValueError):
            compression_ratio(10, 0)
