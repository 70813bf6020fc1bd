"""IALM robust PCA and matrix completion."""

import numpy as np
import pytest

from ffsrqr.errors import DimensionError, NumericalError
from ffsrqr.generators import gen_mc_instance, gen_rpca_instance
from ffsrqr.nuclear import IalmParams, ialm_mc, ialm_rpca, nmae, soft_shrink


class TestSoftShrink:
    def test_known_values(self):
        X = np.array([[3.0, -0.5], [-2.0, 0.0]])
        Y = soft_shrink(X, 1.0)
        assert np.array_equal(Y, np.array([[2.0, 0.0], [-1.0, 0.0]]))

    def test_zero_threshold_is_identity(self):
        g = np.random.default_rng(0)
        X = g.standard_normal((5, 5))
        assert np.array_equal(soft_shrink(X, 0.0), X)

    def test_large_threshold_zeroes(self):
        g = np.random.default_rng(1)
        X = g.standard_normal((5, 5))
        assert np.array_equal(soft_shrink(X, 100.0), np.zeros((5, 5)))


class TestRpca:
    def test_small_exact_recovery(self):
        M, X0, E0 = gen_rpca_instance(120, 120, 8, 0.05, seed=0)
        st = ialm_rpca(M)
        assert st.converged
        assert st.rank == 8
        err = np.linalg.norm(st.low_rank - X0) / np.linalg.norm(X0)
        assert err <= 1e-5
        # Sparse part recovered on its support.
        assert np.linalg.norm(st.sparse - E0) / np.linalg.norm(E0) <= 1e-5

    def test_mu_update_invariant(self):
        M, _, _ = gen_rpca_instance(80, 80, 5, 0.05, seed=1)
        p = IalmParams(rho=1.5)
        st = ialm_rpca(M, p)
        mus = st.mus
        assert len(mus) == st.iterations
        mu_bar = mus[0] * 1e7
        for a, b in zip(mus, mus[1:]):
            assert b == pytest.approx(min(p.rho * a, mu_bar))
        assert all(m <= mu_bar * (1 + 1e-12) for m in mus)

    def test_residuals_decrease_overall(self):
        M, _, _ = gen_rpca_instance(100, 100, 6, 0.05, seed=2)
        st = ialm_rpca(M)
        assert st.residuals[-1] < st.residuals[0]
        assert st.residuals[-1] < 1e-7

    def test_record_iterates(self):
        M, _, _ = gen_rpca_instance(60, 60, 4, 0.05, seed=3)
        st = ialm_rpca(M, record_iterates=True)
        assert len(st.iterates) == st.iterations
        Xl, El = st.iterates[-1]
        assert np.array_equal(Xl, st.low_rank)
        assert np.array_equal(El, st.sparse)

    def test_zero_matrix(self):
        st = ialm_rpca(np.zeros((10, 10)))
        assert st.converged and st.rank == 0

    def test_input_validation(self):
        with pytest.raises(DimensionError):
            ialm_rpca(np.zeros(5))
        bad = np.zeros((4, 4))
        bad[0, 0] = np.nan
        with pytest.raises(NumericalError):
            ialm_rpca(bad)

    def test_engines_agree(self):
        M, X0, _ = gen_rpca_instance(100, 100, 6, 0.05, seed=4)
        for engine in ("flipflop", "rsisvd"):
            st = ialm_rpca(M, IalmParams(svd_engine=engine, seed=0))
            assert st.converged
            err = np.linalg.norm(st.low_rank - X0) / np.linalg.norm(X0)
            assert err <= 1e-4

    def test_unknown_engine(self):
        M, _, _ = gen_rpca_instance(30, 30, 2, 0.05, seed=5)
        with pytest.raises(ValueError):
            ialm_rpca(M, IalmParams(svd_engine="nope"))


class TestMc:
    def test_small_completion(self):
        X0, mask = gen_mc_instance(100, 100, 4, 0.5, seed=0)
        M = X0
        st = ialm_mc(M, mask)
        assert st.converged
        held = ~mask
        err = (np.linalg.norm((st.low_rank - X0)[held])
               / max(np.linalg.norm(X0[held]), 1e-300))
        assert err <= 1e-3

    def test_sparse_part_zero_on_observed(self):
        M, mask = gen_mc_instance(60, 60, 3, 0.5, seed=1)
        st = ialm_mc(M, mask)
        assert np.all(st.sparse[mask] == 0.0)

    def test_mu_update_invariant(self):
        M, mask = gen_mc_instance(60, 60, 3, 0.5, seed=2)
        p = IalmParams(rho=1.5)
        st = ialm_mc(M, mask, p)
        mu_bar = st.mus[0] * 1e7
        for a, b in zip(st.mus, st.mus[1:]):
            assert b == pytest.approx(min(p.rho * a, mu_bar))

    def test_validation(self):
        with pytest.raises(DimensionError):
            ialm_mc(np.zeros((4, 4)), np.zeros((4, 5), dtype=bool))
        bad = np.full((4, 4), np.nan)
        mask = np.ones((4, 4), dtype=bool)
        with pytest.raises(NumericalError):
            ialm_mc(bad, mask)

    def test_all_zero_observed(self):
        st = ialm_mc(np.zeros((8, 8)), np.ones((8, 8), dtype=bool))
        assert st.converged and st.rank == 0

    def test_unobserved_entries_ignored(self):
        # Garbage on unobserved entries must not change the answer.
        M, mask = gen_mc_instance(50, 50, 3, 0.5, seed=3)
        M2 = M.copy()
        M2[~mask] = 1e6
        a = ialm_mc(M, mask)
        b = ialm_mc(M2, mask)
        assert np.array_equal(a.low_rank, b.low_rank)


class TestNmae:
    def test_perfect_prediction_is_zero(self):
        g = np.random.default_rng(0)
        T = g.uniform(1, 5, (10, 10))
        mask = g.random((10, 10)) < 0.5
        assert nmae(T, T, mask, 1, 5) == 0.0

    def test_maximal_error_is_one(self):
        T = np.full((5, 5), 5.0)
        P = np.full((5, 5), 1.0)
        mask = np.ones((5, 5), dtype=bool)
        assert nmae(T, P, mask, 1, 5) == pytest.approx(1.0)

    def test_known_fraction(self):
        T = np.zeros((4, 4))
        P = np.full((4, 4), 0.8)  # |err| = 0.8 on a range of 4 -> 0.2
        mask = np.ones((4, 4), dtype=bool)
        assert nmae(T, P, mask, 0, 4) == pytest.approx(0.2)

    def test_validation(self):
        T = np.zeros((3, 3))
        with pytest.raises(DimensionError):
            nmae(T, T, np.zeros((3, 3), dtype=bool), 0, 1)
        with pytest.raises(DimensionError):
            nmae(T, T, np.ones((3, 3), dtype=bool), 1, 1)
