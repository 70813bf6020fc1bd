"""Synthetic instance generators."""

import numpy as np
import pytest

from ffsrqr.errors import DimensionError
from ffsrqr.generators import (
    gen_mc_instance,
    gen_rpca_instance,
    gen_sparse_tensor,
    gen_type1,
    kahan,
)


class TestType1:
    def test_planted_spectrum(self):
        A = gen_type1(100, 100, 1, seed=0)
        s = np.linalg.svd(A, compute_uv=False)
        # One planted value of 1.0 plus small noise.
        assert 0.9 <= s[0] <= 1.1

    def test_geometric_endpoints(self):
        A = gen_type1(200, 200, 50, seed=1)
        s = np.linalg.svd(A, compute_uv=False)
        assert s[0] == pytest.approx(1.0, rel=0.1)
        # Smallest planted value 1e-3 still dominates the 1e-4 noise scale.
        assert 5e-4 <= s[49] <= 5e-3
        # Past the planted rank the spectrum drops to the noise floor.
        assert s[50] < s[49]

    def test_reproducible(self):
        assert np.array_equal(gen_type1(50, 40, 10, seed=7),
                              gen_type1(50, 40, 10, seed=7))
        assert not np.array_equal(gen_type1(50, 40, 10, seed=7),
                                  gen_type1(50, 40, 10, seed=8))

    def test_validation(self):
        with pytest.raises(DimensionError):
            gen_type1(10, 10, 0)
        with pytest.raises(DimensionError):
            gen_type1(10, 10, 11)


class TestSparseTensor:
    def test_shape_nonnegative_sparse(self):
        X = gen_sparse_tensor(20, density=0.1, seed=0)
        assert X.shape == (20, 20, 20)
        assert np.all(X >= 0.0)
        assert np.count_nonzero(X) < X.size  # genuinely sparse

    def test_truncatable_spectrum(self):
        # The first ten terms carry weights 1000/j, the rest 1/j, so the
        # mode unfoldings have a sharp spectral knee.
        X = gen_sparse_tensor(30, density=0.1, seed=1)
        M = X.reshape(30, -1)
        s = np.linalg.svd(M, compute_uv=False)
        assert s[0] / s[15] > 50

    def test_reproducible(self):
        assert np.array_equal(gen_sparse_tensor(15, seed=3),
                              gen_sparse_tensor(15, seed=3))

    def test_validation(self):
        with pytest.raises(DimensionError):
            gen_sparse_tensor(10)
        with pytest.raises(DimensionError):
            gen_sparse_tensor(20, density=0.0)
        with pytest.raises(DimensionError):
            gen_sparse_tensor(20, density=1.5)


class TestRpcaInstance:
    def test_contracts(self):
        M, X0, E0 = gen_rpca_instance(80, 60, 5, 0.05, seed=0)
        assert np.array_equal(M, X0 + E0)
        assert np.linalg.matrix_rank(X0) == 5
        nnz = np.count_nonzero(E0)
        assert nnz == int(0.05 * 80 * 60)
        vals = E0[E0 != 0]
        assert np.all(np.abs(vals) <= 500.0)

    def test_zero_sparsity_gives_exact_low_rank(self):
        M, X0, E0 = gen_rpca_instance(40, 40, 3, 0.0, seed=1)
        assert np.array_equal(M, X0)
        assert np.count_nonzero(E0) == 0
        assert np.linalg.matrix_rank(M) == 3

    def test_reproducible(self):
        a = gen_rpca_instance(30, 30, 2, 0.1, seed=5)
        b = gen_rpca_instance(30, 30, 2, 0.1, seed=5)
        for x, y in zip(a, b):
            assert np.array_equal(x, y)

    def test_validation(self):
        with pytest.raises(DimensionError):
            gen_rpca_instance(10, 10, 0, 0.1)
        with pytest.raises(DimensionError):
            gen_rpca_instance(10, 10, 2, 1.5)


class TestMcInstance:
    def test_contracts(self):
        L, mask = gen_mc_instance(100, 80, 4, 0.5, seed=0)
        assert L.shape == (100, 80) and mask.shape == (100, 80)
        assert mask.dtype == bool
        assert np.linalg.matrix_rank(L) == 4
        frac = mask.mean()
        assert 0.45 <= frac <= 0.55

    def test_full_observation(self):
        _, mask = gen_mc_instance(20, 20, 2, 1.0, seed=1)
        assert mask.all()

    def test_validation(self):
        with pytest.raises(DimensionError):
            gen_mc_instance(10, 10, 0, 0.5)
        with pytest.raises(DimensionError):
            gen_mc_instance(10, 10, 2, 0.0)


class TestKahan:
    def test_structure(self):
        K = kahan(6, theta=1.2)
        assert np.allclose(K, np.triu(K))
        s, c = np.sin(1.2), np.cos(1.2)
        assert K[0, 0] == pytest.approx(1.0)
        assert K[1, 1] == pytest.approx(s)
        assert K[0, 1] == pytest.approx(-c)
        assert K[1, 2] == pytest.approx(-c * s)

    def test_unit_column_norms(self):
        # Every column of Kahan's matrix has exactly unit 2-norm, which is
        # what makes greedy column pivoting tie on every step.
        K = kahan(30)
        norms = np.linalg.norm(K, axis=0)
        assert np.allclose(norms, 1.0, atol=1e-12)

    def test_trailing_singular_value_tiny(self):
        K = kahan(60)
        s = np.linalg.svd(K, compute_uv=False)
        assert s[-1] < 1e-6 * s[0]

    def test_validation(self):
        with pytest.raises(DimensionError):
            kahan(0)
