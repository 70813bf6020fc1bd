"""Synthetic test instances for the benchmark harness.

gen_type1 builds a numerically low-rank matrix with a geometrically
decaying planted spectrum plus small dense noise; gen_sparse_tensor sums
sparse rank-one terms with harmonically decaying weights; gen_rpca_instance
plants a random low-rank matrix plus a sparse outlier matrix; kahan is the
classic upper-triangular matrix whose trailing values defeat greedy
column pivoting.
"""

import numpy as np

from .errors import DimensionError
from .rng import STREAM_GEN, philox


def gen_type1(m, n, s, seed=0):
    """Matrix U D V^T + 1e-4 * E with D geometric from 1 down to 1e-3 over
    s planted values and E standard Gaussian noise (noise at one tenth of
    the smallest planted value)."""
    if not 1 <= s <= min(m, n):
        raise DimensionError(f"need 1 <= s <= min(m,n); got s={s}")
    rs = philox(seed, STREAM_GEN)
    U, _ = np.linalg.qr(rs.standard_normal((m, s)))
    V, _ = np.linalg.qr(rs.standard_normal((n, s)))
    D = np.geomspace(1.0, 1e-3, s)
    E = rs.standard_normal((m, n))
    return (U * D) @ V.T + 1e-4 * E


def gen_sparse_tensor(n, density=0.05, seed=0):
    """Third-order n x n x n tensor: sum of sparse nonnegative rank-one
    terms x_j o y_j o z_j, weighted 1000/j for j = 1..10 and 1/j for
    j = 11..n.

    The first ten weights dominate the rest by three orders of
    magnitude, giving a strongly truncatable multilinear spectrum.
    Sparse vectors drawing no nonzero entries are resampled so a
    rank-one term never vanishes.
    """
    if n < 11:
        raise DimensionError("need n >= 11 so both weight groups are nonempty")
    if not 0.0 < density <= 1.0:
        raise DimensionError("need 0 < density <= 1")
    rs = philox(seed, STREAM_GEN + 1)

    def sparse_vec():
        while True:
            v = rs.random(n) * (rs.random(n) < density)
            if np.any(v):
                return v

    X = np.zeros((n, n, n))
    for j in range(1, n + 1):
        w = 1000.0 / j if j <= 10 else 1.0 / j
        x, y, z = sparse_vec(), sparse_vec(), sparse_vec()
        X += w * np.einsum("i,j,k->ijk", x, y, z)
    return X


def gen_rpca_instance(m, n, rank, sparsity, seed=0):
    """Planted instance M = X* + E*: Gaussian-factor low-rank X* and a
    sparse E* with uniform [-500, 500] entries on a uniformly chosen
    support of size sparsity * m * n."""
    if not 1 <= rank <= min(m, n):
        raise DimensionError(f"need 1 <= rank <= min(m,n); got rank={rank}")
    if not 0.0 <= sparsity <= 1.0:
        raise DimensionError("sparsity must lie in [0, 1]")
    rs = philox(seed, STREAM_GEN + 2)
    XL = rs.standard_normal((m, rank))
    XR = rs.standard_normal((n, rank))
    Xstar = XL @ XR.T
    Estar = np.zeros((m, n))
    nnz = int(sparsity * m * n)
    if nnz:
        support = rs.choice(m * n, size=nnz, replace=False)
        Estar.flat[support] = rs.uniform(-500.0, 500.0, size=nnz)
    return Xstar + Estar, Xstar, Estar


def gen_mc_instance(m, n, rank, observe_frac, seed=0):
    """Low-rank matrix plus a boolean observation mask covering roughly
    observe_frac of the entries."""
    if not 1 <= rank <= min(m, n):
        raise DimensionError(f"need 1 <= rank <= min(m,n); got rank={rank}")
    if not 0.0 < observe_frac <= 1.0:
        raise DimensionError("observe_frac must lie in (0, 1]")
    rs = philox(seed, STREAM_GEN + 3)
    L = rs.standard_normal((m, rank)) @ rs.standard_normal((rank, n))
    mask = rs.random((m, n)) < observe_frac
    return L, mask


def kahan(n, theta=1.2):
    """Kahan's matrix: S diag(c^i) upper triangular with off-diagonal -s;
    greedy column pivoting badly misjudges its trailing singular values."""
    if n < 1:
        raise DimensionError("need n >= 1")
    s, c = np.sin(theta), np.cos(theta)
    K = np.triu(np.full((n, n), -c), 1) + np.eye(n)
    scale = s ** np.arange(n)
    return (K.T * scale).T
