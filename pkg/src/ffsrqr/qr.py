"""Deterministic dense kernels: Householder reflectors, compact-WY
accumulation, Givens re-triangularization, norm downdating, and the
reference partial QR with column pivoting.

Matrices are float64 numpy arrays; factorizations keep Q implicit as
Householder reflectors in compact-WY form (Q = I - Y T Y^T) unless a
caller asks for dense columns.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import backend, flops
from .errors import DimensionError

DOWNDATE_GUARD = 1e-8


def householder_reflector(x):
    """Reflector annihilating the tail of ``x``.

    Returns (v, beta, alpha) with v[0] = 1 and
    (I - beta*v*v^T) x = (alpha, 0, ..., 0), |alpha| = ||x||.  A zero
    vector yields the identity reflector (beta = 0, alpha = 0); the sign
    of alpha is opposite to x[0] for stability.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise DimensionError("householder_reflector needs a non-empty vector")
    v = np.zeros_like(x)
    v[0] = 1.0
    x0 = x[0]
    tail_sq = float(x[1:] @ x[1:])
    normx = math.sqrt(x0 * x0 + tail_sq)
    if tail_sq == 0.0:
        # Already axis-aligned (covers the zero vector).
        return v, 0.0, x0
    alpha = -math.copysign(normx, x0) if x0 != 0.0 else normx
    v[1:] = x[1:] / (x0 - alpha)
    beta = (alpha - x0) / alpha
    return v, beta, alpha


@dataclass
class WYFactor:
    """Compact-WY form of a reflector product: Q = I - Y T Y^T.

    Y is m-by-j unit lower-trapezoidal (reflector j has its unit entry in
    row j), T is j-by-j upper triangular.
    """

    Y: np.ndarray
    T: np.ndarray

    @property
    def j(self):
        return self.Y.shape[1]

    @property
    def m(self):
        return self.Y.shape[0]

    def q(self, ncols=None):
        """Dense leading ``ncols`` columns of Q (all m if omitted)."""
        ncols = self.m if ncols is None else ncols
        E = np.eye(self.m, ncols)
        if self.j == 0:
            return E
        return E - self.Y @ (self.T @ (self.Y.T @ E))

    def apply_left(self, C, transpose=False):
        """Q @ C, or Q^T @ C with ``transpose``; C unchanged."""
        if C.shape[0] != self.m:
            raise DimensionError("row mismatch in WY apply")
        if self.j == 0:
            return C.copy()
        T = self.T.T if transpose else self.T
        return C - self.Y @ (T @ flops.mm(self.Y.T, C))


def wy_empty(m):
    return WYFactor(np.zeros((m, 0)), np.zeros((0, 0)))


def wy_append(wy, v, beta):
    """Append one reflector: new Q = Q_old @ (I - beta*v*v^T)."""
    m, j = wy.Y.shape
    v = np.asarray(v, dtype=float)
    if v.shape != (m,):
        raise DimensionError("reflector length must match Y rows")
    Y = np.empty((m, j + 1))
    T = np.zeros((j + 1, j + 1))
    Y[:, :j] = wy.Y
    Y[:, j] = v
    T[:j, :j] = wy.T
    if j > 0:
        T[:j, j] = -beta * (wy.T @ (wy.Y.T @ v))
    T[j, j] = beta
    return WYFactor(Y, T)


def _taus_to_wy(Awork, taus, k):
    """Build the WY factor from LAPACK-style storage after k QR steps."""
    m = Awork.shape[0]
    Y = np.zeros((m, k))
    for j in range(k):
        Y[j, j] = 1.0
        Y[j + 1 :, j] = Awork[j + 1 :, j]
    T = np.zeros((k, k))
    for j in range(k):
        T[:j, j] = -taus[j] * (T[:j, :j] @ (Y[:, :j].T @ Y[:, j]))
        T[j, j] = taus[j]
    return WYFactor(Y, T)


@dataclass
class PartialFactorization:
    """Partial pivoted QR: A[:, perm] ~ Q[:, :k] @ R with R k-by-n.

    Q lives either in ``wy`` (compact reflectors) or, after basis
    rotations that break the WY form, as dense columns in ``q_dense``.
    """

    R: np.ndarray
    perm: np.ndarray
    k: int
    wy: WYFactor = None
    q_dense: np.ndarray = None

    def q(self):
        """Dense m-by-k orthonormal basis of the factored columns."""
        if self.q_dense is not None:
            return self.q_dense
        return self.wy.q(self.k)

    def reconstruction_error(self, A):
        """Frobenius error on the first k permuted columns of A."""
        lead = A[:, self.perm[: self.k]]
        return np.linalg.norm(lead - self.q() @ self.R[:, : self.k])


def partial_qrcp(A, k):
    """Partial QR with column pivoting to rank ``k`` (greedy max-norm pivots).

    Ties in the pivot arg-max break to the lowest column index, so runs are
    reproducible.
    """
    A = np.asarray(A, dtype=float)
    m, n = A.shape
    if not 1 <= k <= min(m, n):
        raise DimensionError(f"k={k} out of range for {m}x{n}")
    work = np.asfortranarray(A)
    taus, perm, nflops = backend.qrcp_core(work, k)
    flops.add(nflops)
    R = np.triu(work[:k, :])
    return PartialFactorization(R=R, perm=perm, k=k, wy=_taus_to_wy(work, taus, k))


def norm_downdate(r, row, r0=None, recompute=None):
    """Downdate squared column norms by one eliminated row.

    ``r`` holds squared norms, ``row`` the just-eliminated row entries.
    Entries falling below DOWNDATE_GUARD times their reference value
    ``r0`` (defaults to the incoming ``r``) are recomputed through the
    ``recompute(i) -> squared norm`` callback when given, else clamped
    at zero.
    """
    r = np.asarray(r, dtype=float)
    row = np.asarray(row, dtype=float)
    if r.shape != row.shape:
        raise DimensionError("r and row must have matching length")
    ref = r if r0 is None else np.asarray(r0, dtype=float)
    out = r - row * row
    bad = np.flatnonzero((out < DOWNDATE_GUARD * ref) | (out < 0.0))
    for i in bad:
        out[i] = max(recompute(int(i)), 0.0) if recompute is not None else max(out[i], 0.0)
    return out


def givens_retriangularize(R, start_col):
    """Chase the subdiagonal bulge left by a cyclic column rotation.

    Scans columns from ``start_col``, zeroing each subdiagonal entry with a
    row rotation applied across all of R.  Returns (R, rotations) where each
    rotation is (row, c, s) acting on rows (row, row+1); callers accumulate
    them into Q as Q[:, row:row+2] @ [[c, -s], [s, c]].
    """
    R = np.array(R, dtype=float)
    k, n = R.shape
    if not 0 <= start_col <= n:
        raise DimensionError("start_col out of range")
    rotations = []
    for i in range(start_col, min(k - 1, n)):
        b = R[i + 1, i]
        if b == 0.0:
            continue
        a = R[i, i]
        h = math.hypot(a, b)
        c, s = a / h, b / h
        upper = c * R[i, i:] + s * R[i + 1, i:]
        lower = -s * R[i, i:] + c * R[i + 1, i:]
        R[i, i:] = upper
        R[i + 1, i:] = lower
        R[i + 1, i] = 0.0
        rotations.append((i, c, s))
        flops.add(6 * (n - i))
    return R, rotations


def apply_rotations_right(Q, rotations):
    """Accumulate row rotations from `givens_retriangularize` into Q columns."""
    for i, c, s in rotations:
        q0 = Q[:, i].copy()
        q1 = Q[:, i + 1]
        Q[:, i] = c * q0 + s * q1
        Q[:, i + 1] = -s * q0 + c * q1
    return Q
