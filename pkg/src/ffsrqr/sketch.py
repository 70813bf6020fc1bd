"""Randomized pivoted QR on a Gaussian sketch.

Both routines pick pivots by running partial QRCP on the compressed
matrix B = Omega @ A, one block of columns at a time.  ``rqrcp`` updates
the trailing matrix of A in full; ``trqrcp`` never touches it, routing
all updates through W^T = T^T Y^T A so only the leading rows of R are
ever formed.  Given the same seed they consume the same random stream
and produce the same pivot sequence.
"""

from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg

from . import backend, flops, rng
from .errors import DimensionError
from .qr import PartialFactorization, _taus_to_wy, householder_reflector


@dataclass
class SketchParams:
    """Knobs shared by the sketched factorizations.

    k: target rank; l: actual factorization rank (defaults to k);
    b: block size; p: oversampling; epsilon: sketch reliability parameter;
    g: swap tolerance for the spectrum-revealing loop; d: sample rows used
    to estimate the inverse-norm quality ratio (defaults to min(l, 10));
    seed: 64-bit stream key.
    """

    k: int
    l: int = None
    b: int = 32
    p: int = 5
    epsilon: float = 0.5
    g: float = 2.0
    d: int = None
    seed: int = 0

    def resolve(self, m, n):
        l = self.k if self.l is None else self.l
        d = min(l, 10) if self.d is None else self.d
        out = replace(self, l=l, d=d)
        if not 1 <= self.k <= l <= min(m, n):
            raise DimensionError(f"need 1 <= k <= l <= min(m,n); got k={self.k}, l={l}")
        if out.b < 1 or out.p < 0:
            raise DimensionError("need b >= 1 and p >= 0")
        if not 0.0 < out.epsilon < 1.0:
            raise DimensionError("epsilon must lie in (0,1)")
        if out.g <= 1.0:
            raise DimensionError("g must exceed 1")
        if not 1 <= d <= l:
            raise DimensionError("need 1 <= d <= l")
        if out.b + out.p > m:
            raise DimensionError(
                f"sketch rows b+p={out.b + out.p} exceed m={m}; no compression"
            )
        return out


def _block_pivots(B, j0, bb):
    """Partial QRCP on a copy of B[:, j0:] -> column arrangement of length n-j0."""
    sub = np.asfortranarray(B[:, j0:].copy())
    _, lperm, fl = backend.qrcp_core(sub, bb)
    flops.add(fl)
    return j0 + lperm


def _reorder(j0, order, *mats):
    for M in mats:
        M[:, j0:] = M[:, order]


def _tri_solve(R11, R12):
    """R11^{-1} R12 with an lstsq fallback for an exactly singular panel."""
    diag = np.abs(np.diag(R11))
    flops.add(R11.shape[0] ** 2 * R12.shape[1])
    if diag.min() == 0.0:
        if np.linalg.norm(R12) == 0.0:
            return np.zeros_like(R12)
        return np.linalg.lstsq(R11, R12, rcond=None)[0]
    return scipy.linalg.solve_triangular(R11, R12)


@dataclass
class TrqrcpState:
    """Factorization state after l truncated steps (consumed by srqr)."""

    Aw: np.ndarray      # permuted copy of A; trailing rows never updated
    Y: np.ndarray       # m x l reflectors
    T: np.ndarray       # l x l compact-WY triangle
    WT: np.ndarray      # l x n, W^T = T^T Y^T Aw
    R: np.ndarray       # l x n upper trapezoidal
    B: np.ndarray       # current sketch of the trailing matrix
    omega: np.ndarray
    perm: np.ndarray
    params: SketchParams


def _trqrcp_state(A, params):
    A = np.asarray(A, dtype=float)
    m, n = A.shape
    prm = params.resolve(m, n)
    l, b, p = prm.l, prm.b, prm.p

    Aw = np.array(A, order="F")
    omega = rng.gaussian(b + p, m, prm.seed, rng.STREAM_SKETCH)
    B = np.array(flops.mm(omega, Aw), order="F")
    perm = np.arange(n, dtype=np.int64)
    Y = np.zeros((m, l))
    T = np.zeros((l, l))
    WT = np.zeros((l, n))
    R = np.zeros((l, n))

    j0 = 0
    while j0 < l:
        bb = min(l - j0, b)
        order = _block_pivots(B, j0, bb)
        _reorder(j0, order, Aw, B, WT, R)
        perm[j0:] = perm[order]

        for c in range(j0, j0 + bb):
            col = Aw[:, c] - Y[:, :c] @ WT[:c, c]
            flops.add(2 * m * c)
            v_tail, beta, alpha = householder_reflector(col[c:])
            Y[c, c] = 1.0
            Y[c + 1 :, c] = v_tail[1:]
            v = Y[c:, c]
            yv = Y[c:, :c].T @ v
            T[:c, c] = -beta * (T[:c, :c] @ yv)
            T[c, c] = beta
            flops.add(2 * (m - c) * c + 2 * c * c)
            # New row of W^T = T^T Y^T Aw: only v^T Aw is matrix-sized.
            WT[c, :] = beta * (v @ Aw[c:, :] - yv @ WT[:c, :])
            flops.add(2 * (m - c) * n + 2 * c * n)
            R[c, c:] = Aw[c, c:] - Y[c, : c + 1] @ WT[: c + 1, c:]
            R[c, c] = alpha
            flops.add(2 * (c + 1) * (n - c))

        e = j0 + bb
        if e < n:
            X = _tri_solve(R[j0:e, j0:e], R[j0:e, e:])
            B[:, e:] -= flops.mm(B[:, j0:e], X)
        j0 = e

    return TrqrcpState(Aw=Aw, Y=Y, T=T, WT=WT, R=R, B=B, omega=omega, perm=perm, params=prm)


def trqrcp(A, params):
    """Truncated randomized QRCP to ``params.l`` steps.

    The trailing matrix is never updated; only the leading l rows of R
    are computed.
    """
    st = _trqrcp_state(A, params)
    from .qr import WYFactor

    return PartialFactorization(
        R=st.R, perm=st.perm, k=st.params.l, wy=WYFactor(st.Y, st.T)
    )


def rqrcp(A, params):
    """Randomized QRCP with a fully updated trailing matrix.

    Independent of ``trqrcp`` (classic blocked update path); serves as its
    oracle in tests.
    """
    A = np.asarray(A, dtype=float)
    m, n = A.shape
    prm = params.resolve(m, n)
    l, b, p = prm.l, prm.b, prm.p

    Aw = np.array(A, order="F")
    omega = rng.gaussian(b + p, m, prm.seed, rng.STREAM_SKETCH)
    B = np.array(flops.mm(omega, Aw), order="F")
    perm = np.arange(n, dtype=np.int64)
    taus = np.zeros(l)

    j0 = 0
    while j0 < l:
        bb = min(l - j0, b)
        order = _block_pivots(B, j0, bb)
        _reorder(j0, order, Aw, B)
        perm[j0:] = perm[order]
        e = j0 + bb

        panel = np.asfortranarray(Aw[j0:, j0:e].copy())
        taus_p, fl = backend.qrnp_core(panel, bb)
        flops.add(fl)
        Aw[j0:, j0:e] = panel
        taus[j0:e] = taus_p
        if e < n:
            wy_p = _taus_to_wy(panel, taus_p, bb)
            trail = Aw[j0:, e:]
            Aw[j0:, e:] = trail - wy_p.Y @ (wy_p.T.T @ flops.mm(wy_p.Y.T, trail))
            R11 = np.triu(Aw[j0:e, j0:e])
            X = _tri_solve(R11, Aw[j0:e, e:])
            B[:, e:] -= flops.mm(B[:, j0:e], X)
        j0 = e

    R = np.triu(Aw[:l, :])
    return PartialFactorization(R=R, perm=perm, k=l, wy=_taus_to_wy(Aw, taus, l))
