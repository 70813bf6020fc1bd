"""Spectrum-revealing QR.

Initializes with the truncated randomized factorization, extends it one
extra step, then certifies the quality ratio g2 = |alpha| * ||Rtilde^-T||_{1,2}
by a cheap Gaussian estimate.  While the estimate exceeds the user
tolerance g, the worst column of the leading block is rotated to the
trailing position, R is Givens-chased back to triangular form, and the
trailing pivot is re-chosen; each swap strictly improves the leading
block.  The trailing matrix R22 is never materialized: trailing column
norms live in a downdated squared-norm array.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import flops, rng
from .errors import CertificationError, DimensionError, SingularTrailingBlockError
from .qr import (
    DOWNDATE_GUARD,
    PartialFactorization,
    apply_rotations_right,
    givens_retriangularize,
)
from .sketch import SketchParams, _trqrcp_state


@dataclass
class SrqrCertificate:
    alpha: float        # |R[l+1, l+1]| after the extension step
    g1: float           # max trailing column norm / alpha (exact formula)
    g2: float           # certified estimate of |alpha| * ||Rtilde^-T||_{1,2}
    swaps: int
    tau_bound: float      # g1*g2*sqrt((l+1)(n-l))
    tau_hat_bound: float  # g1*g2*sqrt(l(n-l))


@dataclass
class SrqrResult:
    fact: PartialFactorization
    cert: SrqrCertificate
    r22_norm_estimate: float
    rtilde: np.ndarray    # (l+1) x (l+1) leading block including the extra row
    q_ext: np.ndarray     # m x (l+1) orthonormal basis including the extra column


def _g2_estimate(Rtilde, alpha, d, seed, stream):
    """Gaussian estimate of |alpha|*||Rtilde^-T||_{1,2}; returns (g2, argmax col)."""
    ell1 = Rtilde.shape[0]
    diag = np.abs(np.diag(Rtilde))
    if diag.min() == 0.0:
        raise SingularTrailingBlockError("zero diagonal in leading triangular block")
    omega = rng.gaussian(d, ell1, seed, stream)
    # Column i of Omega @ Rtilde^-T is row i of Rtilde^-1 @ Omega^T.
    try:
        Z = scipy.linalg.solve_triangular(Rtilde, omega.T)
    except np.linalg.LinAlgError as exc:
        raise SingularTrailingBlockError(str(exc)) from exc
    flops.add(d * ell1 * ell1)
    norms = np.sqrt(np.einsum("ij,ij->i", Z, Z))
    i = int(np.argmax(norms))
    return abs(alpha) / math.sqrt(d) * norms[i], i


def estimate_g2(Rtilde, alpha, d, seed, stream=0):
    """Randomized estimate of g2 for an upper-triangular block.

    Uses d triangular solves against a fresh Gaussian test matrix; the
    inverse is never formed densely.
    """
    Rtilde = np.asarray(Rtilde, dtype=float)
    if Rtilde.ndim != 2 or Rtilde.shape[0] != Rtilde.shape[1]:
        raise DimensionError("Rtilde must be square")
    return _g2_estimate(Rtilde, alpha, d, seed, rng.STREAM_G2_BASE + stream)[0]


class _SwapState:
    """Mutable factorization state driven by the swap loop (0-based: columns
    0..l-1 are factored, position l holds the extension step)."""

    def __init__(self, st, l):
        m, n = st.Aw.shape
        self.m, self.n, self.l = m, n, l
        self.Aw = st.Aw
        self.perm = st.perm
        self.R = np.zeros((l + 1, n))
        self.R[:l] = st.R
        # Dense leading Q columns; WY form does not survive Givens updates.
        E = np.eye(m, l + 1)
        Q = E.copy()
        Q[:, :l] -= st.Y @ (st.T @ st.Y[:l, :].T)
        flops.add(2 * m * l * l)
        self.Q = Q
        self.colsq = np.einsum("ij,ij->j", st.Aw, st.Aw)
        bp = st.B.shape[0]
        # Trailing squared norms: sketch-based initialization (Alg-style),
        # exact one-row downdates afterwards.
        self.r = np.zeros(n)
        self.r[l:] = np.einsum("ij,ij->j", st.B[:, l:], st.B[:, l:]) / bp
        self.r_init = self.r.copy()
        self.anorm = np.linalg.norm(st.Aw)

    def exact_trailing_sq(self, i, rows):
        """Exact squared trailing norm of column i below `rows` factored rows."""
        return max(self.colsq[i] - float(self.R[:rows, i] @ self.R[:rows, i]), 0.0)

    def swap_cols(self, a, b):
        if a == b:
            return
        for M in (self.Aw, self.R):
            M[:, [a, b]] = M[:, [b, a]]
        for v in (self.perm, self.colsq, self.r, self.r_init):
            v[[a, b]] = v[[b, a]]

    def extend(self):
        """Pivot the best trailing column into position l and take one QR step.

        Returns the new alpha (0 signals an exactly rank-l trailing block).
        """
        l, n = self.l, self.n
        piv = l + int(np.argmax(self.r[l:]))
        self.swap_cols(l, piv)
        Q1 = self.Q[:, :l]
        u = self.Aw[:, l] - Q1 @ self.R[:l, l]
        u -= Q1 @ (Q1.T @ u)  # second orthogonalization pass
        flops.add(8 * self.m * l)
        alpha = float(np.linalg.norm(u))
        self.R[l, :] = 0.0
        if alpha <= 1e-14 * max(self.anorm, 1e-300):
            self.Q[:, l] = 0.0
            return 0.0
        q = u / alpha
        self.Q[:, l] = q
        self.R[l, l] = alpha
        self.r[l] = alpha * alpha
        if l + 1 < n:
            row = q @ self.Aw[:, l + 1 :]
            flops.add(2 * self.m * (n - l - 1))
            self.R[l, l + 1 :] = row
            self.r[l + 1 :] -= row * row
            bad = np.flatnonzero(
                (self.r[l + 1 :] < DOWNDATE_GUARD * self.r_init[l + 1 :])
                | (self.r[l + 1 :] < 0.0)
            )
            for b in bad:
                i = l + 1 + int(b)
                self.r[i] = self.exact_trailing_sq(i, l + 1)
        return alpha

    def rotate_out(self, i_off):
        """Cyclic left-shift of columns i_off..l; the offending column becomes
        trailing, then R is re-triangularized and Q follows."""
        l = self.l
        if i_off < l:
            idx = list(range(i_off + 1, l + 1)) + [i_off]
            for M in (self.Aw, self.R):
                M[:, i_off : l + 1] = M[:, [c for c in idx]]
            for v in (self.perm, self.colsq, self.r, self.r_init):
                v[i_off : l + 1] = v[idx]
        Rnew, rots = givens_retriangularize(self.R, i_off)
        self.R = Rnew
        apply_rotations_right(self.Q, rots)

    def revert_extension(self):
        """Return the extension row's mass to the trailing norms."""
        l, n = self.l, self.n
        self.r[l] = self.R[l, l] ** 2
        if l + 1 < n:
            self.r[l + 1 :] += self.R[l, l + 1 :] ** 2


def srqr(A, params):
    """Spectrum-revealing QR to ``params.l`` steps, certified so the
    randomized g2 estimate is at most ``params.g``."""
    A = np.asarray(A, dtype=float)
    m, n = A.shape
    prm = params.resolve(m, n)
    l = prm.l
    if l + 1 > min(m, n):
        raise DimensionError(f"srqr needs l+1 <= min(m,n); got l={l}, min={min(m, n)}")

    st = _trqrcp_state(A, prm)
    sw = _SwapState(st, l)

    alpha = sw.extend()
    swaps = 0
    g2 = 0.0
    max_swaps = 50 * l

    while alpha > 0.0:
        g2, i_off = _g2_estimate(
            sw.R[: l + 1, : l + 1], alpha, prm.d, prm.seed, rng.STREAM_G2_BASE + swaps
        )
        if g2 <= prm.g:
            break
        if swaps >= max_swaps:
            raise CertificationError(
                f"swap cap {max_swaps} reached with g2={g2:.3g}",
                result=_pack(sw, alpha, g2, swaps, prm),
            )
        swaps += 1
        sw.rotate_out(i_off)
        sw.revert_extension()
        alpha = sw.extend()

    if alpha == 0.0:
        g2 = 0.0
    return _pack(sw, alpha, g2, swaps, prm)


def _pack(sw, alpha, g2, swaps, prm):
    l, n = sw.l, sw.n
    trail_sq = np.array([sw.exact_trailing_sq(i, l) for i in range(l, n)])
    r22_12 = math.sqrt(trail_sq.max()) if trail_sq.size else 0.0
    g1 = r22_12 / alpha if alpha > 0.0 else 0.0
    cert = SrqrCertificate(
        alpha=abs(alpha),
        g1=g1,
        g2=g2,
        swaps=swaps,
        tau_bound=g1 * g2 * math.sqrt((l + 1) * (n - l)),
        tau_hat_bound=g1 * g2 * math.sqrt(l * (n - l)),
    )
    fact = PartialFactorization(
        R=sw.R[:l].copy(), perm=sw.perm.copy(), k=l, q_dense=sw.Q[:, :l].copy()
    )
    return SrqrResult(
        fact=fact,
        cert=cert,
        r22_norm_estimate=r22_12,
        rtilde=np.triu(sw.R[: l + 1, : l + 1]).copy(),
        q_ext=sw.Q.copy(),
    )
