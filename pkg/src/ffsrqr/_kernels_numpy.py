"""Pure-numpy versions of the pivoted-QR inner loops.

These are the reference implementations; `_kernels_numba` carries jitted
twins with identical semantics.  Both operate in place on Fortran-ordered
float64 arrays and return an explicit flop count so the jitted path does
not have to touch Python globals.

Storage follows the LAPACK layout: after ``qrcp_core(A, k)`` the upper
trapezoid of ``A`` holds R and the strict lower trapezoid of the first k
columns holds the Householder vector tails (unit leading entry implicit).
"""

import math

import numpy as np

# Squared trailing column norms are downdated incrementally; once a norm
# drops below this fraction of its starting value, cancellation may have
# destroyed it and it is recomputed from the column.
DOWNDATE_GUARD = 1e-8


def qrcp_core(A, k):
    """k steps of Householder QR with column pivoting, in place.

    Returns (taus, perm, flops).  Pivots maximize the downdated trailing
    column norm; ties break to the lowest index (np.argmax convention).
    """
    m, n = A.shape
    perm = np.arange(n, dtype=np.int64)
    taus = np.zeros(k)
    flops = 2 * m * n

    r = np.einsum("ij,ij->j", A, A)
    r0 = r.copy()

    for j in range(k):
        piv = j + int(np.argmax(r[j:]))
        if piv != j:
            A[:, [j, piv]] = A[:, [piv, j]]
            perm[[j, piv]] = perm[[piv, j]]
            r[[j, piv]] = r[[piv, j]]
            r0[[j, piv]] = r0[[piv, j]]

        x0 = A[j, j]
        tail = A[j + 1 :, j]
        tail_sq = float(tail @ tail)
        normx = math.sqrt(x0 * x0 + tail_sq)
        flops += 2 * (m - j)

        if tail_sq == 0.0:
            # Column already axis-aligned (or zero): identity reflector.
            taus[j] = 0.0
        else:
            alpha = -math.copysign(normx, x0) if x0 != 0.0 else normx
            v0 = x0 - alpha
            A[j + 1 :, j] = tail / v0
            taus[j] = (alpha - x0) / alpha
            # Apply H = I - tau*v*v^T to the trailing columns.
            if j + 1 < n:
                v = A[j:, j].copy()
                v[0] = 1.0
                w = v @ A[j:, j + 1 :]
                A[j:, j + 1 :] -= taus[j] * np.outer(v, w)
                flops += 4 * (m - j) * (n - j - 1)
            A[j, j] = alpha

        if j + 1 < n:
            row = A[j, j + 1 :]
            r[j + 1 :] -= row * row
            flops += 2 * (n - j - 1)
            bad = np.flatnonzero(
                (r[j + 1 :] < DOWNDATE_GUARD * r0[j + 1 :]) | (r[j + 1 :] < 0.0)
            )
            for b in bad:
                col = j + 1 + b
                fresh = float(A[j + 1 :, col] @ A[j + 1 :, col])
                r[col] = max(fresh, 0.0)
                flops += 2 * (m - j - 1)

    return taus, perm, flops


def qrnp_core(A, k):
    """k steps of unpivoted Householder QR, in place; returns (taus, flops)."""
    m, n = A.shape
    taus = np.zeros(k)
    flops = 0
    for j in range(k):
        x0 = A[j, j]
        tail = A[j + 1 :, j]
        tail_sq = float(tail @ tail)
        normx = math.sqrt(x0 * x0 + tail_sq)
        flops += 2 * (m - j)
        if tail_sq == 0.0:
            taus[j] = 0.0
            continue
        alpha = -math.copysign(normx, x0) if x0 != 0.0 else normx
        v0 = x0 - alpha
        A[j + 1 :, j] = tail / v0
        taus[j] = (alpha - x0) / alpha
        if j + 1 < n:
            v = A[j:, j].copy()
            v[0] = 1.0
            w = v @ A[j:, j + 1 :]
            A[j:, j + 1 :] -= taus[j] * np.outer(v, w)
            flops += 4 * (m - j) * (n - j - 1)
        A[j, j] = alpha
    return taus, flops
