"""Numba-jitted twins of the `_kernels_numpy` inner loops.

Kept loop-explicit so nopython mode never falls back; semantics match the
numpy versions up to floating-point summation order.
"""

import math

import numpy as np
from numba import njit

DOWNDATE_GUARD = 1e-8


@njit(cache=True)
def qrcp_core(A, k):
    m, n = A.shape
    perm = np.arange(n)
    taus = np.zeros(k)
    flops = 2 * m * n

    r = np.zeros(n)
    r0 = np.zeros(n)
    for c in range(n):
        s = 0.0
        for i in range(m):
            s += A[i, c] * A[i, c]
        r[c] = s
        r0[c] = s

    for j in range(k):
        piv = j
        best = r[j]
        for c in range(j + 1, n):
            if r[c] > best:
                best = r[c]
                piv = c
        if piv != j:
            for i in range(m):
                tmp = A[i, j]
                A[i, j] = A[i, piv]
                A[i, piv] = tmp
            pt = perm[j]
            perm[j] = perm[piv]
            perm[piv] = pt
            t = r[j]
            r[j] = r[piv]
            r[piv] = t
            t = r0[j]
            r0[j] = r0[piv]
            r0[piv] = t

        x0 = A[j, j]
        tail_sq = 0.0
        for i in range(j + 1, m):
            tail_sq += A[i, j] * A[i, j]
        normx = math.sqrt(x0 * x0 + tail_sq)
        flops += 2 * (m - j)

        if tail_sq == 0.0:
            taus[j] = 0.0
        else:
            if x0 != 0.0:
                alpha = -math.copysign(normx, x0)
            else:
                alpha = normx
            v0 = x0 - alpha
            for i in range(j + 1, m):
                A[i, j] /= v0
            tau = (alpha - x0) / alpha
            taus[j] = tau
            for c in range(j + 1, n):
                s = A[j, c]
                for i in range(j + 1, m):
                    s += A[i, j] * A[i, c]
                s *= tau
                A[j, c] -= s
                for i in range(j + 1, m):
                    A[i, c] -= A[i, j] * s
            flops += 4 * (m - j) * (n - j - 1)
            A[j, j] = alpha

        for c in range(j + 1, n):
            r[c] -= A[j, c] * A[j, c]
        flops += 2 * (n - j - 1)
        for c in range(j + 1, n):
            if r[c] < DOWNDATE_GUARD * r0[c] or r[c] < 0.0:
                s = 0.0
                for i in range(j + 1, m):
                    s += A[i, c] * A[i, c]
                r[c] = s if s > 0.0 else 0.0
                flops += 2 * (m - j - 1)

    return taus, perm, flops


@njit(cache=True)
def qrnp_core(A, k):
    m, n = A.shape
    taus = np.zeros(k)
    flops = 0
    for j in range(k):
        x0 = A[j, j]
        tail_sq = 0.0
        for i in range(j + 1, m):
            tail_sq += A[i, j] * A[i, j]
        normx = math.sqrt(x0 * x0 + tail_sq)
        flops += 2 * (m - j)
        if tail_sq == 0.0:
            taus[j] = 0.0
            continue
        if x0 != 0.0:
            alpha = -math.copysign(normx, x0)
        else:
            alpha = normx
        v0 = x0 - alpha
        for i in range(j + 1, m):
            A[i, j] /= v0
        tau = (alpha - x0) / alpha
        taus[j] = tau
        for c in range(j + 1, n):
            s = A[j, c]
            for i in range(j + 1, m):
                s += A[i, j] * A[i, c]
            s *= tau
            A[j, c] -= s
            for i in range(j + 1, m):
                A[i, c] -= A[i, j] * s
        flops += 4 * (m - j) * (n - j - 1)
        A[j, j] = alpha
    return taus, flops
