"""Multiply-add accounting for the instrumented numeric kernels.

Counts are accumulated in a thread-local integer, so concurrent solver
calls keep independent tallies: a matrix product of an m-by-n with an
n-by-r matrix contributes 2*m*n*r, following the usual convention that
one multiply plus one add is two flops.  The counters are always on; the
bookkeeping is a handful of integer adds per kernel call.
"""

import threading

import numpy as np

_state = threading.local()


def reset():
    """Zero the accumulated flop count for the current thread."""
    _state.count = 0


def add(n):
    """Accumulate ``n`` flops."""
    _state.count = getattr(_state, "count", 0) + int(n)


def total():
    """Return the flops accumulated since the last reset."""
    return getattr(_state, "count", 0)


def mm(a, b):
    """Counted matrix product (2*m*n*r flops)."""
    a = np.asarray(a)
    b = np.asarray(b)
    m = a.shape[0] if a.ndim == 2 else 1
    inner = a.shape[-1]
    r = b.shape[1] if b.ndim == 2 else 1
    add(2 * m * inner * r)
    return a @ b


def count_qr_thin(rows, cols, form_q=True):
    """Flops of a thin Householder QR of a rows-by-cols matrix."""
    c = 2 * rows * cols**2 - (2 * cols**3) // 3
    if form_q:
        c += rows * cols**2 + cols**3 // 3
    return c


def count_svd(rows, cols):
    """Nominal cost of a dense economy SVD (one-sided reduction estimate)."""
    small = min(rows, cols)
    return 6 * rows * cols * small if rows >= cols else 6 * cols * rows * small
