"""Kernel backend selection.

The pivoted-QR inner loops exist twice: a numba-jitted version and a pure
numpy fallback.  ``FFSRQR_BACKEND=numpy`` (or ``numba``) forces a choice;
by default the jitted path is used when numba imports cleanly.
"""

import os

from . import _kernels_numpy

_requested = os.environ.get("FFSRQR_BACKEND", "").strip().lower()
if _requested not in ("", "numba", "numpy"):
    raise RuntimeError(
        f"FFSRQR_BACKEND must be 'numba' or 'numpy', got {_requested!r}"
    )

if _requested == "numpy":
    _impl = _kernels_numpy
    BACKEND = "numpy"
else:
    try:
        from . import _kernels_numba as _impl

        BACKEND = "numba"
    except ImportError:
        if _requested == "numba":
            raise
        _impl = _kernels_numpy
        BACKEND = "numpy"

qrcp_core = _impl.qrcp_core
qrnp_core = _impl.qrnp_core


def get_impl(name):
    """Return the kernel module for an explicit backend name (for benchmarks)."""
    if name == "numpy":
        return _kernels_numpy
    if name == "numba":
        from . import _kernels_numba

        return _kernels_numba
    raise ValueError(f"unknown backend {name!r}")
