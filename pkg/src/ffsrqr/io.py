"""Binary and text file formats.

DMAT: little-endian "DMAT" magic, u64 rows, u64 cols, then float64
payload in column-major order.  DTEN: "DTEN" magic, u64 order d, u64
dims[d], then float64 payload stored first-index-fastest.  Matrices can
also be imported from plain CSV (one row per line).  Observation sets
for matrix completion come as "i j value" text lines or 4-column
MovieLens-style ratings files.  An approximate SVD is saved as three
DMAT files plus a key=value sidecar.
"""

import os

import numpy as np

from .errors import DimensionError, NumericalError

_DMAT_MAGIC = b"DMAT"
_DTEN_MAGIC = b"DTEN"


def _check_finite(arr, what):
    if not np.all(np.isfinite(arr)):
        raise NumericalError(f"{what} contains non-finite values")


def write_dmat(path, A):
    A = np.asarray(A, dtype="<f8")
    if A.ndim != 2:
        raise DimensionError("write_dmat expects a matrix")
    _check_finite(A, "matrix")
    with open(path, "wb") as f:
        f.write(_DMAT_MAGIC)
        np.asarray(A.shape, dtype="<u8").tofile(f)
        A.T.reshape(-1).tofile(f)  # column-major payload


def read_dmat(path):
    with open(path, "rb") as f:
        if f.read(4) != _DMAT_MAGIC:
            raise NumericalError(f"{path}: not a DMAT file")
        rows, cols = np.fromfile(f, dtype="<u8", count=2)
        data = np.fromfile(f, dtype="<f8", count=rows * cols)
    if data.size != rows * cols:
        raise NumericalError(f"{path}: truncated DMAT payload")
    A = data.reshape(cols, rows).T.copy()
    _check_finite(A, path)
    return A


def write_dten(path, X):
    X = np.asarray(X, dtype="<f8")
    _check_finite(X, "tensor")
    with open(path, "wb") as f:
        f.write(_DTEN_MAGIC)
        np.asarray([X.ndim], dtype="<u8").tofile(f)
        np.asarray(X.shape, dtype="<u8").tofile(f)
        np.reshape(X, -1, order="F").tofile(f)  # first index fastest


def read_dten(path):
    with open(path, "rb") as f:
        if f.read(4) != _DTEN_MAGIC:
            raise NumericalError(f"{path}: not a DTEN file")
        d = int(np.fromfile(f, dtype="<u8", count=1)[0])
        dims = np.fromfile(f, dtype="<u8", count=d).astype(int)
        total = int(np.prod(dims))
        data = np.fromfile(f, dtype="<f8", count=total)
    if data.size != total:
        raise NumericalError(f"{path}: truncated DTEN payload")
    X = np.reshape(data, dims, order="F")
    _check_finite(X, path)
    return X


def read_csv_matrix(path):
    A = np.loadtxt(path, delimiter=",", ndmin=2, dtype=float)
    _check_finite(A, path)
    return A


def read_observations(path):
    """Text observations, one per line: "i j value" (0-based indices)."""
    data = np.loadtxt(path, ndmin=2, dtype=float)
    if data.shape[1] != 3:
        raise DimensionError(f"{path}: expected 3 columns (i j value)")
    rows = data[:, 0].astype(int)
    cols = data[:, 1].astype(int)
    vals = data[:, 2]
    _check_finite(vals, path)
    return rows, cols, vals


def read_ratings(path):
    """4-column ratings file (user item rating timestamp); the timestamp
    column is dropped and ids are shifted to 0-based."""
    data = np.loadtxt(path, ndmin=2, dtype=float)
    if data.shape[1] != 4:
        raise DimensionError(f"{path}: expected 4 columns (user item rating ts)")
    rows = data[:, 0].astype(int) - 1
    cols = data[:, 1].astype(int) - 1
    vals = data[:, 2]
    if rows.min() < 0 or cols.min() < 0:
        raise DimensionError(f"{path}: ids must be 1-based positive integers")
    _check_finite(vals, path)
    return rows, cols, vals


def observations_to_dense(rows, cols, vals, shape=None):
    """Dense matrix plus boolean mask from triplet observations."""
    if shape is None:
        shape = (int(rows.max()) + 1, int(cols.max()) + 1)
    M = np.zeros(shape)
    mask = np.zeros(shape, dtype=bool)
    M[rows, cols] = vals
    mask[rows, cols] = True
    return M, mask


def save_approx_svd(prefix, approx):
    """Write U, S (as a column), V as DMAT files plus a key=value sidecar."""
    write_dmat(prefix + ".u.dmat", approx.u)
    write_dmat(prefix + ".s.dmat", approx.s.reshape(-1, 1))
    write_dmat(prefix + ".v.dmat", approx.v)
    with open(prefix + ".meta", "w") as f:
        f.write(f"k={approx.k}\n")
        f.write(f"flop_count={approx.flop_count}\n")
        method = approx.meta.get("method", "")
        if method:
            f.write(f"method={method}\n")


def load_approx_svd(prefix):
    from .svd import ApproxSvd

    u = read_dmat(prefix + ".u.dmat")
    s = read_dmat(prefix + ".s.dmat").reshape(-1)
    v = read_dmat(prefix + ".v.dmat")
    meta = {}
    flop_count = 0
    if os.path.exists(prefix + ".meta"):
        with open(prefix + ".meta") as f:
            for line in f:
                line = line.strip()
                if not line or "=" not in line:
                    continue
                key, val = line.split("=", 1)
                if key == "flop_count":
                    flop_count = int(val)
                elif key != "k":
                    meta[key] = val
    return ApproxSvd(u=u, s=s, v=v, flop_count=flop_count, meta=meta)
