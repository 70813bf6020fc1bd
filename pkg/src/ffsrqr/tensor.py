"""Tucker compression of dense tensors.

Tensors are plain numpy arrays stored first-index-fastest; mode-n
unfolding places mode n's fibers as columns in that same ordering, so
fold(unfold(X, n), n, X.shape) is the identity.  hosvd compresses every
mode against the original tensor; st_hosvd compresses modes one at a
time against the shrinking core, which is cheaper and usually as
accurate.  The per-mode factor matrices come from a pluggable low-rank
engine: exact truncated SVD, the flip-flop approximate SVD, subspace
iteration, or any callable with the same signature.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError
from .svd import flip_flop_srqr, rsisvd, truncated_svd_oracle


def unfold(X, mode):
    """Mode-n unfolding: rows index mode n, columns the remaining modes in
    Fortran order."""
    X = np.asarray(X)
    if not 0 <= mode < X.ndim:
        raise DimensionError(f"mode {mode} out of range for ndim {X.ndim}")
    return np.reshape(np.moveaxis(X, mode, 0), (X.shape[mode], -1), order="F")


def fold(M, mode, shape):
    """Inverse of unfold for a tensor of the given shape."""
    shape = tuple(shape)
    if not 0 <= mode < len(shape):
        raise DimensionError(f"mode {mode} out of range for shape {shape}")
    lead = (shape[mode],) + shape[:mode] + shape[mode + 1 :]
    if M.shape != (shape[mode], int(np.prod(shape)) // shape[mode]):
        raise DimensionError(f"unfolded shape {M.shape} does not match {shape}")
    return np.moveaxis(np.reshape(M, lead, order="F"), 0, mode)


def nmode_product(X, U, mode):
    """Tensor-times-matrix along one mode: contracts X's mode-`mode` index
    with U's second index."""
    X = np.asarray(X)
    U = np.asarray(U)
    if U.ndim != 2 or U.shape[1] != X.shape[mode]:
        raise DimensionError(
            f"matrix {U.shape} cannot contract mode {mode} of tensor {X.shape}"
        )
    shape = list(X.shape)
    shape[mode] = U.shape[0]
    return fold(U @ unfold(X, mode), mode, shape)


@dataclass
class TuckerDecomp:
    core: np.ndarray
    factors: list            # factors[n]: I_n x r_n, orthonormal columns
    flop_count: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def ranks(self):
        return tuple(U.shape[1] for U in self.factors)

    def reconstruct(self):
        G = self.core
        for n, U in enumerate(self.factors):
            G = nmode_product(G, U, n)
        return G


def _make_engine(engine, seed):
    if callable(engine):
        return engine
    if engine == "exact":
        return lambda M, r: truncated_svd_oracle(M, r)
    if engine == "flipflop":
        # Clamp working rank and sketch size so short-and-fat unfoldings
        # with few rows stay inside the factorization's shape limits.
        def _ff(M, r):
            m = M.shape[0]
            l = min(r + 5, min(M.shape) - 1)
            b = min(32, max(m - 5, 1))
            p = min(5, max(m - b, 0))
            return flip_flop_srqr(M, r, l=max(l, r), b=b, p=p, seed=seed)

        return _ff
    if engine == "rsisvd":
        return lambda M, r: rsisvd(M, r, seed=seed)
    raise ValueError(f"unknown low-rank engine {engine!r}")


def _check_ranks(shape, ranks):
    ranks = tuple(int(r) for r in ranks)
    if len(ranks) != len(shape):
        raise DimensionError(f"need one rank per mode: got {ranks} for {shape}")
    for r, s in zip(ranks, shape):
        if not 1 <= r <= s:
            raise DimensionError(f"rank {r} invalid for mode of size {s}")
    return ranks


def hosvd(X, ranks, engine="exact", seed=0):
    """Higher-order SVD: each factor from the unfolding of the original
    tensor, core formed at the end."""
    X = np.asarray(X, dtype=float)
    ranks = _check_ranks(X.shape, ranks)
    solve = _make_engine(engine, seed)
    factors = []
    fl = 0
    for n, r in enumerate(ranks):
        ap = solve(unfold(X, n), r)
        factors.append(ap.u)
        fl += ap.flop_count
    G = X
    for n, U in enumerate(factors):
        G = nmode_product(G, U.T, n)
    return TuckerDecomp(core=G, factors=factors, flop_count=fl,
                        meta={"engine": engine, "method": "hosvd"})


def st_hosvd(X, ranks, engine="exact", seed=0, order=None):
    """Sequentially truncated HOSVD: the core shrinks after every mode, so
    later unfoldings are cheaper.  Default order processes modes by
    increasing size."""
    X = np.asarray(X, dtype=float)
    ranks = _check_ranks(X.shape, ranks)
    solve = _make_engine(engine, seed)
    if order is None:
        order = sorted(range(X.ndim), key=lambda n: X.shape[n])
    else:
        order = list(order)
        if sorted(order) != list(range(X.ndim)):
            raise DimensionError(f"order {order} is not a permutation of the modes")
    factors = [None] * X.ndim
    G = X
    fl = 0
    for n in order:
        ap = solve(unfold(G, n), ranks[n])
        factors[n] = ap.u
        fl += ap.flop_count
        G = nmode_product(G, ap.u.T, n)
    return TuckerDecomp(core=G, factors=factors, flop_count=fl,
                        meta={"engine": engine, "method": "st_hosvd", "order": order})


def tucker_error(X, decomp):
    """Relative Frobenius reconstruction error."""
    X = np.asarray(X, dtype=float)
    nrm = np.linalg.norm(X)
    if nrm == 0.0:
        return 0.0
    return float(np.linalg.norm(X - decomp.reconstruct()) / nrm)
