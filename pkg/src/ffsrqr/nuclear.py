"""Nuclear-norm minimization by the inexact augmented Lagrange multiplier
method.

ialm_rpca splits a matrix into low-rank plus sparse parts; ialm_mc
recovers a low-rank matrix from partial observations.  Each iteration
singular-value-shrinks the residual, so the dominant cost is a partial
SVD; the `svd_engine` argument swaps the exact LAPACK SVD for the
approximate flip-flop or subspace-iteration solvers.  The retained rank
grows adaptively: start small and expand while the smallest kept
singular value still clears the shrinkage threshold.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, NumericalError
from .svd import flip_flop_srqr, rsisvd


def soft_shrink(X, tau):
    """Entrywise soft-thresholding: sign(x) * max(|x| - tau, 0)."""
    return np.sign(X) * np.maximum(np.abs(X) - tau, 0.0)


@dataclass
class IalmParams:
    lam: float = None         # sparsity weight; default 1/sqrt(max(m, n))
    mu0: float = None         # initial penalty; default 1.25/||M||_2
    mu_bar: float = None      # penalty cap; default mu0 * 1e7
    rho: float = 1.5          # penalty growth factor
    tol: float = 1e-7         # relative feasibility tolerance
    max_iter: int = 100
    sv0: int = 10             # initial retained rank for the partial SVD
    svd_engine: str = "exact"  # exact | flipflop | rsisvd
    seed: int = 0


@dataclass
class IalmState:
    low_rank: np.ndarray
    sparse: np.ndarray
    rank: int
    iterations: int
    converged: bool
    residuals: list = field(default_factory=list)
    ranks: list = field(default_factory=list)
    mus: list = field(default_factory=list)
    iterates: list = field(default_factory=list)   # populated on request only


class _PartialSvd:
    """Partial SVD with adaptive retained rank."""

    def __init__(self, engine, seed, min_dim):
        self.engine = engine
        self.seed = seed
        self.min_dim = min_dim
        # Approximate engines need headroom beyond the target rank.
        self.cap = min_dim if engine == "exact" else max(min_dim - 1, 1)

    def __call__(self, M, sv):
        sv = min(sv, self.cap)
        if self.engine == "exact" or sv >= self.min_dim:
            U, s, Vt = np.linalg.svd(M, full_matrices=False)
            return U[:, :sv], s[:sv], Vt[:sv].T
        if self.engine == "flipflop":
            # Work well past the target rank: the solver needs singular
            # values near the shrinkage threshold resolved accurately,
            # otherwise the approximation error re-enters through the
            # multiplier and stalls convergence.  srqr needs l < min_dim.
            l = min(sv + 60, self.min_dim - 1)
            ap = flip_flop_srqr(M, sv, l=l, seed=self.seed)
        elif self.engine == "rsisvd":
            ap = rsisvd(M, sv, seed=self.seed)
        else:
            raise ValueError(f"unknown svd engine {self.engine!r}")
        return ap.u, ap.s, ap.v


def _grow_sv(rank, sv, min_dim):
    """Next retained rank: +5 while every kept singular value cleared the
    shrinkage threshold, scaling to x1.1 growth past 50; otherwise settle
    just above the observed rank."""
    if rank < sv:
        return min(rank + 1, min_dim)
    nxt = sv + 5 if sv <= 50 else int(round(1.1 * sv))
    return min(nxt, min_dim)


def _shrink_spectrum(psvd, M, sv, mu):
    U, s, V = psvd(M, sv)
    keep = int(np.count_nonzero(s > 1.0 / mu))
    if keep == 0:
        return np.zeros_like(M), 0
    X = (U[:, :keep] * (s[:keep] - 1.0 / mu)) @ V[:, :keep].T
    return X, keep


def _j_norm(M, norm2):
    """max(||M||_2, ||M||_max): scale for the initial multiplier."""
    return max(norm2, float(np.max(np.abs(M))))


def ialm_rpca(M, params=None, record_iterates=False):
    """Robust principal component analysis: M = low_rank + sparse."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise DimensionError("ialm_rpca expects a matrix")
    if not np.all(np.isfinite(M)):
        raise NumericalError("ialm_rpca input contains non-finite entries")
    p = params or IalmParams()
    m, n = M.shape
    lam = p.lam if p.lam is not None else 1.0 / np.sqrt(max(m, n))
    normF = np.linalg.norm(M)
    if normF == 0.0:
        return IalmState(np.zeros_like(M), np.zeros_like(M), 0, 0, True)
    norm2 = np.linalg.svd(M, compute_uv=False)[0]
    mu = p.mu0 if p.mu0 is not None else 1.25 / norm2
    mu_bar = p.mu_bar if p.mu_bar is not None else mu * 1e7

    Y = M / _j_norm(M, norm2)
    E = np.zeros_like(M)
    psvd = _PartialSvd(p.svd_engine, p.seed, min(m, n))
    sv = min(p.sv0, min(m, n))
    st = IalmState(np.zeros_like(M), E, 0, 0, False)

    for it in range(1, p.max_iter + 1):
        X, rank = _shrink_spectrum(psvd, M - E + Y / mu, sv, mu)
        sv = _grow_sv(rank, sv, min(m, n))
        E = soft_shrink(M - X + Y / mu, lam / mu)
        Z = M - X - E
        Y = Y + mu * Z
        st.mus.append(mu)
        mu = min(p.rho * mu, mu_bar)
        res = float(np.linalg.norm(Z) / normF)
        st.residuals.append(res)
        st.ranks.append(rank)
        if record_iterates:
            st.iterates.append((X.copy(), E.copy()))
        st.low_rank, st.sparse, st.rank, st.iterations = X, E, rank, it
        if res < p.tol:
            st.converged = True
            break
    return st


def ialm_mc(M, mask, params=None, record_iterates=False):
    """Matrix completion: recover a low-rank matrix agreeing with the
    observed entries (mask is True where M is observed)."""
    M = np.asarray(M, dtype=float)
    mask = np.asarray(mask, dtype=bool)
    if M.shape != mask.shape or M.ndim != 2:
        raise DimensionError("ialm_mc needs a matrix and a same-shaped mask")
    M = np.where(mask, M, 0.0)
    if not np.all(np.isfinite(M)):
        raise NumericalError("ialm_mc observed entries contain non-finite values")
    p = params or IalmParams()
    m, n = M.shape
    norm2 = np.linalg.svd(M, compute_uv=False)[0]
    if norm2 == 0.0:
        return IalmState(np.zeros_like(M), np.zeros_like(M), 0, 0, True)
    mu = p.mu0 if p.mu0 is not None else 1.25 / norm2
    mu_bar = p.mu_bar if p.mu_bar is not None else mu * 1e7
    normF = np.linalg.norm(M)

    Y = np.zeros_like(M)
    E = np.zeros_like(M)
    psvd = _PartialSvd(p.svd_engine, p.seed, min(m, n))
    sv = min(p.sv0, min(m, n))
    st = IalmState(np.zeros_like(M), E, 0, 0, False)

    for it in range(1, p.max_iter + 1):
        X, rank = _shrink_spectrum(psvd, M - E + Y / mu, sv, mu)
        sv = _grow_sv(rank, sv, min(m, n))
        # The slack absorbs disagreement only on unobserved entries.
        E = np.where(mask, 0.0, M - X + Y / mu)
        Z = M - X - E
        Y = Y + mu * Z
        st.mus.append(mu)
        mu = min(p.rho * mu, mu_bar)
        res = float(np.linalg.norm(Z) / normF)
        st.residuals.append(res)
        st.ranks.append(rank)
        if record_iterates:
            st.iterates.append((X.copy(), E.copy()))
        st.low_rank, st.sparse, st.rank, st.iterations = X, E, rank, it
        if res < p.tol:
            st.converged = True
            break
    return st


def nmae(truth, predicted, mask, lo, hi):
    """Mean absolute error over the masked entries, normalized by the
    rating range."""
    mask = np.asarray(mask, dtype=bool)
    cnt = int(mask.sum())
    if cnt == 0:
        raise DimensionError("nmae needs at least one evaluation entry")
    if hi <= lo:
        raise DimensionError("nmae needs hi > lo")
    err = np.abs(np.asarray(truth, dtype=float) - np.asarray(predicted, dtype=float))
    return float(err[mask].sum() / (cnt * (hi - lo)))
