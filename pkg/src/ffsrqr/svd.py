"""Approximate truncated SVD built on spectrum-revealing QR.

flip_flop_srqr: factor A*P ~ Q1 [R11 R12], QR-factor the stacked block
(R11 R12)^T without pivoting, run a small dense SVD on A*P*Qhat1, then
map the factors back.  rsisvd: randomized subspace iteration baseline.
check_theorem_bounds evaluates the singular-value and residual quality
ratios of a certified factorization against their closed-form budgets.
"""

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import flops, rng
from .errors import DimensionError
from .qr import _taus_to_wy
from .backend import qrnp_core
from .sketch import SketchParams
from .srqr import SrqrResult, srqr


@dataclass
class ApproxSvd:
    u: np.ndarray       # m x k, orthonormal columns
    s: np.ndarray       # k, nonincreasing, nonnegative
    v: np.ndarray       # n x k, orthonormal columns
    flop_count: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def k(self):
        return self.s.shape[0]

    def matrix(self):
        return (self.u * self.s) @ self.v.T

    def error(self, A):
        return float(np.linalg.norm(A - self.matrix()))


def flip_flop_srqr(A, k, l=None, b=32, p=5, epsilon=0.5, g=2.0, d=None, seed=0):
    """Rank-k approximate SVD via spectrum-revealing QR plus a flipped QR.

    Returns an ApproxSvd whose meta carries the certificate and the
    SRQR result for bound checking.
    """
    A = np.asarray(A, dtype=float)
    m, n = A.shape
    # Clamp the sketch size for small matrices; compression only needs
    # b + p <= m.
    if b + p > m:
        b = max(1, m - p)
        p = m - b
    params = SketchParams(k=k, l=l, b=b, p=p, epsilon=epsilon, g=g, d=d, seed=seed)
    params = params.resolve(m, n)
    l = params.l

    flops.reset()
    res = srqr(A, params)
    R = res.fact.R                      # l x n
    perm = res.fact.perm

    # QR without pivoting of [R11 R12]^T; its Q maps the row space of R
    # onto the leading l coordinates.
    Rt = np.asfortranarray(R.T)         # n x l
    taus, fl = qrnp_core(Rt, l)
    flops.add(int(fl))
    wy = _taus_to_wy(Rt, taus, l)

    # tmp = (A P) Qhat1 at cost 2mnl via the compact WY form:
    # tmp = Ap[:, :l] - (Ap Y)(T Y[:l, :]^T).
    Ap = A[:, perm]
    AY = flops.mm(Ap, wy.Y)
    tmp = Ap[:, :l] - flops.mm(AY, wy.T @ wy.Y[:l, :].T)
    flops.add(2 * l * l * l)

    Ut, s, Vtt = np.linalg.svd(tmp, full_matrices=False)
    flops.add(flops.count_svd(m, l))

    u = Ut[:, :k]
    sk = s[:k].copy()
    # Right factor: embed Vt's leading k columns into R^n and apply Qhat.
    W = np.zeros((n, k))
    W[:l, :] = Vtt.T[:, :k]
    W = wy.apply_left(W)
    flops.add(4 * n * l * k)
    v = np.zeros((n, k))
    v[perm, :] = W

    return ApproxSvd(
        u=u,
        s=sk,
        v=v,
        flop_count=flops.total(),
        meta={"srqr": res, "params": params, "method": "flip_flop_srqr"},
    )


def rsisvd(A, k, p=5, q=2, seed=0):
    """Randomized subspace iteration SVD baseline (rank k, q power steps)."""
    A = np.asarray(A, dtype=float)
    m, n = A.shape
    if not 1 <= k <= min(m, n):
        raise DimensionError(f"rsisvd needs 1 <= k <= min(m,n); got k={k}")
    if p < 0 or q < 0:
        raise DimensionError("rsisvd needs p >= 0 and q >= 0")
    r = min(k + p, min(m, n))

    flops.reset()
    omega = rng.gaussian(n, r, seed, rng.STREAM_RSISVD)
    Y = flops.mm(A, omega)
    Q, _ = np.linalg.qr(Y)
    flops.add(flops.count_qr_thin(m, r))
    for _ in range(q):
        Z = flops.mm(A.T, Q)
        Q, _ = np.linalg.qr(Z)
        flops.add(flops.count_qr_thin(n, r))
        Y = flops.mm(A, Q)
        Q, _ = np.linalg.qr(Y)
        flops.add(flops.count_qr_thin(m, r))
    B = flops.mm(Q.T, A)
    Ub, s, Vt = np.linalg.svd(B, full_matrices=False)
    flops.add(flops.count_svd(r, n))
    u = flops.mm(Q, Ub[:, :k])
    return ApproxSvd(
        u=u,
        s=s[:k].copy(),
        v=Vt[:k].T.copy(),
        flop_count=flops.total(),
        meta={"method": "rsisvd", "q": q, "p": p},
    )


def truncated_svd_oracle(A, k):
    """Exact rank-k truncated SVD by dense LAPACK; small/medium matrices only."""
    A = np.asarray(A, dtype=float)
    if min(A.shape) > 2000:
        raise DimensionError("truncated_svd_oracle is limited to min(m,n) <= 2000")
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    return ApproxSvd(u=U[:, :k].copy(), s=s[:k].copy(), v=Vt[:k].T.copy(),
                     meta={"method": "exact"})


def _max_row_norm_of_inverse(T):
    """Largest column 2-norm of T^-T for upper-triangular T, solved exactly."""
    inv = scipy.linalg.solve_triangular(T, np.eye(T.shape[0]))
    return float(np.sqrt(np.max(np.einsum("ij,ij->i", inv, inv))))


@dataclass
class BoundReport:
    k: int
    l: int
    tau: float
    tau_hat: float
    sigma_exact: np.ndarray
    sigma_approx: np.ndarray
    aux_lower_ok: bool     # sigma_j(approx) within the residual-norm budget below exact
    sv_lower_ok: bool      # sigma_j(approx) within the tau/tau-hat budget below exact
    sv_upper_ok: bool      # sigma_j(approx) never exceeds exact (with slack)
    aux_residual_ok: bool  # rank-k error within the residual-norm budget
    residual_ok: bool      # rank-k error within the tau budget
    degenerate: bool       # sigma_{l+1}(A) == 0: ratios undefined, trivially ok
    detail: dict = field(default_factory=dict)

    @property
    def all_ok(self):
        return (self.aux_lower_ok and self.sv_lower_ok and self.sv_upper_ok
                and self.aux_residual_ok and self.residual_ok)


def check_theorem_bounds(A, approx, slack=1e-8):
    """Verify the spectrum-revealing quality guarantees on a flip-flop result.

    The quality constants tau and tau-hat are recomputed exactly from the
    factorization (triangular inverses and the true residual block), then
    four inequalities are checked: two singular-value lower bounds (the
    raw residual-norm form and the tau/tau-hat form), the trivial upper
    bound, and two matching bounds on the rank-k approximation error.
    A relative slack absorbs floating-point noise.
    """
    A = np.asarray(A, dtype=float)
    m, n = A.shape
    res: SrqrResult = approx.meta["srqr"]
    k = approx.k
    l = res.fact.k

    sig = np.linalg.svd(A, compute_uv=False)
    sig_l1 = float(sig[l]) if l < sig.size else 0.0
    sig_k1 = float(sig[k]) if k < sig.size else 0.0
    sk = approx.s

    alpha_ext = abs(float(res.rtilde[l, l]))
    if sig_l1 <= 1e-12 * max(float(sig[0]), 1e-300) or alpha_ext == 0.0:
        # Trailing spectrum numerically zero: the ratios are undefined and
        # the approximation is exact up to roundoff.
        ok = np.all(sk <= sig[:k] * (1 + slack))
        return BoundReport(
            k=k, l=l, tau=0.0, tau_hat=0.0, sigma_exact=sig[:k].copy(),
            sigma_approx=sk.copy(), aux_lower_ok=True, sv_lower_ok=True,
            sv_upper_ok=bool(ok), aux_residual_ok=True, residual_ok=True,
            degenerate=True,
        )

    # Exact residual block: M = A P - Q1 R has only trailing-column mass.
    M = A[:, res.fact.perm] - res.fact.q() @ res.fact.R
    r22_2 = float(scipy.linalg.svdvals(M)[0])
    r22_12 = math.sqrt(float(np.max(np.einsum("ij,ij->j", M, M))))
    alpha = abs(float(res.rtilde[l, l]))

    # Exact g1, g2 from their definitions (not the randomized certificate).
    inv_rt = _max_row_norm_of_inverse(res.rtilde)
    inv_r11 = _max_row_norm_of_inverse(res.fact.R[:l, :l])
    g1 = r22_12 / alpha
    g2 = alpha * inv_rt
    sig_k_hat = float(sk[k - 1])

    tau = g1 * g2 * (r22_2 / r22_12) * (1.0 / inv_rt) / sig_l1
    tau_hat = g1 * g2 * (r22_2 / r22_12) * (1.0 / inv_r11) / sig_k_hat

    up = 1 + slack
    dn = 1 - slack
    upper = bool(np.all(sk <= sig[:k] * up))

    aux_denom = np.power(1.0 + 2.0 * r22_2 ** 4 / sk ** 4, 0.25)
    aux_lower = bool(np.all(sk >= sig[:k] / aux_denom * dn))

    cap = np.minimum(
        2.0 * tau_hat ** 4,
        tau ** 4 * (2.0 + 4.0 * tau_hat ** 4) * (sig_l1 / sig[:k]) ** 4,
    )
    lower = bool(np.all(sk >= sig[:k] / np.power(1.0 + cap, 0.25) * dn))

    resid2 = float(scipy.linalg.svdvals(A - approx.matrix())[0])
    aux_budget = sig_k1 * (1.0 + 2.0 * (r22_2 / sig_k1) ** 4) ** 0.25 \
        if sig_k1 > 0 else resid2
    budget2 = sig_k1 * (1.0 + 2.0 * tau ** 4 * (sig_l1 / sig_k1) ** 4) ** 0.25 \
        if sig_k1 > 0 else resid2
    aux_residual_ok = resid2 <= aux_budget * up
    residual_ok = resid2 <= budget2 * up

    return BoundReport(
        k=k, l=l, tau=tau, tau_hat=tau_hat,
        sigma_exact=sig[:k].copy(), sigma_approx=sk.copy(),
        aux_lower_ok=aux_lower, sv_lower_ok=lower, sv_upper_ok=upper,
        aux_residual_ok=bool(aux_residual_ok), residual_ok=bool(residual_ok),
        degenerate=False,
        detail={
            "g1": g1, "g2": g2,
            "r22_2": r22_2, "r22_12": r22_12, "sigma_l1": sig_l1,
            "resid2": resid2, "aux_budget": aux_budget, "budget2": budget2,
        },
    )


def flip_flop_flop_formula(m, n, l, b, p):
    """Leading-order flop budget for the flip-flop path."""
    return 4 * m * n * l + 2 * (b + p) * m * n


def rsisvd_flop_formula(m, n, k, p, q):
    """Leading-order flop budget for subspace iteration."""
    return (4 * q + 4) * m * n * (k + p)
