"""End-to-end acceptance suite.

Each test prints a single PASS/FAIL line naming the guarantee it checks,
then asserts it.  The tolerances here are the package's contract; they
must not be loosened.
"""

import csv
import time

import numpy as np
import scipy.linalg

from ffsrqr.cli import main as cli_main
from ffsrqr.generators import (
    gen_mc_instance,
    gen_rpca_instance,
    gen_sparse_tensor,
    gen_type1,
    kahan,
)
from ffsrqr.io import write_dmat
from ffsrqr.nuclear import IalmParams, ialm_mc, ialm_rpca, nmae
from ffsrqr.qr import partial_qrcp
from ffsrqr.sketch import SketchParams, trqrcp
from ffsrqr.srqr import srqr
from ffsrqr.svd import (
    check_theorem_bounds,
    flip_flop_flop_formula,
    flip_flop_srqr,
    rsisvd,
    rsisvd_flop_formula,
    truncated_svd_oracle,
)
from ffsrqr.tensor import fold, nmode_product, st_hosvd, tucker_error, unfold


def _verdict(label, ok):
    print(f"[{'PASS' if ok else 'FAIL'}] {label}")
    assert ok, label


def _exact_g2(rtilde):
    inv = scipy.linalg.solve_triangular(rtilde, np.eye(rtilde.shape[0]))
    return abs(rtilde[-1, -1]) * np.sqrt(np.max(np.sum(inv * inv, axis=1)))


def test_01_factorization_invariants():
    # 50 random matrices over 10 seeds, dims up to 400: every factorizer
    # returns an orthonormal basis (<= 1e-12 sqrt(m)) and reconstructs the
    # leading pivoted columns to <= 1e-10 ||A||_F, inside 60 seconds.
    t0 = time.monotonic()
    ok = True
    for seed in range(10):
        g = np.random.default_rng(seed)
        for _ in range(5):
            m = int(g.integers(30, 401))
            n = int(g.integers(30, 401))
            k = int(g.integers(5, min(25, min(m, n) - 5)))
            A = g.standard_normal((m, n))
            normA = np.linalg.norm(A)
            facts = [
                partial_qrcp(A, k),
                trqrcp(A, SketchParams(k=k, b=8, p=4, seed=seed)),
                srqr(A, SketchParams(k=k, l=k, b=8, p=4, seed=seed)).fact,
            ]
            for f in facts:
                Q = f.q()
                r = Q.shape[1]
                ok &= float(np.max(np.abs(Q.T @ Q - np.eye(r)))) <= 1e-12 * np.sqrt(m)
                ok &= float(f.reconstruction_error(A)) <= 1e-10 * normA
    elapsed = time.monotonic() - t0
    ok &= elapsed <= 60.0
    _verdict(f"1 factorization invariants (50 matrices, {elapsed:.1f}s)", ok)


def test_02_srqr_certification():
    # Kahan(96, 1.2) plus 20 random instances at l = 20: the finishing
    # quality ratios satisfy exact g2 <= 1.5*g (g = 2) and
    # g1 <= sqrt((1+eps)/(1-eps)) at eps = 1/2, within 50*l swaps.
    ok = True
    l = 20
    g1_cap = np.sqrt((1 + 0.5) / (1 - 0.5))

    def check(A, seed):
        res = srqr(A, SketchParams(k=l, l=l, b=8, p=4, g=2.0, epsilon=0.5,
                                   seed=seed))
        good = _exact_g2(res.rtilde) <= 1.5 * 2.0
        good &= res.cert.g1 <= g1_cap + 1e-12
        good &= res.cert.swaps <= 50 * l
        return good

    ok &= check(kahan(96, 1.2), seed=0)
    for seed in range(20):
        g = np.random.default_rng(1000 + seed)
        A = g.standard_normal((120, 100))
        ok &= check(A, seed)
    _verdict("2 swap-loop certification (Kahan + 20 random)", ok)


def test_03_singular_value_bounds():
    # On 20 planted-spectrum 300x300 instances (100 planted values,
    # k = 20, l = 25) every a-posteriori singular-value and residual bound
    # holds with 1e-8 relative slack, zero violations.
    violations = 0
    for seed in range(20):
        A = gen_type1(300, 300, 100, seed=seed)
        ap = flip_flop_srqr(A, 20, l=25, seed=seed)
        rep = check_theorem_bounds(A, ap, slack=1e-8)
        if not rep.all_ok:
            violations += 1
    _verdict(f"3 singular-value bound suite ({violations} violations)",
             violations == 0)


def test_04_accuracy_parity():
    # 300x300 planted spectrum: the approximate SVD's Frobenius error is
    # within 1.1x the exact truncated SVD at every k, its top-k singular
    # values within 5%, and subspace iteration within 1.1x of it.
    ok = True
    A = gen_type1(300, 300, 100, seed=0)
    exact = np.linalg.svd(A, compute_uv=False)
    for k in (10, 20, 30, 40):
        ff = flip_flop_srqr(A, k, l=k + 5, seed=0)
        oracle = truncated_svd_oracle(A, k)
        e_ff = ff.error(A)
        ok &= e_ff <= 1.1 * oracle.error(A)
        ok &= float(np.max(np.abs(ff.s - exact[:k]) / exact[:k])) <= 0.05
        rs = rsisvd(A, k, p=5, q=1, seed=0)
        ok &= rs.error(A) <= 1.1 * e_ff
    _verdict("4 accuracy parity (flip-flop vs oracle vs subspace iteration)", ok)


def test_05_column_partition_inequality():
    # sigma_j(X)^2 <= sigma_j(X1)^2 + ||X2||_2^2 over 50 random column
    # partitions, additive slack 1e-10.
    g = np.random.default_rng(5)
    ok = True
    for _ in range(50):
        m = int(g.integers(10, 60))
        n = int(g.integers(4, 60))
        X = g.standard_normal((m, n))
        n1 = int(g.integers(1, n)) if n > 1 else 1
        s = np.linalg.svd(X, compute_uv=False)
        s1 = np.linalg.svd(X[:, :n1], compute_uv=False)
        X2 = X[:, n1:]
        t2 = np.linalg.norm(X2, 2) ** 2 if X2.size else 0.0
        for j in range(len(s1)):
            ok &= s[j] ** 2 <= s1[j] ** 2 + t2 + 1e-10
    _verdict("5 column-partition singular-value inequality (50 splits)", ok)


def test_06_flop_counters():
    # At 1000x1000 with working rank 30 the instrumented flop counters sit
    # within 15% of the closed-form leading-order costs.
    A = gen_type1(1000, 1000, 100, seed=0)
    ff = flip_flop_srqr(A, 25, l=30, b=32, p=5, seed=0)
    f_ff = flip_flop_flop_formula(1000, 1000, 30, 32, 5)
    rs = rsisvd(A, 30, p=5, q=2, seed=0)
    f_rs = rsisvd_flop_formula(1000, 1000, 30, 5, 2)
    ok = abs(ff.flop_count - f_ff) <= 0.15 * f_ff
    ok &= abs(rs.flop_count - f_rs) <= 0.15 * f_rs
    _verdict(f"6 flop counters (ratios {ff.flop_count / f_ff:.3f}, "
             f"{rs.flop_count / f_rs:.3f})", ok)


def test_07_tensor_suite():
    # Unfold/fold/mode-product identities are exact; full-rank compression
    # reconstructs to 1e-10; on a 100^3 sparse low-rank tensor the
    # flip-flop engine stays within 1.05x the exact engine. Under 120 s.
    t0 = time.monotonic()
    g = np.random.default_rng(7)
    X = g.standard_normal((6, 7, 8))
    ok = all(np.array_equal(fold(unfold(X, mode), mode, X.shape), X)
             for mode in range(3))
    U = g.standard_normal((4, 7))
    ok &= bool(np.allclose(nmode_product(X, U, 1),
                           np.einsum("ijk,rj->irk", X, U), atol=1e-13))
    ok &= tucker_error(X, st_hosvd(X, X.shape)) <= 1e-10

    T = gen_sparse_tensor(100, seed=0)
    e_exact = tucker_error(T, st_hosvd(T, (10, 10, 10), engine="exact"))
    e_ff = tucker_error(T, st_hosvd(T, (10, 10, 10), engine="flipflop", seed=0))
    ok &= e_ff <= 1.05 * e_exact
    elapsed = time.monotonic() - t0
    ok &= elapsed <= 120.0
    _verdict(f"7 tensor suite (flip-flop/exact error {e_ff / e_exact:.4f}, "
             f"{elapsed:.1f}s)", ok)


def test_08_robust_pca():
    # 400x400, planted rank 40, 5% outliers, lam = 1/20: the flip-flop
    # engine recovers the low-rank part to 1e-5 relative error within 40
    # iterations, the penalty parameter follows mu <- min(rho*mu, mu_bar)
    # on every iterate, and on completion problems the slack variable is
    # exactly zero on observed entries at every iterate.
    M, Xstar, _ = gen_rpca_instance(400, 400, 40, 0.05, seed=0)
    p = IalmParams(lam=1.0 / 20.0, max_iter=40, svd_engine="flipflop", seed=0)
    st = ialm_rpca(M, p, record_iterates=True)
    err = float(np.linalg.norm(st.low_rank - Xstar) / np.linalg.norm(Xstar))
    ok = st.converged and st.iterations <= 40 and err <= 1e-5
    mu_bar = st.mus[0] * 1e7
    for a, b in zip(st.mus, st.mus[1:]):
        ok &= abs(b - min(p.rho * a, mu_bar)) <= 1e-12 * b
    L, mask = gen_mc_instance(120, 120, 4, 0.5, seed=0)
    mc = ialm_mc(L, mask, IalmParams(svd_engine="flipflop", seed=0),
                 record_iterates=True)
    for _, E in mc.iterates:
        ok &= bool(np.all(E[mask] == 0.0))
    _verdict(f"8 robust PCA (error {err:.2e} in {st.iterations} iterations)", ok)


def test_09_matrix_completion():
    # Rank-5 200x200 with half the entries observed: held-out relative
    # error <= 1e-3, and the normalized-MAE metric passes its 0 / 1 / 0.2
    # self-tests.
    L, mask = gen_mc_instance(200, 200, 5, 0.5, seed=0)
    st = ialm_mc(L, mask)
    held = ~mask
    err = float(np.linalg.norm((st.low_rank - L)[held]) / np.linalg.norm(L[held]))
    ok = err <= 1e-3

    T = np.arange(16.0).reshape(4, 4)
    full = np.ones((4, 4), dtype=bool)
    ok &= nmae(T, T, full, 0, 15) == 0.0
    ok &= abs(nmae(np.full((4, 4), 10.0), np.zeros((4, 4)), full, 0, 10) - 1.0) <= 1e-15
    two = np.zeros((4, 4), dtype=bool)
    two[0, 0] = two[0, 1] = True
    pred = np.zeros((4, 4))
    pred[0, 0], pred[0, 1] = 1.0, 3.0   # errors 1 and 3 over range 10 -> 0.2
    ok &= abs(nmae(np.zeros((4, 4)), pred, two, 0, 10) - 0.2) <= 1e-15
    _verdict(f"9 matrix completion (held-out error {err:.2e})", ok)


def test_10_cli_determinism(tmp_path):
    # Fixed-seed CLI runs produce byte-identical CSV once the runtime
    # column is dropped.
    def rows_no_runtime(path):
        with open(path, newline="") as f:
            rows = list(csv.reader(f))
        i = rows[0].index("runtime_s")
        return [r[:i] + r[i + 1:] for r in rows]

    ok = True
    A = gen_type1(100, 80, 40, seed=0)
    mat = str(tmp_path / "a.dmat")
    write_dmat(mat, A)
    for args in (
        ["svd", "--in", mat, "--k", "10", "--seed", "3"],
        ["bench", "--kind", "svd-accuracy", "--m", "80", "--n", "80",
         "--s", "40", "--ks", "5,10,20", "--seed", "3"],
        ["bench", "--kind", "rpca", "--m", "60", "--n", "60", "--rank", "4",
         "--seed", "3", "--methods", "exact,flipflop"],
    ):
        a, b = str(tmp_path / "r1.csv"), str(tmp_path / "r2.csv")
        ok &= cli_main(args + ["--out", a]) == 0
        ok &= cli_main(args + ["--out", b]) == 0
        ok &= rows_no_runtime(a) == rows_no_runtime(b)
    _verdict("10 CLI determinism (fixed seed, runtime column excluded)", ok)
