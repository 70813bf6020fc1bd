"""Command-line interface and experiment harness.

Verbs: svd, tensor, rpca, complete (solve one instance and optionally
write artifacts), and bench (run a configured experiment sweep to CSV).
Global flags --seed/--config/--out/--format apply to every verb; a
config file holds key=value lines that preset any long option.  Exit
codes: 0 success, 2 configuration error, 3 numerical failure.
"""

import argparse
import csv
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import generators, io, nuclear, tensor
from .backend import BACKEND, get_impl
from .errors import CertificationError, DimensionError, NumericalError
from .svd import flip_flop_srqr, rsisvd, truncated_svd_oracle

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

_SIGMA_COLS = 20

CSV_COLUMNS = (
    ["kind", "method", "k", "rel_error", "flop_count", "iterations", "sv_count",
     "status"]
    + [f"sigma_{j}" for j in range(1, _SIGMA_COLS + 1)]
    + ["runtime_s"]
)


@dataclass
class ResultRecord:
    kind: str
    method: str
    k: int
    rel_error: float = float("nan")
    flop_count: int = 0
    iterations: int = 0
    sv_count: int = 0
    status: str = "ok"
    sigmas: np.ndarray = field(default_factory=lambda: np.zeros(0))
    runtime_s: float = 0.0

    def row(self):
        sig = ["" for _ in range(_SIGMA_COLS)]
        for j, v in enumerate(self.sigmas[:_SIGMA_COLS]):
            sig[j] = repr(float(v))
        return ([self.kind, self.method, self.k, repr(float(self.rel_error)),
                 self.flop_count, self.iterations, self.sv_count, self.status]
                + sig + [f"{self.runtime_s:.6f}"])


@dataclass
class ExperimentConfig:
    kind: str = "svd-accuracy"
    m: int = 200
    n: int = 200
    s: int = 100
    seed: int = 0
    sparsity: float = 0.05
    rank: int = 40
    observe_frac: float = 0.5
    tensor_n: int = 20
    ranks: tuple = (10, 10, 10)
    ks: tuple = (5, 10, 15, 20, 25, 30, 35, 40, 45, 50)
    methods: tuple = ("flipflop", "rsisvd", "exact")
    out: str = None
    parallel: bool = False

    KINDS = ("svd-accuracy", "sv-tracking", "tensor", "rpca", "completion",
             "backends")

    def validate(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        for meth in self.methods:
            if meth not in ("flipflop", "rsisvd", "exact"):
                raise ValueError(f"unknown method {meth!r}")
        return self


def _solve_one(method, A, k, seed):
    if method == "flipflop":
        return flip_flop_srqr(A, k, l=min(k + 5, min(A.shape) - 1), seed=seed)
    if method == "rsisvd":
        return rsisvd(A, k, p=5, q=1, seed=seed)
    return truncated_svd_oracle(A, k)


def _svd_cell(kind, A, normA, method, k, seed):
    t0 = time.monotonic()
    try:
        ap = _solve_one(method, A, k, seed)
    except Exception as exc:  # failures become rows, the sweep continues
        return ResultRecord(kind=kind, method=method, k=k, status=type(exc).__name__,
                            runtime_s=time.monotonic() - t0)
    rec = ResultRecord(
        kind=kind, method=method, k=k,
        rel_error=ap.error(A) / normA,
        flop_count=ap.flop_count, sv_count=ap.k, sigmas=ap.s,
        runtime_s=time.monotonic() - t0,
    )
    return rec


def _pool_size():
    env = os.environ.get("SRQR_THREADS", "")
    if env.strip():
        return max(1, int(env))
    return os.cpu_count() or 1


def run_experiment(cfg):
    """Execute one experiment sweep; returns the list of ResultRecords."""
    cfg.validate()
    records = []

    if cfg.kind in ("svd-accuracy", "sv-tracking"):
        A = generators.gen_type1(cfg.m, cfg.n, cfg.s, seed=cfg.seed)
        normA = np.linalg.norm(A)
        ks = cfg.ks if cfg.kind == "svd-accuracy" else (min(20, min(cfg.m, cfg.n)),)
        cells = [(cfg.kind, A, normA, meth, k, cfg.seed)
                 for meth in cfg.methods for k in ks]
        if cfg.parallel:
            with ThreadPoolExecutor(max_workers=_pool_size()) as pool:
                records = list(pool.map(lambda c: _svd_cell(*c), cells))
        else:
            records = [_svd_cell(*c) for c in cells]

    elif cfg.kind == "tensor":
        X = generators.gen_sparse_tensor(cfg.tensor_n, seed=cfg.seed)
        for meth in cfg.methods:
            t0 = time.monotonic()
            try:
                dec = tensor.st_hosvd(X, cfg.ranks, engine=meth, seed=cfg.seed)
                err = tensor.tucker_error(X, dec)
                records.append(ResultRecord(
                    kind=cfg.kind, method=meth, k=max(cfg.ranks), rel_error=err,
                    flop_count=dec.flop_count, runtime_s=time.monotonic() - t0))
            except Exception as exc:
                records.append(ResultRecord(
                    kind=cfg.kind, method=meth, k=max(cfg.ranks),
                    status=type(exc).__name__, runtime_s=time.monotonic() - t0))

    elif cfg.kind == "rpca":
        M, Xstar, _ = generators.gen_rpca_instance(
            cfg.m, cfg.n, cfg.rank, cfg.sparsity, seed=cfg.seed)
        nX = np.linalg.norm(Xstar)
        for meth in cfg.methods:
            t0 = time.monotonic()
            try:
                st = nuclear.ialm_rpca(M, nuclear.IalmParams(svd_engine=meth,
                                                             seed=cfg.seed))
                records.append(ResultRecord(
                    kind=cfg.kind, method=meth, k=cfg.rank,
                    rel_error=float(np.linalg.norm(st.low_rank - Xstar) / nX),
                    iterations=st.iterations, sv_count=st.rank,
                    runtime_s=time.monotonic() - t0))
            except Exception as exc:
                records.append(ResultRecord(
                    kind=cfg.kind, method=meth, k=cfg.rank,
                    status=type(exc).__name__, runtime_s=time.monotonic() - t0))

    elif cfg.kind == "completion":
        L, mask = generators.gen_mc_instance(
            cfg.m, cfg.n, cfg.rank, cfg.observe_frac, seed=cfg.seed)
        held = ~mask
        nH = np.linalg.norm(L[held]) if held.any() else 1.0
        for meth in cfg.methods:
            t0 = time.monotonic()
            try:
                st = nuclear.ialm_mc(L, mask, nuclear.IalmParams(svd_engine=meth,
                                                                 seed=cfg.seed))
                err = float(np.linalg.norm((st.low_rank - L)[held]) / nH)
                records.append(ResultRecord(
                    kind=cfg.kind, method=meth, k=cfg.rank, rel_error=err,
                    iterations=st.iterations, sv_count=st.rank,
                    runtime_s=time.monotonic() - t0))
            except Exception as exc:
                records.append(ResultRecord(
                    kind=cfg.kind, method=meth, k=cfg.rank,
                    status=type(exc).__name__, runtime_s=time.monotonic() - t0))

    elif cfg.kind == "backends":
        # Compare the compiled and pure-python pivoted-QR kernels.
        A = np.asfortranarray(generators.gen_type1(cfg.m, cfg.n, cfg.s,
                                                   seed=cfg.seed))
        k = min(30, min(cfg.m, cfg.n))
        for name in ("numba", "numpy"):
            try:
                impl = get_impl(name)
            except Exception as exc:
                records.append(ResultRecord(kind=cfg.kind, method=name, k=k,
                                            status=type(exc).__name__))
                continue
            work = A.copy(order="F")
            t0 = time.monotonic()
            _, _, fl = impl.qrcp_core(work, k)
            dt = time.monotonic() - t0
            records.append(ResultRecord(
                kind=cfg.kind, method=name, k=k, rel_error=0.0,
                flop_count=int(fl), runtime_s=dt))

    return records


def write_records(records, path, fmt="csv"):
    delim = "," if fmt == "csv" else "\t"
    out = open(path, "w", newline="") if path else sys.stdout
    try:
        w = csv.writer(out, delimiter=delim)
        w.writerow(CSV_COLUMNS)
        for rec in records:
            w.writerow(rec.row())
    finally:
        if path:
            out.close()


def _read_config(path):
    cfg = {}
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#") or "=" not in line:
                continue
            key, val = line.split("=", 1)
            cfg[key.strip()] = val.strip()
    return cfg


def _load_matrix(args):
    path = args.input
    if path is None:
        raise ValueError("--in is required")
    if path.endswith(".csv"):
        return io.read_csv_matrix(path)
    return io.read_dmat(path)


def _add_common(sub):
    sub.add_argument("--in", dest="input", help="input file")
    sub.add_argument("--artifacts", help="output artifact path prefix")


def build_parser():
    p = argparse.ArgumentParser(
        prog="ffsrqr",
        description="Randomized rank-revealing factorizations, approximate SVD, "
                    "Tucker compression, and nuclear-norm solvers.",
    )
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", help="key=value config file presetting options")
    p.add_argument("--out", help="CSV output path (default stdout)")
    p.add_argument("--format", choices=("csv", "tsv"), default="csv")
    # Global flags are also accepted after the verb; SUPPRESS keeps the
    # subparser from clobbering a value parsed before it.
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--config", default=argparse.SUPPRESS)
    common.add_argument("--out", default=argparse.SUPPRESS)
    common.add_argument("--format", choices=("csv", "tsv"),
                        default=argparse.SUPPRESS)
    sub = p.add_subparsers(dest="verb", required=True, parser_class=(
        lambda **kw: argparse.ArgumentParser(parents=[common], **kw)))

    ps = sub.add_parser("svd", help="approximate truncated SVD of a matrix")
    _add_common(ps)
    ps.add_argument("--k", type=int, help="target rank (required here or in "
                    "the config file)")
    ps.add_argument("--l", type=int)
    ps.add_argument("--b", type=int, default=32)
    ps.add_argument("--p", type=int, default=5)
    ps.add_argument("--g", type=float, default=2.0)
    ps.add_argument("--epsilon", type=float, default=0.5)
    ps.add_argument("--q", type=int, default=1, help="subspace iterations")
    ps.add_argument("--method", choices=("flipflop", "rsisvd", "exact"),
                    default="flipflop")

    pt = sub.add_parser("tensor", help="ST-HOSVD Tucker compression")
    _add_common(pt)
    pt.add_argument("--ranks", required=True, help="comma-separated target ranks")
    pt.add_argument("--engine", choices=("exact", "flipflop", "rsisvd"),
                    default="exact")

    pr = sub.add_parser("rpca", help="robust PCA by IALM")
    _add_common(pr)
    pr.add_argument("--engine", choices=("exact", "flipflop", "rsisvd"),
                    default="exact")
    pr.add_argument("--lam", type=float)
    pr.add_argument("--mu0", type=float)
    pr.add_argument("--rho", type=float, default=1.5)
    pr.add_argument("--tol", type=float, default=1e-7)
    pr.add_argument("--max-iter", type=int, default=100)
    pr.add_argument("--sv0", type=int, default=10)

    pc = sub.add_parser("complete", help="matrix completion by IALM")
    _add_common(pc)
    pc.add_argument("--ratings", help="4-column ratings file instead of --in")
    pc.add_argument("--shape", help="m,n when indices do not cover the matrix")
    pc.add_argument("--engine", choices=("exact", "flipflop", "rsisvd"),
                    default="exact")
    pc.add_argument("--lam", type=float)
    pc.add_argument("--mu0", type=float)
    pc.add_argument("--rho", type=float, default=1.5)
    pc.add_argument("--tol", type=float, default=1e-7)
    pc.add_argument("--max-iter", type=int, default=100)
    pc.add_argument("--sv0", type=int, default=10)

    pb = sub.add_parser("bench", help="run a configured experiment sweep")
    pb.add_argument("--kind", choices=ExperimentConfig.KINDS,
                    default="svd-accuracy")
    pb.add_argument("--m", type=int, default=200)
    pb.add_argument("--n", type=int, default=200)
    pb.add_argument("--s", type=int, default=100)
    pb.add_argument("--rank", type=int, default=40)
    pb.add_argument("--sparsity", type=float, default=0.05)
    pb.add_argument("--observe-frac", type=float, default=0.5)
    pb.add_argument("--tensor-n", type=int, default=20)
    pb.add_argument("--ranks", default="10,10,10")
    pb.add_argument("--ks", default="5,10,15,20,25,30,35,40,45,50")
    pb.add_argument("--methods", default="flipflop,rsisvd,exact")
    pb.add_argument("--parallel", action="store_true",
                    help="run independent cells concurrently (timings unreliable)")

    return p


def _apply_config(args, argv):
    """Config file values preset options not given on the command line."""
    if not args.config:
        return args
    cfg = _read_config(args.config)
    given = {a.lstrip("-").split("=")[0].replace("-", "_") for a in argv
             if a.startswith("--")}
    for key, val in cfg.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr) or attr in given:
            continue
        cur = getattr(args, attr)
        if isinstance(cur, bool):
            val = val.lower() in ("1", "true", "yes")
        elif isinstance(cur, int):
            val = int(val)
        elif isinstance(cur, float):
            val = float(val)
        elif cur is None:
            # Options that default to unset: coerce numeric-looking values.
            try:
                val = int(val)
            except ValueError:
                try:
                    val = float(val)
                except ValueError:
                    pass
        setattr(args, attr, val)
    return args


def _ints(text):
    return tuple(int(t) for t in str(text).split(",") if t.strip())


def _run_svd(args):
    if args.k is None:
        raise ValueError("--k is required (flag or config file)")
    A = _load_matrix(args)
    if args.method == "flipflop":
        ap = flip_flop_srqr(A, args.k, l=args.l, b=args.b, p=args.p,
                            epsilon=args.epsilon, g=args.g, seed=args.seed)
    elif args.method == "rsisvd":
        ap = rsisvd(A, args.k, p=args.p, q=args.q, seed=args.seed)
    else:
        ap = truncated_svd_oracle(A, args.k)
    if args.artifacts:
        io.save_approx_svd(args.artifacts, ap)
    rec = ResultRecord(kind="svd", method=args.method, k=args.k,
                       rel_error=ap.error(A) / max(np.linalg.norm(A), 1e-300),
                       flop_count=ap.flop_count, sv_count=ap.k, sigmas=ap.s)
    write_records([rec], args.out, args.format)


def _run_tensor(args):
    X = io.read_dten(args.input)
    ranks = _ints(args.ranks)
    dec = tensor.st_hosvd(X, ranks, engine=args.engine, seed=args.seed)
    if args.artifacts:
        io.write_dten(args.artifacts + ".core.dten", dec.core)
        for i, U in enumerate(dec.factors):
            io.write_dmat(args.artifacts + f".factor{i}.dmat", U)
    rec = ResultRecord(kind="tensor", method=args.engine, k=max(ranks),
                       rel_error=tensor.tucker_error(X, dec),
                       flop_count=dec.flop_count)
    write_records([rec], args.out, args.format)


def _ialm_params(args):
    return nuclear.IalmParams(lam=args.lam, mu0=args.mu0, rho=args.rho,
                              tol=args.tol, max_iter=args.max_iter,
                              sv0=args.sv0, svd_engine=args.engine,
                              seed=args.seed)


def _run_rpca(args):
    M = _load_matrix(args)
    st = nuclear.ialm_rpca(M, _ialm_params(args))
    if args.artifacts:
        io.write_dmat(args.artifacts + ".x.dmat", st.low_rank)
        io.write_dmat(args.artifacts + ".e.dmat", st.sparse)
    res = st.residuals[-1] if st.residuals else float("nan")
    rec = ResultRecord(kind="rpca", method=args.engine, k=st.rank,
                       rel_error=res, iterations=st.iterations,
                       sv_count=st.rank,
                       status="ok" if st.converged else "maxiter")
    write_records([rec], args.out, args.format)


def _run_complete(args):
    if args.ratings:
        rows, cols, vals = io.read_ratings(args.ratings)
    else:
        rows, cols, vals = io.read_observations(args.input)
    shape = _ints(args.shape) if args.shape else None
    M, mask = io.observations_to_dense(rows, cols, vals, shape)
    st = nuclear.ialm_mc(M, mask, _ialm_params(args))
    if args.artifacts:
        io.write_dmat(args.artifacts + ".x.dmat", st.low_rank)
    res = st.residuals[-1] if st.residuals else float("nan")
    rec = ResultRecord(kind="complete", method=args.engine, k=st.rank,
                       rel_error=res, iterations=st.iterations,
                       sv_count=st.rank,
                       status="ok" if st.converged else "maxiter")
    write_records([rec], args.out, args.format)


def _run_bench(args):
    cfg = ExperimentConfig(
        kind=args.kind, m=args.m, n=args.n, s=args.s, seed=args.seed,
        sparsity=args.sparsity, rank=args.rank, observe_frac=args.observe_frac,
        tensor_n=args.tensor_n, ranks=_ints(args.ranks), ks=_ints(args.ks),
        methods=tuple(t.strip() for t in args.methods.split(",") if t.strip()),
        out=args.out, parallel=args.parallel,
    )
    records = run_experiment(cfg)
    write_records(records, args.out, args.format)


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args = _apply_config(args, argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else 0
    except (OSError, ValueError):
        return EXIT_CONFIG

    runner = {"svd": _run_svd, "tensor": _run_tensor, "rpca": _run_rpca,
              "complete": _run_complete, "bench": _run_bench}[args.verb]
    try:
        runner(args)
    except (NumericalError, CertificationError, np.linalg.LinAlgError,
            FloatingPointError) as exc:
        print(f"ffsrqr: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, OSError, KeyError) as exc:
        print(f"ffsrqr: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
