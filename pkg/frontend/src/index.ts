/**
 * High-level client: approximate SVD, Tucker compression, robust PCA, and
 * matrix completion, delegating all numerics to the ffsrqr command-line
 * tool through its binary file formats.  Given the same seed and
 * parameters, results are byte-identical to a direct CLI invocation.
 */

import { mkdtempSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { ConfigError, NumericalError, runCli } from "./cli.js";
import {
  Matrix,
  ShapeError,
  Tensor,
  at,
  readDmat,
  readDten,
  writeDmat,
  writeDten,
} from "./formats.js";

export * from "./formats.js";
export { ConfigError, NumericalError, cliPath, runCli } from "./cli.js";

export interface SvdResult {
  /** Left singular vectors, m x k. */
  u: Matrix;
  /** Singular values as a k x 1 column. */
  s: Matrix;
  /** Right singular vectors, n x k. */
  v: Matrix;
}

export interface TuckerResult {
  core: Tensor;
  factors: Matrix[];
}

export interface RpcaResult {
  lowRank: Matrix;
  sparse: Matrix;
}

export interface SvdOptions {
  l?: number;
  b?: number;
  p?: number;
  g?: number;
  epsilon?: number;
  q?: number;
  seed?: number;
}

export interface IalmOptions {
  engine?: "exact" | "flipflop" | "rsisvd";
  lam?: number;
  rho?: number;
  tol?: number;
  maxIter?: number;
  seed?: number;
}

function withTmp<T>(fn: (dir: string) => T): T {
  const dir = mkdtempSync(join(tmpdir(), "ffsrqr-"));
  try {
    return fn(dir);
  } finally {
    rmSync(dir, { recursive: true, force: true });
  }
}

function checkMatrix(m: Matrix): void {
  if (
    !Number.isInteger(m.rows) || !Number.isInteger(m.cols) ||
    m.rows < 1 || m.cols < 1
  ) {
    throw new ShapeError(`invalid matrix shape ${m.rows}x${m.cols}`);
  }
  if (!(m.data instanceof Float64Array)) {
    throw new ShapeError("matrix payload must be a Float64Array");
  }
  if (m.data.length !== m.rows * m.cols) {
    throw new ShapeError(`payload length ${m.data.length} != ${m.rows}x${m.cols}`);
  }
}

function checkRank(k: number, limit: number, what: string): void {
  if (!Number.isInteger(k) || k < 1 || k > limit) {
    throw new ShapeError(`${what} must be an integer in [1, ${limit}]; got ${k}`);
  }
}

function readSvdArtifacts(prefix: string): SvdResult {
  return {
    u: readDmat(prefix + ".u.dmat"),
    s: readDmat(prefix + ".s.dmat"),
    v: readDmat(prefix + ".v.dmat"),
  };
}

function svdVerb(method: string, m: Matrix, k: number, opts: SvdOptions): SvdResult {
  checkMatrix(m);
  checkRank(k, Math.min(m.rows, m.cols), "k");
  if (opts.l !== undefined) {
    checkRank(opts.l, Math.min(m.rows, m.cols) - 1, "l");
    if (opts.l < k) throw new ShapeError(`l must be >= k; got l=${opts.l}, k=${k}`);
  }
  return withTmp((dir) => {
    const input = join(dir, "a.dmat");
    const prefix = join(dir, "out");
    writeDmat(input, m);
    const args = ["svd", "--in", input, "--k", String(k), "--method", method,
                  "--seed", String(opts.seed ?? 0),
                  "--artifacts", prefix, "--out", join(dir, "r.csv")];
    if (opts.l !== undefined) args.push("--l", String(opts.l));
    if (opts.b !== undefined) args.push("--b", String(opts.b));
    if (opts.p !== undefined) args.push("--p", String(opts.p));
    if (opts.g !== undefined) args.push("--g", String(opts.g));
    if (opts.epsilon !== undefined) args.push("--epsilon", String(opts.epsilon));
    if (opts.q !== undefined) args.push("--q", String(opts.q));
    runCli(args);
    return readSvdArtifacts(prefix);
  });
}

/** Rank-k approximate SVD via the randomized flip-flop factorization. */
export function flipFlopSrqr(m: Matrix, k: number, opts: SvdOptions = {}): SvdResult {
  return svdVerb("flipflop", m, k, opts);
}

/** Rank-k approximate SVD via randomized subspace iteration. */
export function rsisvd(m: Matrix, k: number, opts: SvdOptions = {}): SvdResult {
  return svdVerb("rsisvd", m, k, opts);
}

/** Sequentially truncated Tucker compression to the given per-mode ranks. */
export function stHosvd(
  t: Tensor,
  ranks: number[],
  opts: { engine?: "exact" | "flipflop" | "rsisvd"; seed?: number } = {},
): TuckerResult {
  if (!(t.data instanceof Float64Array)) {
    throw new ShapeError("tensor payload must be a Float64Array");
  }
  if (ranks.length !== t.dims.length) {
    throw new ShapeError(
      `need one rank per mode: got ${ranks.length} for order ${t.dims.length}`);
  }
  ranks.forEach((r, i) => checkRank(r, t.dims[i], `rank for mode ${i}`));
  return withTmp((dir) => {
    const input = join(dir, "x.dten");
    const prefix = join(dir, "out");
    writeDten(input, t);
    runCli(["tensor", "--in", input, "--ranks", ranks.join(","),
            "--engine", opts.engine ?? "exact", "--seed", String(opts.seed ?? 0),
            "--artifacts", prefix, "--out", join(dir, "r.csv")]);
    const core = readDten(prefix + ".core.dten");
    const factors = t.dims.map((_, i) => readDmat(`${prefix}.factor${i}.dmat`));
    return { core, factors };
  });
}

function ialmArgs(opts: IalmOptions): string[] {
  const args = ["--engine", opts.engine ?? "exact",
                "--seed", String(opts.seed ?? 0)];
  if (opts.lam !== undefined) args.push("--lam", String(opts.lam));
  if (opts.rho !== undefined) args.push("--rho", String(opts.rho));
  if (opts.tol !== undefined) args.push("--tol", String(opts.tol));
  if (opts.maxIter !== undefined) args.push("--max-iter", String(opts.maxIter));
  return args;
}

/** Split a matrix into low-rank plus sparse parts (robust PCA). */
export function ialmRpca(m: Matrix, opts: IalmOptions = {}): RpcaResult {
  checkMatrix(m);
  return withTmp((dir) => {
    const input = join(dir, "m.dmat");
    const prefix = join(dir, "out");
    writeDmat(input, m);
    runCli(["rpca", "--in", input, "--artifacts", prefix,
            "--out", join(dir, "r.csv"), ...ialmArgs(opts)]);
    return {
      lowRank: readDmat(prefix + ".x.dmat"),
      sparse: readDmat(prefix + ".e.dmat"),
    };
  });
}

/**
 * Recover a low-rank matrix from the observed entries (mask true where
 * observed).  Returns the completed matrix.
 */
export function ialmMc(m: Matrix, mask: boolean[][], opts: IalmOptions = {}): Matrix {
  checkMatrix(m);
  if (mask.length !== m.rows || mask.some((row) => row.length !== m.cols)) {
    throw new ShapeError("mask shape must match the matrix");
  }
  const lines: string[] = [];
  for (let i = 0; i < m.rows; i++) {
    for (let j = 0; j < m.cols; j++) {
      if (mask[i][j]) {
        const v = at(m, i, j);
        if (!Number.isFinite(v)) {
          throw new ShapeError(`observed entry (${i}, ${j}) is non-finite`);
        }
        lines.push(`${i} ${j} ${v}`);
      }
    }
  }
  if (lines.length === 0) {
    throw new ShapeError("mask selects no observed entries");
  }
  return withTmp((dir) => {
    const obs = join(dir, "obs.txt");
    const prefix = join(dir, "out");
    writeFileSync(obs, lines.join("\n") + "\n");
    runCli(["complete", "--in", obs, "--shape", `${m.rows},${m.cols}`,
            "--artifacts", prefix, "--out", join(dir, "r.csv"),
            ...ialmArgs(opts)]);
    return readDmat(prefix + ".x.dmat");
  });
}
