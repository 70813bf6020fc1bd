/**
 * Binary matrix and tensor file formats shared with the ffsrqr CLI.
 *
 * DMAT: ASCII magic "DMAT", two little-endian u64 (rows, cols), then the
 * float64 payload in column-major order.  DTEN: magic "DTEN", u64 order d,
 * u64 dims[d], then the float64 payload stored first-index-fastest.
 */

import { readFileSync, writeFileSync } from "node:fs";

/** Dense float64 matrix stored column-major (matching the file format). */
export interface Matrix {
  rows: number;
  cols: number;
  /** Column-major payload, length rows*cols. */
  data: Float64Array;
}

/** Dense float64 tensor stored first-index-fastest. */
export interface Tensor {
  dims: number[];
  data: Float64Array;
}

export class FormatError extends Error {}
export class ShapeError extends TypeError {}

const DMAT = Buffer.from("DMAT", "ascii");
const DTEN = Buffer.from("DTEN", "ascii");

export function matrix(rows: number, cols: number, data?: Float64Array): Matrix {
  if (!Number.isInteger(rows) || !Number.isInteger(cols) || rows < 0 || cols < 0) {
    throw new ShapeError(`invalid matrix shape ${rows}x${cols}`);
  }
  const d = data ?? new Float64Array(rows * cols);
  if (d.length !== rows * cols) {
    throw new ShapeError(`payload length ${d.length} != ${rows}x${cols}`);
  }
  return { rows, cols, data: d };
}

/** Column-major index of entry (i, j). */
export function at(m: Matrix, i: number, j: number): number {
  return m.data[i + j * m.rows];
}

export function setAt(m: Matrix, i: number, j: number, v: number): void {
  m.data[i + j * m.rows] = v;
}

/** Build a matrix from row-major nested arrays. */
export function fromRows(rows: number[][]): Matrix {
  const r = rows.length;
  const c = r > 0 ? rows[0].length : 0;
  const m = matrix(r, c);
  for (let i = 0; i < r; i++) {
    if (rows[i].length !== c) {
      throw new ShapeError("ragged rows are not a matrix");
    }
    for (let j = 0; j < c; j++) setAt(m, i, j, rows[i][j]);
  }
  return m;
}

function checkFinite(data: Float64Array, what: string): void {
  for (let i = 0; i < data.length; i++) {
    if (!Number.isFinite(data[i])) {
      throw new ShapeError(`${what} contains a non-finite value at ${i}`);
    }
  }
}

export function writeDmat(path: string, m: Matrix): void {
  checkFinite(m.data, "matrix");
  const buf = Buffer.alloc(4 + 16 + 8 * m.data.length);
  DMAT.copy(buf, 0);
  buf.writeBigUInt64LE(BigInt(m.rows), 4);
  buf.writeBigUInt64LE(BigInt(m.cols), 12);
  Buffer.from(m.data.buffer, m.data.byteOffset, m.data.byteLength).copy(buf, 20);
  writeFileSync(path, buf);
}

export function readDmat(path: string): Matrix {
  const buf = readFileSync(path);
  if (buf.length < 20 || !buf.subarray(0, 4).equals(DMAT)) {
    throw new FormatError(`${path}: not a DMAT file`);
  }
  const rows = Number(buf.readBigUInt64LE(4));
  const cols = Number(buf.readBigUInt64LE(12));
  const need = 20 + 8 * rows * cols;
  if (buf.length < need) {
    throw new FormatError(`${path}: truncated DMAT payload`);
  }
  const data = new Float64Array(rows * cols);
  for (let i = 0; i < data.length; i++) data[i] = buf.readDoubleLE(20 + 8 * i);
  return { rows, cols, data };
}

export function tensor(dims: number[], data?: Float64Array): Tensor {
  if (dims.length === 0 || dims.some((d) => !Number.isInteger(d) || d <= 0)) {
    throw new ShapeError(`invalid tensor dims ${JSON.stringify(dims)}`);
  }
  const total = dims.reduce((a, b) => a * b, 1);
  const d = data ?? new Float64Array(total);
  if (d.length !== total) {
    throw new ShapeError(`payload length ${d.length} != product of dims`);
  }
  return { dims: [...dims], data: d };
}

export function writeDten(path: string, t: Tensor): void {
  checkFinite(t.data, "tensor");
  const buf = Buffer.alloc(4 + 8 + 8 * t.dims.length + 8 * t.data.length);
  DTEN.copy(buf, 0);
  buf.writeBigUInt64LE(BigInt(t.dims.length), 4);
  t.dims.forEach((d, i) => buf.writeBigUInt64LE(BigInt(d), 12 + 8 * i));
  Buffer.from(t.data.buffer, t.data.byteOffset, t.data.byteLength)
    .copy(buf, 12 + 8 * t.dims.length);
  writeFileSync(path, buf);
}

export function readDten(path: string): Tensor {
  const buf = readFileSync(path);
  if (buf.length < 12 || !buf.subarray(0, 4).equals(DTEN)) {
    throw new FormatError(`${path}: not a DTEN file`);
  }
  const d = Number(buf.readBigUInt64LE(4));
  const dims: number[] = [];
  for (let i = 0; i < d; i++) dims.push(Number(buf.readBigUInt64LE(12 + 8 * i)));
  const total = dims.reduce((a, b) => a * b, 1);
  const off = 12 + 8 * d;
  if (buf.length < off + 8 * total) {
    throw new FormatError(`${path}: truncated DTEN payload`);
  }
  const data = new Float64Array(total);
  for (let i = 0; i < total; i++) data[i] = buf.readDoubleLE(off + 8 * i);
  return { dims, data };
}
