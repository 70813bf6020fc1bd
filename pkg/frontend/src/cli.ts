/**
 * Process-level access to the ffsrqr command-line tool.
 *
 * The executable is resolved from the FFSRQR_CLI environment variable,
 * falling back to "ffsrqr" on PATH.  Exit code 2 maps to ConfigError,
 * exit code 3 to NumericalError.
 */

import { spawnSync } from "node:child_process";

export class ConfigError extends Error {}
export class NumericalError extends Error {}

export function cliPath(): string {
  const env = process.env.FFSRQR_CLI;
  return env && env.trim() ? env : "ffsrqr";
}

export function runCli(args: string[]): string {
  const res = spawnSync(cliPath(), args, { encoding: "utf8" });
  if (res.error) {
    throw new Error(`failed to launch ${cliPath()}: ${res.error.message}`);
  }
  if (res.status === 2) {
    throw new ConfigError(res.stderr.trim() || "configuration error");
  }
  if (res.status === 3) {
    throw new NumericalError(res.stderr.trim() || "numerical failure");
  }
  if (res.status !== 0) {
    throw new Error(`ffsrqr exited with ${res.status}: ${res.stderr.trim()}`);
  }
  return res.stdout;
}
