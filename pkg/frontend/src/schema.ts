/**
 * Strict readers for the solver's CSV outputs.
 *
 * The diagnostics schema is a fixed contract shared with the solver; any
 * drift in the header is an error, never silently tolerated.
 */

import { readFileSync } from "fs";

export const DIAGNOSTICS_COLUMNS = [
  "t", "kinetic", "elastic", "dissipation", "power_in", "energy_residual",
  "lambda_min", "norm_v", "norm_gradv", "norm_B", "norm_gradB",
  "norm_B_l4", "gronwall_g", "eps_gap",
] as const;

export const SEPARATION_COLUMNS = ["t", "separation", "envelope", "g_twin"] as const;

export const CONVERGENCE_COLUMNS = [
  "case", "N", "dt", "eps", "error_l2_v", "error_l2_B", "order", "pass",
] as const;

export class SchemaMismatchError extends Error {
  constructor(path: string, expected: readonly string[], found: string[]) {
    super(
      `${path}: header mismatch\n  expected: ${expected.join(",")}\n  found:    ${found.join(",")}`,
    );
    this.name = "SchemaMismatchError";
  }
}

export class FileNotFoundError extends Error {
  constructor(path: string) {
    super(`${path}: no such file`);
    this.name = "FileNotFoundError";
  }
}

export interface NumericTable {
  columns: string[];
  /** column name -> values, one entry per data row */
  data: Map<string, number[]>;
  rows: number;
}

function readText(path: string): string {
  try {
    return readFileSync(path, "utf8");
  } catch (err: unknown) {
    if ((err as NodeJS.ErrnoException).code === "ENOENT") {
      throw new FileNotFoundError(path);
    }
    throw err;
  }
}

function parseNumber(raw: string): number {
  if (raw === "nan" || raw === "-nan") return NaN;
  if (raw === "inf") return Infinity;
  if (raw === "-inf") return -Infinity;
  const value = Number(raw);
  if (Number.isNaN(value) && raw.trim() !== "nan") {
    throw new Error(`not a number: ${JSON.stringify(raw)}`);
  }
  return value;
}

export function readNumericCsv(
  path: string,
  expected: readonly string[],
): NumericTable {
  const text = readText(path);
  const lines = text.split("\n").filter((line) => line.trim().length > 0);
  if (lines.length === 0) throw new SchemaMismatchError(path, expected, []);
  const header = lines[0]!.split(",").map((c) => c.trim());
  if (
    header.length !== expected.length ||
    header.some((name, i) => name !== expected[i])
  ) {
    throw new SchemaMismatchError(path, expected, header);
  }
  const data = new Map<string, number[]>(expected.map((name) => [name, []]));
  for (const line of lines.slice(1)) {
    const cells = line.split(",");
    if (cells.length !== expected.length) {
      throw new SchemaMismatchError(path, expected, cells);
    }
    cells.forEach((cell, i) => data.get(expected[i]!)!.push(parseNumber(cell.trim())));
  }
  return { columns: [...expected], data, rows: lines.length - 1 };
}

/** Convergence reports carry a string case column; read it separately. */
export interface ConvergenceRow {
  caseName: string;
  N: number;
  dt: number;
  eps: number;
  errorV: number;
  errorB: number;
  order: number;
  pass: boolean;
}

export function readConvergenceCsv(path: string): ConvergenceRow[] {
  const text = readText(path);
  const lines = text.split("\n").filter((line) => line.trim().length > 0);
  const header = (lines[0] ?? "").split(",").map((c) => c.trim());
  if (header.join(",") !== CONVERGENCE_COLUMNS.join(",")) {
    throw new SchemaMismatchError(path, CONVERGENCE_COLUMNS, header);
  }
  return lines.slice(1).map((line) => {
    const c = line.split(",");
    if (c.length !== CONVERGENCE_COLUMNS.length) {
      throw new SchemaMismatchError(path, CONVERGENCE_COLUMNS, c);
    }
    return {
      caseName: c[0]!.trim(),
      N: Number(c[1]),
      dt: Number(c[2]),
      eps: Number(c[3]),
      errorV: Number(c[4]),
      errorB: Number(c[5]),
      order: parseNumber(c[6]!.trim()),
      pass: c[7]!.trim() === "true",
    };
  });
}
