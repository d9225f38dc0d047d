/**
 * Reader for the solver's binary field snapshots.
 *
 * Layout (little-endian): magic "V2DS", u32 version = 1, u32 N, f64 t,
 * u32 field count, then per field an 8-byte space-padded ascii name and
 * a u64 absolute payload offset. Payloads are raw f64, row-major N x N,
 * in the order vx, vy, b11, b12, b22.
 */

import { readFileSync } from "fs";
import { FileNotFoundError } from "./schema.js";

export const FIELD_ORDER = ["vx", "vy", "b11", "b12", "b22"] as const;
export type FieldName = (typeof FIELD_ORDER)[number];

const MAGIC = "V2DS";
const HEAD_SIZE = 4 + 4 + 4 + 8 + 4;
const ENTRY_SIZE = 8 + 8;

export class CorruptSnapshotError extends Error {
  constructor(path: string, reason: string) {
    super(`${path}: ${reason}`);
    this.name = "CorruptSnapshotError";
  }
}

export interface Snapshot {
  n: number;
  t: number;
  fields: Map<FieldName, Float64Array>;
}

export function readSnapshot(path: string): Snapshot {
  let buf: Buffer;
  try {
    buf = readFileSync(path);
  } catch (err: unknown) {
    if ((err as NodeJS.ErrnoException).code === "ENOENT") {
      throw new FileNotFoundError(path);
    }
    throw err;
  }
  if (buf.length < HEAD_SIZE) throw new CorruptSnapshotError(path, "truncated header");
  if (buf.toString("ascii", 0, 4) !== MAGIC) {
    throw new CorruptSnapshotError(path, `bad magic ${JSON.stringify(buf.toString("ascii", 0, 4))}`);
  }
  const version = buf.readUInt32LE(4);
  if (version !== 1) throw new CorruptSnapshotError(path, `unsupported version ${version}`);
  const n = buf.readUInt32LE(8);
  const t = buf.readDoubleLE(12);
  const count = buf.readUInt32LE(20);
  if (count !== FIELD_ORDER.length) {
    throw new CorruptSnapshotError(path, `expected ${FIELD_ORDER.length} fields, found ${count}`);
  }

  const offsets = new Map<string, number>();
  for (let i = 0; i < count; i++) {
    const base = HEAD_SIZE + i * ENTRY_SIZE;
    const name = buf.toString("ascii", base, base + 8).trim();
    const offset = Number(buf.readBigUInt64LE(base + 8));
    offsets.set(name, offset);
  }

  const payload = 8 * n * n;
  const fields = new Map<FieldName, Float64Array>();
  for (const name of FIELD_ORDER) {
    const offset = offsets.get(name);
    if (offset === undefined) throw new CorruptSnapshotError(path, `missing field ${name}`);
    if (offset + payload > buf.length) {
      throw new CorruptSnapshotError(path, `field ${name} payload out of bounds`);
    }
    const values = new Float64Array(n * n);
    for (let i = 0; i < n * n; i++) values[i] = buf.readDoubleLE(offset + 8 * i);
    fields.set(name, values);
  }
  return { n, t, fields };
}

/** Pointwise minimal eigenvalue of the stored symmetric tensor. */
export function lambdaMinField(snap: Snapshot): Float64Array {
  const b11 = snap.fields.get("b11")!;
  const b12 = snap.fields.get("b12")!;
  const b22 = snap.fields.get("b22")!;
  const out = new Float64Array(b11.length);
  for (let i = 0; i < out.length; i++) {
    const mean = 0.5 * (b11[i]! + b22[i]!);
    const radius = Math.sqrt(0.25 * (b11[i]! - b22[i]!) ** 2 + b12[i]! ** 2);
    out[i] = mean - radius;
  }
  return out;
}
