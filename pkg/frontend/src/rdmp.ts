/** Binary representation-dump writer.
 *
 * Layout, all little-endian:
 *   bytes 0..3   magic "RDMP"
 *   bytes 4..7   u32 format version (1)
 *   bytes 8..11  u32 layer index
 *   bytes 12..19 u64 sample count N
 *   bytes 20..27 u64 feature dimension d
 *   bytes 28..31 u32 class count C
 *   then N u32 labels, then N*d f32 features, row-major.
 */

import { writeFileSync } from "node:fs";

export const MAGIC = "RDMP";
export const VERSION = 1;
export const HEADER_BYTES = 32;

export interface Dump {
  layerIndex: number;
  numClasses: number;
  labels: Uint32Array;
  /** Row-major N x d block. */
  data: Float32Array;
  samples: number;
  dim: number;
}

export function encodeDump(dump: Dump): Buffer {
  const { layerIndex, numClasses, labels, data, samples, dim } = dump;
  if (labels.length !== samples) {
    throw new Error(`labels length ${labels.length} != samples ${samples}`);
  }
  if (data.length !== samples * dim) {
    throw new Error(`data length ${data.length} != samples*dim ${samples * dim}`);
  }
  if (layerIndex < 0 || numClasses < 1) {
    throw new Error(`bad header fields: layer ${layerIndex}, classes ${numClasses}`);
  }
  const buf = Buffer.alloc(HEADER_BYTES + 4 * samples + 4 * samples * dim);
  buf.write(MAGIC, 0, "ascii");
  buf.writeUInt32LE(VERSION, 4);
  buf.writeUInt32LE(layerIndex, 8);
  buf.writeBigUInt64LE(BigInt(samples), 12);
  buf.writeBigUInt64LE(BigInt(dim), 20);
  buf.writeUInt32LE(numClasses, 28);
  let off = HEADER_BYTES;
  for (let i = 0; i < samples; i++) {
    const label = labels[i];
    if (label >= numClasses) throw new Error(`label ${label} out of range at row ${i}`);
    buf.writeUInt32LE(label, off);
    off += 4;
  }
  for (let i = 0; i < data.length; i++) {
    const v = data[i];
    if (!Number.isFinite(v)) throw new Error(`non-finite value at flat index ${i}`);
    buf.writeFloatLE(v, off);
    off += 4;
  }
  return buf;
}

export function writeDump(path: string, dump: Dump): void {
  writeFileSync(path, encodeDump(dump));
}

/** Minimal reader used by the test suite to check round trips. */
export function decodeDump(buf: Buffer): Dump {
  if (buf.length < HEADER_BYTES) throw new Error(`truncated header (${buf.length} bytes)`);
  if (buf.toString("ascii", 0, 4) !== MAGIC) throw new Error("bad magic");
  const version = buf.readUInt32LE(4);
  if (version !== VERSION) throw new Error(`unsupported version ${version}`);
  const layerIndex = buf.readUInt32LE(8);
  const samples = Number(buf.readBigUInt64LE(12));
  const dim = Number(buf.readBigUInt64LE(20));
  const numClasses = buf.readUInt32LE(28);
  const expected = HEADER_BYTES + 4 * samples + 4 * samples * dim;
  if (buf.length !== expected) throw new Error(`size ${buf.length}, expected ${expected}`);
  const labels = new Uint32Array(samples);
  let off = HEADER_BYTES;
  for (let i = 0; i < samples; i++) {
    labels[i] = buf.readUInt32LE(off);
    off += 4;
  }
  const data = new Float32Array(samples * dim);
  for (let i = 0; i < data.length; i++) {
    data[i] = buf.readFloatLE(off);
    off += 4;
  }
  return { layerIndex, numClasses, labels, data, samples, dim };
}
