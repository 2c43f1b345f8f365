/**
 * Tensor container (.dce) emitter, byte-compatible with the Python reader:
 *
 *   magic "DCE1" | version u8 (=1) | rank u8 | dims rank*u32 LE |
 *   payload row-major f32 LE | meta_len u32 LE | metadata UTF-8 JSON
 *
 * Metadata is serialized with sorted keys and ", " / ": " separators so the
 * two writers produce identical bytes for identical content.
 */

import { Tensor } from "./tensor.js";

const MAGIC = "DCE1";
const VERSION = 1;

export type Meta = string | number | boolean | null | Meta[] | { [key: string]: Meta };

/** JSON with sorted object keys and Python-style separators. */
export function canonicalJson(value: Meta): string {
  if (value === null || typeof value !== "object") {
    return JSON.stringify(value);
  }
  if (Array.isArray(value)) {
    return `[${value.map(canonicalJson).join(", ")}]`;
  }
  const keys = Object.keys(value).sort();
  const parts = keys.map((k) => `${JSON.stringify(k)}: ${canonicalJson(value[k])}`);
  return `{${parts.join(", ")}}`;
}

export function encodeContainer(tensor: Tensor, metadata?: Record<string, Meta>): Buffer {
  const rank = tensor.shape.length;
  const metaBytes =
    metadata && Object.keys(metadata).length > 0
      ? Buffer.from(canonicalJson(metadata), "utf-8")
      : Buffer.alloc(0);
  const buf = Buffer.alloc(4 + 2 + 4 * rank + 4 * tensor.data.length + 4 + metaBytes.length);
  let off = buf.write(MAGIC, 0, "ascii");
  off = buf.writeUInt8(VERSION, off);
  off = buf.writeUInt8(rank, off);
  for (const d of tensor.shape) off = buf.writeUInt32LE(d, off);
  for (let i = 0; i < tensor.data.length; i++) off = buf.writeFloatLE(tensor.data[i], off);
  off = buf.writeUInt32LE(metaBytes.length, off);
  metaBytes.copy(buf, off);
  return buf;
}

export interface DecodedContainer {
  tensor: Tensor;
  metadata: Record<string, Meta>;
}

/** Strict decoder, used by the tests to round-trip what we emit. */
export function decodeContainer(buf: Buffer): DecodedContainer {
  if (buf.length < 6 || buf.toString("ascii", 0, 4) !== MAGIC) {
    throw new Error(`not a ${MAGIC} container`);
  }
  if (buf.readUInt8(4) !== VERSION) {
    throw new Error(`unsupported container version ${buf.readUInt8(4)}`);
  }
  const rank = buf.readUInt8(5);
  let off = 6;
  const shape: number[] = [];
  for (let i = 0; i < rank; i++) {
    shape.push(buf.readUInt32LE(off));
    off += 4;
  }
  const count = shape.reduce((a, b) => a * b, 1);
  const data = new Float32Array(count);
  for (let i = 0; i < count; i++) {
    data[i] = buf.readFloatLE(off);
    off += 4;
  }
  const metaLen = buf.readUInt32LE(off);
  off += 4;
  if (off + metaLen !== buf.length) {
    throw new Error(`container has ${buf.length - off - metaLen} trailing bytes`);
  }
  const metadata = metaLen ? JSON.parse(buf.toString("utf-8", off, off + metaLen)) : {};
  return { tensor: { data, shape }, metadata };
}
