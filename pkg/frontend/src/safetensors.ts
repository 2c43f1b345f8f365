/**
 * Reader for the safetensors checkpoint format: one u64-LE header length,
 * a JSON header mapping tensor names to {dtype, shape, data_offsets}, then
 * the raw payload. Only F32 tensors are accepted; tools/convert_weights.py
 * emits exactly that.
 */

import { Tensor } from "./tensor.js";
import { ModelUnavailable } from "./errors.js";

export interface Checkpoint {
  tensors: Map<string, Tensor>;
  metadata: Record<string, string>;
}

interface HeaderEntry {
  dtype: string;
  shape: number[];
  data_offsets: [number, number];
}

export function parseSafetensors(buffer: Buffer, label = "checkpoint"): Checkpoint {
  if (buffer.length < 8) {
    throw new ModelUnavailable(`${label}: too short for a safetensors header`);
  }
  const headerLen = Number(buffer.readBigUInt64LE(0));
  if (8 + headerLen > buffer.length) {
    throw new ModelUnavailable(`${label}: header claims ${headerLen} bytes past end of file`);
  }
  let header: Record<string, unknown>;
  try {
    header = JSON.parse(buffer.subarray(8, 8 + headerLen).toString("utf-8"));
  } catch (e) {
    throw new ModelUnavailable(`${label}: header is not valid JSON (${(e as Error).message})`);
  }
  if (typeof header !== "object" || header === null || Array.isArray(header)) {
    throw new ModelUnavailable(`${label}: header must be a JSON object`);
  }

  const payloadStart = 8 + headerLen;
  const payloadLen = buffer.length - payloadStart;
  const tensors = new Map<string, Tensor>();
  let metadata: Record<string, string> = {};

  for (const [name, raw] of Object.entries(header)) {
    if (name === "__metadata__") {
      metadata = raw as Record<string, string>;
      continue;
    }
    const entry = raw as HeaderEntry;
    if (entry.dtype !== "F32") {
      throw new ModelUnavailable(
        `${label}: tensor ${name} has dtype ${entry.dtype}; convert the checkpoint to f32`,
      );
    }
    const [begin, end] = entry.data_offsets;
    const size = entry.shape.reduce((a, b) => a * b, 1);
    if (end - begin !== 4 * size || begin < 0 || end > payloadLen) {
      throw new ModelUnavailable(`${label}: tensor ${name} has inconsistent offsets`);
    }
    // Copy so alignment is guaranteed regardless of header length.
    const data = new Float32Array(size);
    for (let i = 0; i < size; i++) {
      data[i] = buffer.readFloatLE(payloadStart + begin + 4 * i);
    }
    tensors.set(name, { data, shape: [...entry.shape] });
  }
  return { tensors, metadata };
}
