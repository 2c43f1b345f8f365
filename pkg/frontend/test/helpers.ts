/**
 * Test fixtures: a miniature checkpoint with the real state-dict names (thin
 * channels, one block per stage), a small merge table, and PNG images.
 * Everything is seeded so fixture bytes never drift between runs.
 */

import * as fs from "node:fs";
import { PNG } from "pngjs";

export interface SynthSpec {
  stemOut: number; // channels after the stem (conv3 output)
  planes: number[]; // bottleneck width per stage; block output is 4x this
  blocks: number[]; // blocks per stage
  joint: number; // joint image-text embedding dim (C)
  textWidth: number;
  textBlocks: number;
  textHeads: number;
  vocab: number;
  context: number;
}

export const TINY: SynthSpec = {
  stemOut: 4,
  planes: [2, 4, 8, 16],
  blocks: [1, 1, 1, 1],
  joint: 16,
  textWidth: 16,
  textBlocks: 2,
  textHeads: 2,
  vocab: 518, // 512 byte-level entries + 4 merges + 2 sentinels
  context: 77,
};

// Deterministic per-name values: mulberry32 seeded by a string hash.
function rngFor(name: string): () => number {
  let h = 2166136261;
  for (let i = 0; i < name.length; i++) {
    h ^= name.charCodeAt(i);
    h = Math.imul(h, 16777619);
  }
  let a = h >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

type Entry = { shape: number[]; kind: "weight" | "gamma" | "small" | "var" };

function fill(name: string, entry: Entry): Float32Array {
  const size = entry.shape.reduce((a, b) => a * b, 1);
  const rand = rngFor(name);
  const out = new Float32Array(size);
  if (entry.kind === "gamma") {
    for (let i = 0; i < size; i++) out[i] = 0.8 + 0.4 * rand();
  } else if (entry.kind === "var") {
    for (let i = 0; i < size; i++) out[i] = 0.5 + rand();
  } else if (entry.kind === "small") {
    for (let i = 0; i < size; i++) out[i] = 0.2 * (rand() - 0.5);
  } else {
    // fan-in scaled so activations stay tame through 16+ layers
    const fanIn = size / entry.shape[0];
    const a = Math.sqrt(3 / fanIn);
    for (let i = 0; i < size; i++) out[i] = a * (2 * rand() - 1);
  }
  return out;
}

function bnEntries(prefix: string, c: number, table: Map<string, Entry>): void {
  table.set(`${prefix}.weight`, { shape: [c], kind: "gamma" });
  table.set(`${prefix}.bias`, { shape: [c], kind: "small" });
  table.set(`${prefix}.running_mean`, { shape: [c], kind: "small" });
  table.set(`${prefix}.running_var`, { shape: [c], kind: "var" });
}

function linEntries(prefix: string, dout: number, din: number, table: Map<string, Entry>): void {
  table.set(`${prefix}.weight`, { shape: [dout, din], kind: "weight" });
  table.set(`${prefix}.bias`, { shape: [dout], kind: "small" });
}

/** All tensors of a miniature checkpoint, keyed by released state-dict names. */
export function checkpointEntries(spec: SynthSpec): Map<string, Entry> {
  const t = new Map<string, Entry>();
  const stemMid = Math.max(1, Math.floor(spec.stemOut / 2));
  t.set("visual.conv1.weight", { shape: [stemMid, 3, 3, 3], kind: "weight" });
  bnEntries("visual.bn1", stemMid, t);
  t.set("visual.conv2.weight", { shape: [stemMid, stemMid, 3, 3], kind: "weight" });
  bnEntries("visual.bn2", stemMid, t);
  t.set("visual.conv3.weight", { shape: [spec.stemOut, stemMid, 3, 3], kind: "weight" });
  bnEntries("visual.bn3", spec.stemOut, t);

  let inplanes = spec.stemOut;
  spec.planes.forEach((planes, stage) => {
    const out = 4 * planes;
    for (let b = 0; b < spec.blocks[stage]; b++) {
      const p = `visual.layer${stage + 1}.${b}`;
      const cin = b === 0 ? inplanes : out;
      t.set(`${p}.conv1.weight`, { shape: [planes, cin, 1, 1], kind: "weight" });
      bnEntries(`${p}.bn1`, planes, t);
      t.set(`${p}.conv2.weight`, { shape: [planes, planes, 3, 3], kind: "weight" });
      bnEntries(`${p}.bn2`, planes, t);
      t.set(`${p}.conv3.weight`, { shape: [out, planes, 1, 1], kind: "weight" });
      bnEntries(`${p}.bn3`, out, t);
      if (b === 0) {
        t.set(`${p}.downsample.0.weight`, { shape: [out, cin, 1, 1], kind: "weight" });
        bnEntries(`${p}.downsample.1`, out, t);
      }
    }
    inplanes = out;
  });

  linEntries("visual.attnpool.v_proj", inplanes, inplanes, t);
  linEntries("visual.attnpool.c_proj", spec.joint, inplanes, t);

  const d = spec.textWidth;
  t.set("token_embedding.weight", { shape: [spec.vocab, d], kind: "weight" });
  t.set("positional_embedding", { shape: [spec.context, d], kind: "small" });
  for (let n = 0; n < spec.textBlocks; n++) {
    const p = `transformer.resblocks.${n}`;
    t.set(`${p}.attn.in_proj_weight`, { shape: [3 * d, d], kind: "weight" });
    t.set(`${p}.attn.in_proj_bias`, { shape: [3 * d], kind: "small" });
    linEntries(`${p}.attn.out_proj`, d, d, t);
    t.set(`${p}.ln_1.weight`, { shape: [d], kind: "gamma" });
    t.set(`${p}.ln_1.bias`, { shape: [d], kind: "small" });
    linEntries(`${p}.mlp.c_fc`, 4 * d, d, t);
    linEntries(`${p}.mlp.c_proj`, d, 4 * d, t);
    t.set(`${p}.ln_2.weight`, { shape: [d], kind: "gamma" });
    t.set(`${p}.ln_2.bias`, { shape: [d], kind: "small" });
  }
  t.set("ln_final.weight", { shape: [d], kind: "gamma" });
  t.set("ln_final.bias", { shape: [d], kind: "small" });
  t.set("text_projection", { shape: [d, spec.joint], kind: "weight" });
  return t;
}

/** Serialize the miniature checkpoint as safetensors bytes. */
export function buildCheckpoint(spec: SynthSpec = TINY): Buffer {
  const entries = checkpointEntries(spec);
  const header: Record<string, unknown> = {
    __metadata__: { text_heads: String(spec.textHeads) },
  };
  const payloads: Buffer[] = [];
  let offset = 0;
  for (const [name, entry] of entries) {
    const values = fill(name, entry);
    const bytes = Buffer.from(values.buffer);
    header[name] = {
      dtype: "F32",
      shape: entry.shape,
      data_offsets: [offset, offset + bytes.length],
    };
    payloads.push(bytes);
    offset += bytes.length;
  }
  const headerBytes = Buffer.from(JSON.stringify(header), "utf-8");
  const lenBuf = Buffer.alloc(8);
  lenBuf.writeBigUInt64LE(BigInt(headerBytes.length));
  return Buffer.concat([lenBuf, headerBytes, ...payloads]);
}

export function writeCheckpoint(path: string, spec: SynthSpec = TINY): string {
  fs.writeFileSync(path, buildCheckpoint(spec));
  return path;
}

/** Four merges over ascii letters; vocab size 518 to match TINY. */
export function tinyMerges(): [string, string][] {
  return [
    ["c", "l"],
    ["cl", "o"],
    ["f", "a"],
    ["fa", "r</w>"],
  ];
}

/** Deterministic RGB test card: smooth gradients plus a seed-keyed stripe. */
export function writePng(path: string, width: number, height: number, seed = 0): string {
  const png = new PNG({ width, height });
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      const i = (y * width + x) * 4;
      png.data[i] = (x * 255 / Math.max(1, width - 1)) | 0;
      png.data[i + 1] = (y * 255 / Math.max(1, height - 1)) | 0;
      png.data[i + 2] = (x + y + 37 * seed) % 256;
      png.data[i + 3] = 255;
    }
  }
  fs.writeFileSync(path, PNG.sync.write(png));
  return path;
}
