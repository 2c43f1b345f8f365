/**
 * Byte-pair-encoding tokenizer matching the one shipped with the released
 * CLIP checkpoints: byte-to-unicode remapping, lowercase + whitespace
 * cleanup, greedy lowest-rank merges, word-final `</w>` marker, and
 * start/end sentinels occupying the two highest vocabulary ids.
 *
 * The merge table is supplied as a file (plain text or gzip, one
 * space-separated pair per line; `#` lines are comments). Feeding the table
 * from the released `bpe_simple_vocab_16e6` file reproduces its ids exactly.
 */

import * as fs from "node:fs";
import * as zlib from "node:zlib";

import { ModelUnavailable, InvalidJob } from "./errors.js";

export const CONTEXT_LENGTH = 77;

const START_TOKEN = "<|startoftext|>";
const END_TOKEN = "<|endoftext|>";

// Word-splitting pattern of the released tokenizer (specials excluded; they
// never occur inside prompt text here).
const WORD_PATTERN = /('s|'t|'re|'ve|'m|'ll|'d|\p{L}+|\p{N}|[^\s\p{L}\p{N}]+)/giu;

/**
 * The 256 bytes mapped onto printable code points, as in the released
 * tokenizer. `ordered` preserves the construction order (printable bytes
 * first) because vocabulary ids depend on it; `byByte` is the lookup table.
 */
function bytesToUnicode(): { byByte: string[]; ordered: string[] } {
  const bs: number[] = [];
  for (let b = 0x21; b <= 0x7e; b++) bs.push(b);
  for (let b = 0xa1; b <= 0xac; b++) bs.push(b);
  for (let b = 0xae; b <= 0xff; b++) bs.push(b);
  const cs = [...bs];
  let n = 0;
  for (let b = 0; b < 256; b++) {
    if (!bs.includes(b)) {
      bs.push(b);
      cs.push(256 + n);
      n++;
    }
  }
  const byByte = new Array<string>(256);
  const ordered: string[] = [];
  bs.forEach((b, i) => {
    byByte[b] = String.fromCodePoint(cs[i]);
    ordered.push(byByte[b]);
  });
  return { byByte, ordered };
}

export function loadMerges(path: string): [string, string][] {
  let blob: Buffer;
  try {
    blob = fs.readFileSync(path);
  } catch (e) {
    throw new ModelUnavailable(`cannot read merge table ${path}: ${(e as Error).message}`);
  }
  if (blob.length >= 2 && blob[0] === 0x1f && blob[1] === 0x8b) {
    blob = zlib.gunzipSync(blob);
  }
  const merges: [string, string][] = [];
  for (const line of blob.toString("utf-8").split("\n")) {
    const text = line.trim();
    if (!text || text.startsWith("#")) continue;
    const parts = text.split(" ");
    if (parts.length !== 2) {
      throw new ModelUnavailable(`${path}: merge line ${JSON.stringify(text)} is not a pair`);
    }
    merges.push([parts[0], parts[1]]);
  }
  return merges;
}

export class Tokenizer {
  private byteEncoder: string[];
  private ranks = new Map<string, number>();
  private encoder = new Map<string, number>();
  private cache = new Map<string, string[]>();
  readonly startId: number;
  readonly endId: number;

  constructor(merges: [string, string][]) {
    const { byByte, ordered } = bytesToUnicode();
    this.byteEncoder = byByte;
    merges.forEach(([a, b], i) => this.ranks.set(`${a} ${b}`, i));
    const withEnd = ordered.map((c) => c + "</w>");
    const all = [...ordered, ...withEnd, ...merges.map(([a, b]) => a + b), START_TOKEN, END_TOKEN];
    all.forEach((tok, i) => this.encoder.set(tok, i));
    this.startId = this.encoder.get(START_TOKEN)!;
    this.endId = this.encoder.get(END_TOKEN)!;
  }

  get vocabSize(): number {
    return this.encoder.size;
  }

  /** Greedy merge loop over one whitespace-free word. */
  private bpe(word: string): string[] {
    const hit = this.cache.get(word);
    if (hit) return hit;
    const chars = Array.from(word);
    let parts =
      chars.length === 1
        ? [word + "</w>"]
        : [...chars.slice(0, -1), chars[chars.length - 1] + "</w>"];
    while (parts.length > 1) {
      let best = -1;
      let bestRank = Infinity;
      for (let i = 0; i < parts.length - 1; i++) {
        const rank = this.ranks.get(`${parts[i]} ${parts[i + 1]}`);
        if (rank !== undefined && rank < bestRank) {
          bestRank = rank;
          best = i;
        }
      }
      if (best < 0) break;
      const merged = parts[best] + parts[best + 1];
      // Merge every occurrence of the chosen pair left to right.
      const next: string[] = [];
      let i = 0;
      while (i < parts.length) {
        if (i < parts.length - 1 && parts[i] === parts[best] && parts[i + 1] === parts[best + 1]) {
          next.push(merged);
          i += 2;
        } else {
          next.push(parts[i]);
          i += 1;
        }
      }
      parts = next;
    }
    this.cache.set(word, parts);
    return parts;
  }

  /** Token ids for one text, without the start/end sentinels. */
  encode(text: string): number[] {
    const cleaned = text.replace(/\s+/g, " ").trim().toLowerCase();
    const ids: number[] = [];
    for (const match of cleaned.matchAll(WORD_PATTERN)) {
      const bytes = Buffer.from(match[0], "utf-8");
      let mapped = "";
      for (const b of bytes) mapped += this.byteEncoder[b];
      for (const part of this.bpe(mapped)) {
        const id = this.encoder.get(part);
        if (id === undefined) {
          throw new InvalidJob(`token piece ${JSON.stringify(part)} is not in the vocabulary`);
        }
        ids.push(id);
      }
    }
    return ids;
  }

  /** Fixed-length id row: start sentinel, text, end sentinel, zero padding. */
  tokenize(text: string, contextLength = CONTEXT_LENGTH): number[] {
    const inner = this.encode(text);
    let ids = [this.startId, ...inner, this.endId];
    if (ids.length > contextLength) {
      // Released behavior: truncate and keep the end sentinel last.
      ids = ids.slice(0, contextLength);
      ids[contextLength - 1] = this.endId;
    }
    while (ids.length < contextLength) ids.push(0);
    return ids;
  }
}
