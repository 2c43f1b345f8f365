/**
 * Command line front end.
 *
 *   semdepth-export export --images DIR --crop 416x512 \
 *     --template "This object is {}" --tokens FILE --out DIR \
 *     --weights rn50.safetensors --merges bpe_merges.txt.gz
 *
 * Exit codes: 0 ok, 2 unreadable input (image/weights bytes, missing
 * files), 3 bad job or unusable model, 1 anything unexpected.
 */

import * as fs from "node:fs";
import * as path from "node:path";
import { parseArgs } from "node:util";

import { ImageDecodeError, InvalidJob, ModelUnavailable } from "./errors.js";
import {
  DEFAULT_CROP,
  DEFAULT_TEMPLATE,
  ExportJob,
  exportImageFeatures,
  exportTextFeatures,
  writeManifestFragment,
} from "./exporter.js";
import { Tokenizer, loadMerges } from "./tokenizer.js";
import { MODEL_ID, loadModel } from "./weights.js";

const IMAGE_EXTENSIONS = new Set([".png", ".jpg", ".jpeg"]);

function parseCrop(text: string): { height: number; width: number } {
  const m = /^(\d+)x(\d+)$/.exec(text);
  if (!m) throw new InvalidJob(`crop must look like 416x512, got ${JSON.stringify(text)}`);
  return { height: Number(m[1]), width: Number(m[2]) };
}

function listImages(dir: string): string[] {
  const names = fs
    .readdirSync(dir)
    .filter((n) => IMAGE_EXTENSIONS.has(path.extname(n).toLowerCase()))
    .sort();
  if (names.length === 0) {
    throw new InvalidJob(`no .png/.jpg images in ${dir}`);
  }
  return names.map((n) => path.join(dir, n));
}

function readTokens(file: string): string[] {
  return fs
    .readFileSync(file, "utf-8")
    .split("\n")
    .map((line) => line.trim())
    .filter((line) => line.length > 0);
}

export function main(argv: string[]): number {
  try {
    const { values, positionals } = parseArgs({
      args: argv,
      allowPositionals: true,
      options: {
        images: { type: "string" },
        crop: { type: "string", default: `${DEFAULT_CROP.height}x${DEFAULT_CROP.width}` },
        template: { type: "string", default: DEFAULT_TEMPLATE },
        tokens: { type: "string" },
        out: { type: "string" },
        weights: { type: "string" },
        merges: { type: "string" },
      },
    });
    if (positionals.length !== 1 || positionals[0] !== "export") {
      process.stderr.write("usage: semdepth-export export --images DIR --tokens FILE --out DIR " +
        "--weights FILE --merges FILE [--crop 416x512] [--template \"This object is {}\"]\n");
      return 3;
    }
    for (const flag of ["images", "tokens", "out", "weights", "merges"] as const) {
      if (!values[flag]) throw new InvalidJob(`--${flag} is required`);
    }

    const crop = parseCrop(values.crop!);
    const job: ExportJob = {
      modelId: MODEL_ID,
      imagePaths: listImages(values.images!),
      cropHeight: crop.height,
      cropWidth: crop.width,
      template: values.template!,
      tokens: readTokens(values.tokens!),
      outDir: values.out!,
    };

    const model = loadModel(values.weights!);
    const tokenizer = new Tokenizer(loadMerges(values.merges!));

    const written = exportImageFeatures(model, job);
    for (const w of written) {
      process.stdout.write(`wrote ${w.path} (${w.shape.join("x")})\n`);
    }
    const bankPath = exportTextFeatures(model, tokenizer, job);
    process.stdout.write(`wrote ${bankPath} (${job.tokens.length}x${written[0]?.shape[2] ?? "?"})\n`);
    const fragmentPath = writeManifestFragment(job.outDir, written);
    process.stdout.write(`wrote ${fragmentPath} (${written.length} images)\n`);
    return 0;
  } catch (e) {
    const err = e as Error;
    process.stderr.write(`error: ${err.message}\n`);
    if (err instanceof ImageDecodeError) return 2;
    if (err instanceof ModelUnavailable || err instanceof InvalidJob) return 3;
    const code = (err as NodeJS.ErrnoException).code ?? "";
    if (code.startsWith("ERR_PARSE_ARGS")) return 3; // unknown or malformed flag
    if (code) return 2; // fs-level failure
    return 1;
  }
}
