/**
 * Batch export: images and prompt tokens in, tensor containers out. The
 * containers are exactly what the depth side reads — rank-3 feature maps
 * with a source_id, one rank-2 text bank carrying tokens and template, and
 * a manifest fragment listing the written feature files.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { InvalidJob, ModelUnavailable } from "./errors.js";
import { decodeImage, preprocess } from "./image.js";
import { ClipModel, runText, runVisual } from "./model.js";
import { Tokenizer } from "./tokenizer.js";
import { encodeContainer } from "./container.js";
import { MODEL_ID } from "./weights.js";

export interface ExportJob {
  modelId: string;
  imagePaths: string[];
  cropHeight: number;
  cropWidth: number;
  template: string;
  tokens: string[];
  outDir: string;
}

export const DEFAULT_CROP = { height: 416, width: 512 };
export const DEFAULT_TEMPLATE = "This object is {}";

export function validateJob(job: ExportJob): void {
  if (job.modelId !== MODEL_ID) {
    throw new ModelUnavailable(`only ${MODEL_ID} is supported, got ${JSON.stringify(job.modelId)}`);
  }
  if (
    !Number.isInteger(job.cropHeight) ||
    !Number.isInteger(job.cropWidth) ||
    job.cropHeight < 1 ||
    job.cropWidth < 1
  ) {
    throw new InvalidJob(`crop must be positive integers, got ${job.cropHeight}x${job.cropWidth}`);
  }
  if (job.tokens.length === 0) {
    throw new InvalidJob("token list is empty");
  }
  if (job.tokens.some((t) => !t.trim())) {
    throw new InvalidJob("token list contains a blank entry");
  }
  if (!job.template.includes("{}")) {
    throw new InvalidJob(`template needs a {} slot, got ${JSON.stringify(job.template)}`);
  }
  const ids = job.imagePaths.map(imageId);
  const dup = ids.find((id, i) => ids.indexOf(id) !== i);
  if (dup !== undefined) {
    throw new InvalidJob(`two images share the id ${JSON.stringify(dup)}`);
  }
}

/** Image id = file name without its extension. */
export function imageId(imagePath: string): string {
  const base = path.basename(imagePath);
  const dot = base.lastIndexOf(".");
  return dot > 0 ? base.slice(0, dot) : base;
}

export interface ExportedFeatureMap {
  imageId: string;
  path: string;
  shape: [number, number, number]; // (Hf, Wf, C)
}

/** One rank-3 container per image, named <image_id>.dce in the out dir. */
export function exportImageFeatures(model: ClipModel, job: ExportJob): ExportedFeatureMap[] {
  validateJob(job);
  fs.mkdirSync(job.outDir, { recursive: true });
  const written: ExportedFeatureMap[] = [];
  for (const imagePath of job.imagePaths) {
    const id = imageId(imagePath);
    const input = preprocess(decodeImage(imagePath), job.cropHeight, job.cropWidth);
    const features = runVisual(model.visual, input);
    const outPath = path.join(job.outDir, `${id}.dce`);
    fs.writeFileSync(outPath, encodeContainer(features, { source_id: id }));
    written.push({
      imageId: id,
      path: outPath,
      shape: [features.shape[0], features.shape[1], features.shape[2]],
    });
  }
  return written;
}

/** One rank-2 container, row k = template with token k substituted. */
export function exportTextFeatures(
  model: ClipModel,
  tokenizer: Tokenizer,
  job: ExportJob,
): string {
  validateJob(job);
  fs.mkdirSync(job.outDir, { recursive: true });
  const rows = job.tokens.map((token) => {
    const ids = tokenizer.tokenize(job.template.replace("{}", token));
    return runText(model.text, ids);
  });
  const c = rows[0].length;
  const bank = { data: new Float32Array(rows.length * c), shape: [rows.length, c] };
  rows.forEach((row, k) => bank.data.set(row, k * c));
  const outPath = path.join(job.outDir, "text_bank.dce");
  fs.writeFileSync(
    outPath,
    encodeContainer(bank, { template: job.template, tokens: [...job.tokens] }),
  );
  return outPath;
}

/**
 * Feature-file index for the depth side: JSON lines with image_id and a
 * features_path relative to the fragment itself. Ground truth and scene
 * classes are merged in by whoever owns that data.
 */
export function writeManifestFragment(outDir: string, written: ExportedFeatureMap[]): string {
  const fragmentPath = path.join(outDir, "manifest_fragment.jsonl");
  const lines = written.map((w) =>
    JSON.stringify({ image_id: w.imageId, features_path: path.basename(w.path) }),
  );
  fs.writeFileSync(fragmentPath, lines.join("\n") + (lines.length ? "\n" : ""));
  return fragmentPath;
}
