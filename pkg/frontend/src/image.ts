/**
 * Image loading for export: PNG or JPEG in, center-cropped and normalized
 * [3, H, W] tensor out. Normalization uses the constants published with the
 * pretrained model.
 */

import * as fs from "node:fs";
import { PNG } from "pngjs";
import * as jpeg from "jpeg-js";

import { Tensor, zeros } from "./tensor.js";
import { ImageDecodeError } from "./errors.js";

export const IMAGE_MEAN = [0.48145466, 0.4578275, 0.40821073];
export const IMAGE_STD = [0.26862954, 0.26130258, 0.27577711];

export interface RgbImage {
  width: number;
  height: number;
  rgba: Uint8Array; // 4 bytes per pixel, row-major
}

export function decodeImage(path: string): RgbImage {
  let blob: Buffer;
  try {
    blob = fs.readFileSync(path);
  } catch (e) {
    throw new ImageDecodeError(`cannot read ${path}: ${(e as Error).message}`);
  }
  try {
    if (blob.length >= 8 && blob[0] === 0x89 && blob[1] === 0x50) {
      const png = PNG.sync.read(blob);
      return { width: png.width, height: png.height, rgba: png.data };
    }
    if (blob.length >= 2 && blob[0] === 0xff && blob[1] === 0xd8) {
      const img = jpeg.decode(blob, { useTArray: true, formatAsRGBA: true });
      return { width: img.width, height: img.height, rgba: img.data };
    }
  } catch (e) {
    throw new ImageDecodeError(`${path}: ${(e as Error).message}`);
  }
  throw new ImageDecodeError(`${path}: neither PNG nor JPEG`);
}

/**
 * Center crop then scale to [0, 1] and standardize per channel.
 * The source must be at least as large as the crop.
 */
export function preprocess(img: RgbImage, cropHeight: number, cropWidth: number): Tensor {
  if (img.height < cropHeight || img.width < cropWidth) {
    throw new ImageDecodeError(
      `image is ${img.height}x${img.width}, smaller than the ${cropHeight}x${cropWidth} crop`,
    );
  }
  const top = Math.floor((img.height - cropHeight) / 2);
  const left = Math.floor((img.width - cropWidth) / 2);
  const out = zeros([3, cropHeight, cropWidth]);
  const plane = cropHeight * cropWidth;
  for (let y = 0; y < cropHeight; y++) {
    for (let x = 0; x < cropWidth; x++) {
      const src = ((top + y) * img.width + left + x) * 4;
      const dst = y * cropWidth + x;
      for (let c = 0; c < 3; c++) {
        out.data[c * plane + dst] = (img.rgba[src + c] / 255 - IMAGE_MEAN[c]) / IMAGE_STD[c];
      }
    }
  }
  return out;
}
