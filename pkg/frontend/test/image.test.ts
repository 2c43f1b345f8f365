import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { describe, expect, it } from "vitest";
import * as jpeg from "jpeg-js";

import { IMAGE_MEAN, IMAGE_STD, decodeImage, preprocess } from "../src/image.js";
import { ImageDecodeError } from "../src/errors.js";
import { writePng } from "./helpers.js";

function tmp(): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), "img-"));
}

describe("decodeImage", () => {
  it("round-trips a PNG", () => {
    const file = writePng(path.join(tmp(), "a.png"), 8, 6);
    const img = decodeImage(file);
    expect(img.width).toBe(8);
    expect(img.height).toBe(6);
    // helper writes x-gradient in red: last column saturates
    expect(img.rgba[(0 * 8 + 7) * 4]).toBe(255);
    expect(img.rgba[3]).toBe(255); // alpha
  });

  it("decodes JPEG as well", () => {
    const raw = Buffer.alloc(16 * 16 * 4);
    for (let i = 0; i < raw.length; i += 4) {
      raw[i] = 200;
      raw[i + 3] = 255;
    }
    const file = path.join(tmp(), "b.jpg");
    fs.writeFileSync(file, jpeg.encode({ data: raw, width: 16, height: 16 }, 95).data);
    const img = decodeImage(file);
    expect(img.width).toBe(16);
    expect(Math.abs(img.rgba[0] - 200)).toBeLessThan(10); // lossy
  });

  it("rejects files that are neither PNG nor JPEG", () => {
    const file = path.join(tmp(), "c.png");
    fs.writeFileSync(file, "definitely not an image");
    expect(() => decodeImage(file)).toThrow(ImageDecodeError);
  });

  it("rejects a truncated PNG", () => {
    const file = writePng(path.join(tmp(), "d.png"), 8, 8);
    const blob = fs.readFileSync(file);
    fs.writeFileSync(file, blob.subarray(0, 20));
    expect(() => decodeImage(file)).toThrow(ImageDecodeError);
  });

  it("rejects a missing file", () => {
    expect(() => decodeImage("/nonexistent/x.png")).toThrow(ImageDecodeError);
  });
});

describe("preprocess", () => {
  it("standardizes with the published constants", () => {
    const img = { width: 2, height: 2, rgba: new Uint8Array(16).fill(128) };
    const t = preprocess(img, 2, 2);
    expect(t.shape).toEqual([3, 2, 2]);
    for (let c = 0; c < 3; c++) {
      expect(t.data[c * 4]).toBeCloseTo((128 / 255 - IMAGE_MEAN[c]) / IMAGE_STD[c], 5);
    }
  });

  it("takes the centered window", () => {
    // 4x4 image, value = 10*y + x in the red channel
    const rgba = new Uint8Array(4 * 4 * 4);
    for (let y = 0; y < 4; y++) {
      for (let x = 0; x < 4; x++) rgba[(y * 4 + x) * 4] = 10 * y + x;
    }
    const t = preprocess({ width: 4, height: 4, rgba }, 2, 2);
    const back = (v: number) => Math.round((v * IMAGE_STD[0] + IMAGE_MEAN[0]) * 255);
    expect(back(t.data[0])).toBe(11); // (1,1)
    expect(back(t.data[3])).toBe(22); // (2,2)
  });

  it("rejects images smaller than the crop", () => {
    const img = { width: 4, height: 4, rgba: new Uint8Array(64) };
    expect(() => preprocess(img, 8, 8)).toThrow(/smaller than/);
  });
});
