# Build a small synthetic dataset with planted depth structure.
#
# Each image gets a smooth per-patch bin index field; the patch embedding is
# the matching token embedding plus noise, and the ground truth is the bin
# depth plus jitter. The engine should therefore recover depth far better
# than chance, which makes the dataset useful for demos and for exercising
# the eval/ablation commands end to end.
#
# Writes: features/<id>.dce, gt/<id>.dpm, banks/<design>.dce, text_bank.dce,
# manifest.jsonl

import argparse
from pathlib import Path

import numpy as np

from semdepth import (
    DepthMap,
    FeatureMap,
    Manifest,
    ManifestRecord,
    PRESET_PARTITIONS,
    PRESET_PROMPTS,
    TextBank,
    write_depth_file,
    write_feature_map,
    write_manifest,
    write_text_bank,
)

SCENES = ("kitchen", "bedroom", "bathroom", "office")


def parse_size(text):
    h, w = text.lower().split("x")
    return int(h), int(w)


def smooth_bin_field(rng, hf, wf, k):
    """Random oriented ramp quantized into k levels."""
    a, b = rng.uniform(0.3, 1.0, size=2)
    r = np.arange(hf)[:, None] / max(hf - 1, 1)
    c = np.arange(wf)[None, :] / max(wf - 1, 1)
    v = (a * r + b * c) / (a + b) + rng.normal(0.0, 0.05, size=(hf, wf))
    return np.clip((v * k).astype(int), 0, k - 1)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", required=True, help="output dataset directory")
    parser.add_argument("--images", type=int, default=8)
    parser.add_argument("--grid", default="13x17", help="patch grid HfxWf")
    parser.add_argument("--pixel-size", default="104x136", help="ground-truth HxW")
    parser.add_argument("--channels", type=int, default=64)
    parser.add_argument("--noise", type=float, default=0.45, help="embedding noise scale")
    parser.add_argument("--invalid-frac", type=float, default=0.02)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    hf, wf = parse_size(args.grid)
    h, w = parse_size(args.pixel_size)
    rng = np.random.default_rng(args.seed)
    out = Path(args.out)
    (out / "features").mkdir(parents=True, exist_ok=True)
    (out / "gt").mkdir(exist_ok=True)
    (out / "banks").mkdir(exist_ok=True)

    tokens = PRESET_PROMPTS["original"]
    k = len(tokens)
    bins = PRESET_PARTITIONS["original"].bins
    emb = rng.standard_normal((k, args.channels))

    # the planted embeddings ARE the original design; the other designs get a
    # perturbed copy so prompt ablations have a real (and known) winner
    write_text_bank(out / "text_bank.dce", TextBank(tokens, emb))
    for name, words in PRESET_PROMPTS.items():
        bank_emb = emb if name == "original" else emb + rng.normal(0, 2.0, emb.shape)
        write_text_bank(out / "banks" / f"{name}.dce", TextBank(words, bank_emb))

    records = []
    for i in range(args.images):
        image_id = f"synth_{i:04d}"
        field = smooth_bin_field(rng, hf, wf, k)

        feats = emb[field] * rng.uniform(0.6, 1.4, size=(hf, wf, 1))
        feats = feats + args.noise * rng.standard_normal((hf, wf, args.channels))
        fpath = out / "features" / f"{image_id}.dce"
        write_feature_map(fpath, FeatureMap(feats, source_id=image_id))

        rows = (np.arange(h) * hf) // h
        cols = (np.arange(w) * wf) // w
        gt = bins[field][np.ix_(rows, cols)] * rng.uniform(0.92, 1.08, size=(h, w))
        gt[rng.random((h, w)) < args.invalid_frac] = 0.0  # sensor dropouts
        gpath = out / "gt" / f"{image_id}.dpm"
        write_depth_file(gpath, DepthMap(gt))

        records.append(
            ManifestRecord(
                image_id=image_id,
                features_path=f"features/{image_id}.dce",
                gt_path=f"gt/{image_id}.dpm",
                scene_class=SCENES[i % len(SCENES)],
            )
        )

    write_manifest(out / "manifest.jsonl", Manifest(tuple(records)))
    print(f"wrote {args.images} images under {out}")
    print(f"  patch grid {hf}x{wf}, pixels {h}x{w}, {args.channels} channels")
    print(f"  manifest: {out / 'manifest.jsonl'}")


if __name__ == "__main__":
    main()
