"""Shared fixtures: random model instances and a small on-disk dataset."""

from __future__ import annotations

import numpy as np
import pytest

from semdepth import (
    BinPartition,
    DepthMap,
    FeatureMap,
    Manifest,
    ManifestRecord,
    TextBank,
    preset_prompt_sweep,
    write_feature_map,
    write_depth_file,
    write_manifest,
    write_text_bank,
)

TOKENS7 = (
    "giant",
    "extremely close",
    "close",
    "not in distance",
    "a little remote",
    "far",
    "unseen",
)


def random_instance(rng, max_hw=8, max_c=16, max_k=7):
    """Random (FeatureMap, TextBank, BinPartition) with small dimensions."""
    hf = int(rng.integers(1, max_hw + 1))
    wf = int(rng.integers(1, max_hw + 1))
    c = int(rng.integers(1, max_c + 1))
    k = int(rng.integers(1, max_k + 1))
    fm = FeatureMap(rng.standard_normal((hf, wf, c)), source_id="synthetic")
    tb = TextBank(tuple(f"tok{i}" for i in range(k)), rng.standard_normal((k, c)))
    bins = 0.5 + np.cumsum(rng.uniform(0.1, 1.0, size=k))
    bp = BinPartition("random", bins)
    return fm, tb, bp


def build_dataset(root, rng, n_images=3, hf=3, wf=4, c=8, k=7, with_gt=True):
    """Write feature maps, ground truth and a manifest under `root`.

    Ground truth lives in (0, 10] with a sprinkling of invalid pixels so the
    mask path is always exercised. Returns (manifest_path, text_bank_path, tb).
    """
    scene_classes = ("kitchen", "bedroom")
    records = []
    for i in range(n_images):
        image_id = f"img{i:03d}"
        fm = FeatureMap(rng.standard_normal((hf, wf, c)), source_id=image_id)
        fpath = root / f"{image_id}.dce"
        write_feature_map(fpath, fm)
        gpath = None
        if with_gt:
            h, w = hf * 2, wf * 2
            gt = rng.uniform(0.5, 9.5, size=(h, w))
            gt[0, 0] = 0.0  # invalid: sensor dropout
            gt[0, 1] = np.nan
            gpath = root / f"{image_id}_gt.dpm"
            write_depth_file(gpath, DepthMap(gt))
        records.append(
            ManifestRecord(
                image_id=image_id,
                features_path=str(fpath.name),
                gt_path=str(gpath.name) if gpath else None,
                scene_class=scene_classes[i % len(scene_classes)],
            )
        )
    manifest_path = root / "manifest.jsonl"
    write_manifest(manifest_path, Manifest(tuple(records)))
    tb = TextBank(TOKENS7, rng.standard_normal((k, c)))
    tb_path = root / "text_bank.dce"
    write_text_bank(tb_path, tb)
    return manifest_path, tb_path, tb


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def dataset(tmp_path, rng):
    manifest_path, tb_path, tb = build_dataset(tmp_path, rng)
    return {"root": tmp_path, "manifest": manifest_path, "text_bank": tb_path, "tb": tb}


@pytest.fixture
def text_bank_dir(tmp_path, rng):
    """One text bank per preset prompt design, for prompt-sweep runs."""
    d = tmp_path / "banks"
    d.mkdir()
    banks = {}
    for design in preset_prompt_sweep().designs:
        tb = TextBank(design.tokens, rng.standard_normal((len(design.tokens), 8)))
        write_text_bank(d / f"{design.name}.dce", tb)
        banks[design.name] = tb
    return d, banks
