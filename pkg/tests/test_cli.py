"""End-to-end command flows in a temp directory, including exit codes."""

import json

import numpy as np
import pytest

from semdepth import load_manifest, read_depth_file
from semdepth.cli import main

from conftest import build_dataset


@pytest.fixture
def workdir(tmp_path, rng):
    manifest_path, tb_path, _ = build_dataset(tmp_path, rng)
    return tmp_path, manifest_path, tb_path


def predict_all(root, manifest_path, tb_path, out_dir):
    out_dir.mkdir(exist_ok=True)
    for rec in load_manifest(manifest_path):
        gt = read_depth_file(rec.gt_path)
        code = main(
            [
                "predict",
                "--features", rec.features_path,
                "--text", str(tb_path),
                "--bins", "original",
                "--out-size", f"{gt.height}x{gt.width}",
                "--out", str(out_dir / f"{rec.image_id}.dpm"),
            ]
        )
        assert code == 0


def test_predict_writes_depth_file(workdir):
    root, manifest_path, tb_path = workdir
    rec = load_manifest(manifest_path).records[0]
    out = root / "pred.dpm"
    code = main(
        ["predict", "--features", rec.features_path, "--text", str(tb_path), "--out", str(out)]
    )
    assert code == 0
    dm = read_depth_file(out)
    assert dm.data.shape == (3, 4)  # defaults to the patch grid
    assert dm.data.min() >= 1.0 and dm.data.max() <= 3.0


def test_predict_honors_out_size(workdir):
    root, manifest_path, tb_path = workdir
    rec = load_manifest(manifest_path).records[0]
    out = root / "pred.dpm"
    code = main(
        [
            "predict", "--features", rec.features_path, "--text", str(tb_path),
            "--out-size", "12x20", "--out", str(out),
        ]
    )
    assert code == 0
    assert read_depth_file(out).data.shape == (12, 20)


def test_predict_then_eval_round_trip(workdir, capsys):
    root, manifest_path, tb_path = workdir
    predict_all(root, manifest_path, tb_path, root / "preds")
    capsys.readouterr()  # drop the predict chatter
    report_path = root / "report.txt"
    code = main(
        [
            "eval", "--manifest", str(manifest_path), "--pred-dir", str(root / "preds"),
            "--report", str(report_path),
        ]
    )
    assert code == 0
    text = report_path.read_text()
    assert text.startswith("[overall]\n")
    assert "delta1 = " in text and text.endswith("\n")
    assert capsys.readouterr().out == text  # stdout mirrors the file


def test_eval_pooled_differs_from_per_image(workdir):
    root, manifest_path, tb_path = workdir
    predict_all(root, manifest_path, tb_path, root / "preds")
    a, b = root / "per_image.txt", root / "pooled.txt"
    main(["eval", "--manifest", str(manifest_path), "--pred-dir", str(root / "preds"),
          "--report", str(a)])
    main(["eval", "--manifest", str(manifest_path), "--pred-dir", str(root / "preds"),
          "--agg", "pooled", "--report", str(b)])
    assert a.read_text() != b.read_text()


def test_eval_with_crop(workdir):
    root, manifest_path, tb_path = workdir
    predict_all(root, manifest_path, tb_path, root / "preds")
    report_path = root / "cropped.txt"
    code = main(
        [
            "eval", "--manifest", str(manifest_path), "--pred-dir", str(root / "preds"),
            "--crop", "1,5,1,7", "--report", str(report_path),
        ]
    )
    assert code == 0
    assert "n_pixels = " in report_path.read_text()


def test_ablate_bins_with_presets(workdir):
    root, manifest_path, tb_path = workdir
    report_path = root / "bins.txt"
    code = main(
        [
            "ablate-bins", "--manifest", str(manifest_path), "--text", str(tb_path),
            "--report", str(report_path),
        ]
    )
    assert code == 0
    text = report_path.read_text()
    for name in ("original", "class-dependent-1", "class-dependent-4"):
        assert f"[{name}]\n" in text


def test_ablate_bins_with_custom_partition_file(workdir):
    root, manifest_path, tb_path = workdir
    part_file = root / "parts.json"
    part_file.write_text(json.dumps([
        {"name": "low", "bins": [0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5]},
        {"name": "high", "bins": [2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]},
    ]))
    report_path = root / "bins.txt"
    code = main(
        [
            "ablate-bins", "--manifest", str(manifest_path), "--text", str(tb_path),
            "--partitions", str(part_file), "--report", str(report_path),
        ]
    )
    assert code == 0
    text = report_path.read_text()
    assert "[low]\n" in text and "[high]\n" in text


def test_ablate_bins_class_filter_unknown_class(workdir):
    root, manifest_path, tb_path = workdir
    code = main(
        [
            "ablate-bins", "--manifest", str(manifest_path), "--text", str(tb_path),
            "--class", "warehouse", "--report", str(root / "r.txt"),
        ]
    )
    assert code == 4  # evaluation failure: empty class


def test_ablate_prompts_with_preset_designs(workdir, text_bank_dir):
    root, manifest_path, _ = workdir
    bank_dir, _ = text_bank_dir
    report_path = root / "prompts.txt"
    code = main(
        [
            "ablate-prompts", "--manifest", str(manifest_path), "--text-dir", str(bank_dir),
            "--report", str(report_path),
        ]
    )
    assert code == 0
    text = report_path.read_text()
    for name in ("original", "prompt-1", "prompt-2", "prompt-3"):
        assert f"[{name}]\n" in text


def test_baseline_reproducible(workdir):
    root, manifest_path, _ = workdir
    a, b = root / "a.txt", root / "b.txt"
    assert main(["baseline", "--manifest", str(manifest_path), "--report", str(a)]) == 0
    assert main(["baseline", "--manifest", str(manifest_path), "--report", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().startswith("[baseline]\n")


def test_inspect_prints_token_table(workdir, capsys):
    root, manifest_path, tb_path = workdir
    rec = load_manifest(manifest_path).records[0]
    code = main(
        [
            "inspect", "--features", rec.features_path, "--text", str(tb_path),
            "--patch", "1,2",
        ]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "giant" in out and "unseen" in out
    assert "depth" in out


def test_inspect_patch_out_of_range(workdir):
    root, manifest_path, tb_path = workdir
    rec = load_manifest(manifest_path).records[0]
    code = main(
        [
            "inspect", "--features", rec.features_path, "--text", str(tb_path),
            "--patch", "99,0",
        ]
    )
    assert code == 3


def test_export_pgm_round_trip(workdir):
    root, manifest_path, tb_path = workdir
    rec = load_manifest(manifest_path).records[0]
    pred = root / "p.dpm"
    main(["predict", "--features", rec.features_path, "--text", str(tb_path),
          "--out", str(pred)])
    out = root / "p.pgm"
    code = main(["export-pgm", "--in", str(pred), "--out", str(out)])
    assert code == 0
    raw = out.read_bytes()
    assert raw.startswith(b"P5\n4 3\n65535\n")
    assert len(raw) == len(b"P5\n4 3\n65535\n") + 2 * 12


# ------------------------------------------------------------ exit codes

def test_exit_code_bad_file_format(workdir):
    root, manifest_path, tb_path = workdir
    bad = root / "bad.dce"
    bad.write_bytes(b"GARBAGE DATA")
    code = main(["predict", "--features", str(bad), "--text", str(tb_path),
                 "--out", str(root / "o.dpm")])
    assert code == 2


def test_exit_code_missing_file(workdir):
    root, manifest_path, tb_path = workdir
    code = main(["predict", "--features", str(root / "ghost.dce"), "--text", str(tb_path),
                 "--out", str(root / "o.dpm")])
    assert code == 2


def test_exit_code_unknown_preset(workdir):
    root, manifest_path, tb_path = workdir
    rec = load_manifest(manifest_path).records[0]
    code = main(["predict", "--features", rec.features_path, "--text", str(tb_path),
                 "--bins", "no-such-preset", "--out", str(root / "o.dpm")])
    assert code == 3


def test_exit_code_evaluation_failure(workdir):
    root, manifest_path, tb_path = workdir
    predict_all(root, manifest_path, tb_path, root / "preds")
    # a mask nothing survives: gt lives in (0.5, 9.5)
    code = main(
        [
            "eval", "--manifest", str(manifest_path), "--pred-dir", str(root / "preds"),
            "--min-depth", "9.9", "--max-depth", "10.0", "--report", str(root / "r.txt"),
        ]
    )
    assert code == 4


def test_exit_code_success_is_zero(workdir):
    root, manifest_path, tb_path = workdir
    rec = load_manifest(manifest_path).records[0]
    assert main(["predict", "--features", rec.features_path, "--text", str(tb_path),
                 "--out", str(root / "o.dpm")]) == 0
