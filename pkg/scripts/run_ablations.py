# Run the preset bin and prompt sweeps over one dataset directory and write
# both report files. The directory must look like make_synthetic_dataset.py
# output: manifest.jsonl, text_bank.dce, banks/<design>.dce.

import argparse
from pathlib import Path

from semdepth import (
    EvalMask,
    PRESET_PARTITIONS,
    Temperature,
    format_report,
    load_manifest,
    preset_bin_sweep,
    preset_prompt_sweep,
    read_text_bank,
    run_bin_sweep,
    run_prompt_sweep,
    write_report,
)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--data", required=True, help="dataset directory")
    parser.add_argument("--report-dir", required=True)
    parser.add_argument("--temperature", type=float, default=0.1)
    parser.add_argument("--min-depth", type=float, default=0.0)
    parser.add_argument("--max-depth", type=float, default=10.0)
    parser.add_argument("--class", dest="scene_class", default="all")
    args = parser.parse_args()

    data = Path(args.data)
    report_dir = Path(args.report_dir)
    report_dir.mkdir(parents=True, exist_ok=True)
    manifest = load_manifest(data / "manifest.jsonl")
    mask = EvalMask(args.min_depth, args.max_depth)
    t = Temperature(args.temperature)

    tb = read_text_bank(data / "text_bank.dce")
    bin_cfg = preset_bin_sweep(class_filter=args.scene_class)
    bin_table = run_bin_sweep(bin_cfg, manifest, tb, t, mask)
    write_report(bin_table, report_dir / "bin_sweep.txt")
    print(format_report(bin_table))

    prompt_cfg = preset_prompt_sweep()
    banks = {
        d.name: read_text_bank(data / "banks" / f"{d.name}.dce")
        for d in prompt_cfg.designs
    }
    prompt_table = run_prompt_sweep(
        prompt_cfg, manifest, banks, PRESET_PARTITIONS["original"], t, mask,
        class_filter=args.scene_class,
    )
    write_report(prompt_table, report_dir / "prompt_sweep.txt")
    print(format_report(prompt_table))
    print(f"reports under {report_dir}")


if __name__ == "__main__":
    main()
