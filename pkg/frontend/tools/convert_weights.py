# Convert a released CLIP ResNet-50 checkpoint to the f32 safetensors file
# the exporter loads.
#
# Accepts either the original torchscript archive (RN50.pt) or a plain
# state-dict checkpoint. Tensor names are kept verbatim; everything is cast
# to float32 little-endian. The text head count is recorded in the file
# metadata so the loader does not have to guess it.
#
# Needs torch. With --merges-out, also copies the byte-pair merge table out
# of an installed `clip` or `open_clip` package for the tokenizer.

import argparse
import json
import shutil
import struct
import sys
from pathlib import Path


def load_state_dict(path):
    import torch

    try:
        model = torch.jit.load(path, map_location="cpu")
        return model.state_dict()
    except RuntimeError:
        pass
    blob = torch.load(path, map_location="cpu", weights_only=False)
    if isinstance(blob, dict) and "state_dict" in blob:
        blob = blob["state_dict"]
    if hasattr(blob, "state_dict"):
        blob = blob.state_dict()
    # open_clip prefixes the visual/text tree differently; normalize the
    # common "module." wrapper only, anything else is passed through.
    return {k.removeprefix("module."): v for k, v in blob.items()}


def write_safetensors(path, tensors, metadata):
    header = {"__metadata__": metadata}
    payloads = []
    offset = 0
    for name, tensor in tensors.items():
        data = tensor.detach().cpu().float().contiguous().numpy().astype("<f4").tobytes()
        header[name] = {
            "dtype": "F32",
            "shape": list(tensor.shape),
            "data_offsets": [offset, offset + len(data)],
        }
        payloads.append(data)
        offset += len(data)
    blob = json.dumps(header).encode("utf-8")
    with open(path, "wb") as f:
        f.write(struct.pack("<Q", len(blob)))
        f.write(blob)
        for data in payloads:
            f.write(data)


def find_bundled_merges():
    candidates = []
    try:
        import clip

        candidates.append(Path(clip.__file__).parent / "bpe_simple_vocab_16e6.txt.gz")
    except ImportError:
        pass
    try:
        import open_clip

        candidates.append(Path(open_clip.__file__).parent / "bpe_simple_vocab_16e6.txt.gz")
    except ImportError:
        pass
    for c in candidates:
        if c.exists():
            return c
    return None


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("checkpoint", help="RN50.pt or a state-dict file")
    parser.add_argument("out", help="destination .safetensors path")
    parser.add_argument("--merges-out", help="also copy the BPE merge table here")
    args = parser.parse_args()

    state = load_state_dict(args.checkpoint)
    if "visual.attnpool.v_proj.weight" not in state:
        sys.exit("checkpoint has no visual.attnpool tree; this is not a CLIP ResNet")
    width = state["token_embedding.weight"].shape[1]
    heads = max(1, width // 64)
    floats = {k: v for k, v in state.items() if v.is_floating_point()}
    write_safetensors(args.out, floats, {"text_heads": str(heads)})
    print(f"wrote {args.out} ({len(floats)} tensors, text_heads={heads})")

    if args.merges_out:
        source = find_bundled_merges()
        if source is None:
            sys.exit(
                "no installed clip/open_clip package to copy the merge table from; "
                "fetch bpe_simple_vocab_16e6.txt.gz yourself"
            )
        shutil.copy(source, args.merges_out)
        print(f"wrote {args.merges_out}")


if __name__ == "__main__":
    main()
