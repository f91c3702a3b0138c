#!/usr/bin/env python3
"""Render one sample from every shipped config into a gallery directory.

Writes a 16-bit PNG preview of each image (and its label where the label
is a 2-D map), plus a records.json with the sampled ground truth.

Usage:
    python3 scripts/render_gallery.py [--out gallery] [--index 0]
"""

import argparse
import json
from pathlib import Path

import numpy as np

from scopegen.arrayio import quantize_uint16, write_png16
from scopegen.config import load
from scopegen.dataset import record_to_dict, render_sample


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--configs", default="configs", help="config directory")
    parser.add_argument("--out", default="gallery", help="output directory")
    parser.add_argument("--index", type=int, default=0, help="sample index")
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    manifest = {}
    for path in sorted(Path(args.configs).glob("*.json")):
        cfg = load(path)
        image, label = render_sample(cfg, args.index)
        stem = path.stem

        view = np.abs(image.data) if np.iscomplexobj(image.data) else image.data
        quantized, lo, hi = quantize_uint16(np.asarray(view, dtype=float))
        write_png16(out / f"{stem}.png", quantized)
        entry = {
            "image": f"{stem}.png",
            "display_range": [lo, hi],
            "records": [record_to_dict(r) for r in image.records],
        }

        if label is not None and label.data.ndim == 2:
            lab_q, llo, lhi = quantize_uint16(np.asarray(label.data, dtype=float))
            write_png16(out / f"{stem}_label.png", lab_q)
            entry["label"] = f"{stem}_label.png"
            entry["label_range"] = [llo, lhi]
        elif label is not None:
            entry["label_shape"] = list(np.asarray(label.data).shape)

        manifest[stem] = entry
        print(f"{stem}: image {image.data.shape}, "
              f"{len(image.records)} records"
              + (f", label {np.asarray(label.data).shape}" if label is not None else ""))

    with open(out / "records.json", "w", encoding="utf-8") as handle:
        json.dump(manifest, handle, indent=2)
    print(f"wrote gallery to {out}/")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
