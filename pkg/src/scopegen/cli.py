"""Command-line interface.

Exit codes: 0 success, 1 configuration problem, 2 runtime failure.
Set SCOPEGEN_LOG_LEVEL (DEBUG/INFO/WARNING/ERROR) to control verbosity.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from . import config as config_mod
from .analysis import count_by_integration, detect_peaks, link_traces, radial_center
from .arrayio import png16_bytes, quantize_uint16, write_npy
from .dataset import generate_dataset, record_to_dict, render_sample
from .errors import ConfigurationError, EngineError

log = logging.getLogger("scopegen")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scopegen",
        description="Synthetic microscopy image generation and baselines.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="check a config document")
    p_validate.add_argument("config", help="path to a JSON config")

    p_generate = sub.add_parser("generate", help="render a dataset to disk")
    p_generate.add_argument("config")
    p_generate.add_argument("-o", "--out", required=True, help="output directory")
    p_generate.add_argument("-n", "--count", type=int, required=True)
    p_generate.add_argument("--start", type=int, default=0)
    p_generate.add_argument("--workers", type=int, default=1)

    p_preview = sub.add_parser("preview", help="render one sample")
    p_preview.add_argument("config")
    p_preview.add_argument("-i", "--index", type=int, default=0)
    p_preview.add_argument("-o", "--out", help="write the image here (.png or .npy)")
    p_preview.add_argument(
        "--records", action="store_true", help="print property records as JSON"
    )

    p_serve = sub.add_parser("serve", help="run the HTTP preview service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)

    p_analyze = sub.add_parser("analyze", help="classical baselines")
    analyze_sub = p_analyze.add_subparsers(dest="baseline", required=True)

    p_rc = analyze_sub.add_parser("radial-center", help="sub-pixel spot center")
    p_rc.add_argument("image", help=".npy image")

    p_detect = analyze_sub.add_parser("detect", help="peaks in a probability map")
    p_detect.add_argument("image", help=".npy map")
    p_detect.add_argument("--threshold", type=float, default=0.5)
    p_detect.add_argument("--min-area", type=int, default=2)

    p_count = analyze_sub.add_parser("count", help="integrate a density map")
    p_count.add_argument("image", help=".npy map")

    p_link = analyze_sub.add_parser("link", help="link detections across frames")
    p_link.add_argument("stack", help=".npy stack, frames first")
    p_link.add_argument("--threshold", type=float, default=0.5)
    p_link.add_argument("--min-area", type=int, default=2)
    p_link.add_argument("--max-distance", type=float, default=5.0)
    p_link.add_argument("--memory", type=int, default=0)

    return parser


def _cmd_validate(args) -> int:
    try:
        cfg = config_mod.load(args.config)
    except ConfigurationError as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return 1
    print(f"valid (hash {config_mod.config_hash(cfg)})")
    return 0


def _cmd_generate(args) -> int:
    cfg = config_mod.load(args.config)
    summary = generate_dataset(
        cfg, args.out, count=args.count, start=args.start, workers=args.workers
    )
    print(
        f"wrote {summary['count']} samples to {summary['out_dir']} "
        f"in {summary['seconds']:.2f}s "
        f"({summary['samples_per_second']:.1f} samples/s)"
    )
    return 0


def _cmd_preview(args) -> int:
    cfg = config_mod.load(args.config)
    image, label = render_sample(cfg, args.index)
    data = image.data
    print(
        f"sample {args.index}: shape {data.shape}, dtype {data.dtype}, "
        f"{len(image.records)} records"
        + (f", label shape {label.data.shape}" if label is not None else "")
    )
    if args.records:
        print(json.dumps([record_to_dict(r) for r in image.records], indent=2))
    if args.out:
        if args.out.endswith(".npy"):
            write_npy(args.out, data)
        elif args.out.endswith(".png"):
            view = np.abs(data) if np.iscomplexobj(data) else data
            quantized, lo, hi = quantize_uint16(np.asarray(view, dtype=float))
            with open(args.out, "wb") as handle:
                handle.write(png16_bytes(quantized))
            log.info("quantized [%g, %g] onto uint16", lo, hi)
        else:
            print("output must end in .npy or .png", file=sys.stderr)
            return 1
        print(f"wrote {args.out}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return 0


def _load_array(path) -> np.ndarray:
    return np.load(path, allow_pickle=False)


def _cmd_analyze(args) -> int:
    if args.baseline == "radial-center":
        y, x = radial_center(_load_array(args.image))
        print(json.dumps({"y": y, "x": x}))
    elif args.baseline == "detect":
        detections = detect_peaks(
            _load_array(args.image), threshold=args.threshold, min_area=args.min_area
        )
        print(
            json.dumps(
                [
                    {"y": d.y, "x": d.x, "area": d.area, "strength": d.strength}
                    for d in detections
                ]
            )
        )
    elif args.baseline == "count":
        print(json.dumps({"count": count_by_integration(_load_array(args.image))}))
    elif args.baseline == "link":
        stack = _load_array(args.stack)
        if stack.ndim != 3:
            print("stack must be 3-D (frames, height, width)", file=sys.stderr)
            return 1
        frames = [
            [(d.y, d.x) for d in detect_peaks(frame, args.threshold, args.min_area)]
            for frame in stack
        ]
        traces = link_traces(frames, max_distance=args.max_distance, memory=args.memory)
        print(
            json.dumps(
                [
                    {"points": [{"frame": f, "y": y, "x": x} for f, y, x in t.points]}
                    for t in traces
                ]
            )
        )
    return 0


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        level=os.environ.get("SCOPEGEN_LOG_LEVEL", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "validate": _cmd_validate,
        "generate": _cmd_generate,
        "preview": _cmd_preview,
        "serve": _cmd_serve,
        "analyze": _cmd_analyze,
    }
    try:
        return handlers[args.command](args)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except EngineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
