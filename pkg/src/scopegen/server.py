"""HTTP preview service for interactive pipeline exploration.

The service is stateless: every request carries the full config document,
and rendering the same (config, index) twice returns identical bytes.
Endpoints:

- GET  /v1/health    liveness probe
- GET  /v1/registry  feature catalog (drives client-side forms)
- POST /v1/validate  structural check, returns diagnostics with paths
- POST /v1/render    one sample as base64 16-bit PNG plus its records
- POST /v1/compare   uploaded image vs a rendered sample: previews,
                     histogram overlap, background / noise / SNR
                     estimates (multipart; capped upload size)
"""

from __future__ import annotations

import base64
import io
import json

import numpy as np
from fastapi import FastAPI, File, Form, HTTPException, Request, UploadFile
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import config as config_mod
from .arrayio import png16_bytes, quantize_uint16
from .dataset import record_to_dict, render_sample
from .errors import ConfigurationError, EngineError, ValidationError
from .features import registry_schema

MAX_UPLOAD_BYTES = 16 * 1024 * 1024
_COMPONENTS = ("abs", "real", "imag", "phase")


class RenderRequest(BaseModel):
    config: dict
    index: int = Field(default=0, ge=0)
    component: str = Field(default="abs")
    include_label: bool = True


class ValidateRequest(BaseModel):
    config: dict


def _parse_config(document: dict) -> config_mod.PipelineConfig:
    try:
        return config_mod.from_dict(document)
    except ConfigurationError as exc:
        detail = {"error": str(exc), "path": getattr(exc, "path", "$")}
        raise HTTPException(status_code=422, detail=detail) from exc


def _component_view(array: np.ndarray, component: str) -> np.ndarray:
    if component not in _COMPONENTS:
        raise HTTPException(
            status_code=422,
            detail={"error": f"component must be one of {_COMPONENTS}"},
        )
    if not np.iscomplexobj(array):
        return np.asarray(array, dtype=float)
    views = {
        "abs": np.abs,
        "real": np.real,
        "imag": np.imag,
        "phase": np.angle,
    }
    return np.asarray(views[component](array), dtype=float)


def _image_payload(array: np.ndarray, component: str) -> dict:
    is_complex = bool(np.iscomplexobj(array))
    view = _component_view(array, component)
    if view.ndim == 3:
        view = view[view.shape[0] // 2]  # middle slice of a volume
    if view.ndim < 2:
        view = np.atleast_2d(view)
    quantized, lo, hi = quantize_uint16(view)
    return {
        "png_base64": base64.b64encode(png16_bytes(quantized)).decode("ascii"),
        "width": int(view.shape[1]),
        "height": int(view.shape[0]),
        "lo": lo,
        "hi": hi,
        "component": component if is_complex else "real",
        "complex": is_complex,
        "shape": list(np.asarray(array).shape),
    }


def create_app() -> FastAPI:
    app = FastAPI(title="scopegen preview service", version="1.0")

    @app.exception_handler(EngineError)
    async def engine_error_handler(request: Request, exc: EngineError):
        status = 422 if isinstance(exc, ConfigurationError) else 500
        return JSONResponse(
            status_code=status,
            content={"detail": {"error": str(exc), "path": getattr(exc, "path", None)}},
        )

    @app.get("/v1/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.get("/v1/registry")
    def registry() -> dict:
        return {"features": registry_schema()}

    @app.post("/v1/validate")
    def validate(body: ValidateRequest) -> dict:
        try:
            cfg = config_mod.from_dict(body.config)
        except ConfigurationError as exc:
            return {
                "valid": False,
                "error": str(exc),
                "path": getattr(exc, "path", "$"),
            }
        return {"valid": True, "config_hash": config_mod.config_hash(cfg)}

    @app.post("/v1/render")
    def render(body: RenderRequest) -> dict:
        cfg = _parse_config(body.config)
        image, label = render_sample(cfg, body.index)
        payload = {
            "config_hash": config_mod.config_hash(cfg),
            "index": body.index,
            "image": _image_payload(image.data, body.component),
            "records": [record_to_dict(r) for r in image.records],
        }
        if body.include_label and label is not None:
            payload["label"] = _image_payload(label.data, body.component)
        else:
            payload["label"] = None
        return payload

    @app.post("/v1/compare")
    async def compare(
        file: UploadFile = File(...),
        config: str = Form(...),
        index: int = Form(0),
        bins: int = Form(64),
    ) -> dict:
        raw = await file.read()
        if len(raw) > MAX_UPLOAD_BYTES:
            raise HTTPException(
                status_code=413,
                detail={
                    "error": "upload too large",
                    "limit_bytes": MAX_UPLOAD_BYTES,
                },
            )
        if not (2 <= bins <= 4096):
            raise HTTPException(
                status_code=422, detail={"error": "bins must be in [2, 4096]"}
            )
        try:
            document = json.loads(config)
        except json.JSONDecodeError as exc:
            raise HTTPException(
                status_code=422, detail={"error": f"config is not JSON: {exc.msg}"}
            ) from exc
        cfg = _parse_config(document)

        from .arrayio import read_image

        try:
            experimental = read_image(io.BytesIO(raw))
        except Exception as exc:  # Pillow's error zoo
            raise HTTPException(
                status_code=422, detail={"error": f"cannot decode upload: {exc}"}
            ) from exc

        image, _ = render_sample(cfg, index)
        synthetic = _component_view(image.data, "abs")
        hist = histogram_overlap(experimental, synthetic, bins)
        return {
            "config_hash": config_mod.config_hash(cfg),
            "index": index,
            "overlap": hist["overlap"],
            "bins": hist["bins"],
            "experimental": {
                "histogram": hist["experimental"],
                **image_stats(experimental),
                "image": _image_payload(experimental, "abs"),
            },
            "synthetic": {
                "histogram": hist["synthetic"],
                **image_stats(synthetic),
                "image": _image_payload(image.data, "abs"),
            },
        }

    return app


def _normalize(image: np.ndarray) -> np.ndarray:
    image = np.asarray(image, dtype=float).ravel()
    lo, hi = float(image.min()), float(image.max())
    if hi <= lo:
        return np.zeros_like(image)
    return (image - lo) / (hi - lo)


def histogram_overlap(a: np.ndarray, b: np.ndarray, bins: int = 64) -> dict:
    """Intensity-distribution overlap of two images.

    Both images are min-max normalized (so camera gain and quantization
    ranges drop out), histogrammed on the same bins, and compared with the
    standard overlap sum of per-bin minima: 1 means identical
    distributions, 0 means disjoint.
    """
    na = _normalize(a)
    nb = _normalize(b)
    edges = np.linspace(0.0, 1.0, bins + 1)
    ha, _ = np.histogram(na, bins=edges)
    hb, _ = np.histogram(nb, bins=edges)
    pa = ha / max(1, na.size)
    pb = hb / max(1, nb.size)
    overlap = float(np.minimum(pa, pb).sum())
    return {
        "overlap": overlap,
        "bins": [float(e) for e in edges],
        "experimental": [float(v) for v in pa],
        "synthetic": [float(v) for v in pb],
    }


def image_stats(image: np.ndarray) -> dict:
    """Background, noise, peak, and SNR estimates for a single image.

    Background is the median intensity and the noise level is the scaled
    median absolute deviation (1.4826 · MAD), both robust to the sparse
    bright objects that dominate microscopy frames; the peak is the 99.9th
    percentile. SNR follows the same convention as the shot-noise feature,
    (peak − background) / noise at the background level — a ratio that is
    invariant under linear rescaling, so display quantization and camera
    gain drop out. A noiseless image has no finite SNR and reports null.
    """
    flat = np.asarray(image, dtype=float).ravel()
    background = float(np.median(flat))
    noise = 1.4826 * float(np.median(np.abs(flat - background)))
    peak = float(np.quantile(flat, 0.999))
    snr = (peak - background) / noise if noise > 0 else None
    return {
        "background": background,
        "noise": noise,
        "peak": peak,
        "snr": snr,
    }


app = create_app()
