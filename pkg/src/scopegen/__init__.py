"""Seed-deterministic synthetic microscopy image generation.

Compose scatterers, physically modeled optics, noise and augmentations
into pipelines; render images together with pixel-exact ground truth;
benchmark against classical localization, detection and counting
baselines; export reproducible datasets.
"""

from .analysis import (
    autofocus,
    calibrate_pixel_sum,
    count_by_integration,
    detect_peaks,
    link_traces,
    match_detections,
    radial_center,
)
from .config import PipelineConfig, build, config_hash, load, loads
from .dataset import dataset_digest, generate_dataset, render_sample
from .errors import ConfigurationError, EngineError, EvaluationError
from .features import REGISTRY, duplicate, make_node, registry_schema
from .mie import efficiencies, mie_coefficients, scattering_amplitudes
from .optics import OpticalConfig, incoherent_psf, propagate
from .pipeline import (
    PipelineNode,
    PropertyRecord,
    PropertySpec,
    SampleContext,
    TaggedImage,
    chain,
    evaluate,
    generate_pair,
    sample_stream,
    wrap_external,
)

__version__ = "1.0.0"

__all__ = [
    "ConfigurationError",
    "EngineError",
    "EvaluationError",
    "OpticalConfig",
    "PipelineConfig",
    "PipelineNode",
    "PropertyRecord",
    "PropertySpec",
    "REGISTRY",
    "SampleContext",
    "TaggedImage",
    "autofocus",
    "build",
    "calibrate_pixel_sum",
    "chain",
    "config_hash",
    "count_by_integration",
    "dataset_digest",
    "detect_peaks",
    "duplicate",
    "efficiencies",
    "evaluate",
    "generate_dataset",
    "generate_pair",
    "incoherent_psf",
    "link_traces",
    "load",
    "loads",
    "make_node",
    "match_detections",
    "mie_coefficients",
    "propagate",
    "radial_center",
    "registry_schema",
    "render_sample",
    "sample_stream",
    "scattering_amplitudes",
    "wrap_external",
]
