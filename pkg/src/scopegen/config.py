"""Declarative JSON pipeline descriptions.

A config names the optics, a sequence of image-pipeline nodes, an optional
sequence of label nodes, and export preferences. Loading the same document
always builds the same pipeline, and node instance ids derive from the
document path, so datasets regenerate identically anywhere.

Shape of a document:

    {
      "version": 1,
      "seed": 1234,
      "optics": {"wavelength": 0.66, "numerical_aperture": 0.8, ...},
      "pipeline": [
        {"type": "duplicate", "count": 5, "child": {
            "type": "ellipse",
            "properties": {
              "position_y": {"uniform": [16, 112]},
              "position_x": {"uniform": [16, 112]},
              "radius_major": {"uniform": [4, 8]},
              "radius_minor": {"expr": "radius_major * 0.6"},
              "intensity": 1.0
            }}},
        {"type": "fluorescence"},
        {"type": "poisson_noise", "properties": {"snr": 20}}
      ],
      "label": [{"type": "label_density", "properties": {"sigma": 10}}],
      "export": {"image_format": "png16", "label_format": "npy"}
    }

Property values: JSON scalars are constants; {"uniform": [lo, hi]},
{"normal": {"mean": m, "std": s}} and {"choice": [...]} sample per image;
{"expr": "..."} computes from sibling properties (and upstream nodes via
dotted names).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any

from .errors import ParseError, ValidationError
from .features import REGISTRY, make_node
from .optics import OpticalConfig
from .pipeline import PipelineNode, PropertySpec, chain

CURRENT_VERSION = 1

_NODE_KEYS = {"type", "name", "properties", "child", "count"}
_ROOT_KEYS = {"version", "seed", "optics", "pipeline", "label", "export"}
_OPTICS_KEYS = {
    "wavelength",
    "numerical_aperture",
    "magnification",
    "refractive_index_medium",
    "pixel_size",
    "output_shape",
    "padding",
}
_EXPORT_KEYS = {"image_format", "label_format", "prefix"}
_FORMATS = ("npy", "png16")


@dataclass(frozen=True)
class ExportConfig:
    image_format: str = "npy"
    label_format: str = "npy"
    prefix: str = "sample"

    def __post_init__(self):
        for kind, value in (("image", self.image_format), ("label", self.label_format)):
            if value not in _FORMATS:
                raise ValidationError(
                    f"{kind}_format must be one of {_FORMATS}, got {value!r}",
                    path="$.export",
                )


@dataclass(frozen=True)
class NodeConfig:
    type: str
    name: str = ""
    properties: dict[str, Any] = field(default_factory=dict)
    child: "NodeConfig | None" = None
    count: Any = None


@dataclass(frozen=True)
class PipelineConfig:
    seed: int
    optics: OpticalConfig
    pipeline: tuple[NodeConfig, ...]
    label: tuple[NodeConfig, ...] = ()
    export: ExportConfig = ExportConfig()
    version: int = CURRENT_VERSION


def loads(text: str) -> PipelineConfig:
    """Parse and validate a JSON config document."""
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from exc
    return from_dict(document)


def load(path) -> PipelineConfig:
    with open(path, "r", encoding="utf-8") as handle:
        return loads(handle.read())


def from_dict(document: Any) -> PipelineConfig:
    if not isinstance(document, dict):
        raise ValidationError("config root must be an object")
    unknown = set(document) - _ROOT_KEYS
    if unknown:
        raise ValidationError(f"unknown keys {sorted(unknown)}")
    version = document.get("version", CURRENT_VERSION)
    if version != CURRENT_VERSION:
        raise ValidationError(
            f"unsupported version {version!r} (this build reads {CURRENT_VERSION})",
            path="$.version",
        )
    seed = document.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise ValidationError("seed must be a non-negative integer", path="$.seed")

    optics = _parse_optics(document.get("optics", {}))
    pipeline_raw = document.get("pipeline")
    if not isinstance(pipeline_raw, list) or not pipeline_raw:
        raise ValidationError("pipeline must be a non-empty array", path="$.pipeline")
    nodes = tuple(
        _parse_node(item, f"$.pipeline[{i}]") for i, item in enumerate(pipeline_raw)
    )
    label_raw = document.get("label", [])
    if not isinstance(label_raw, list):
        raise ValidationError("label must be an array", path="$.label")
    label_nodes = tuple(
        _parse_node(item, f"$.label[{i}]") for i, item in enumerate(label_raw)
    )
    export = _parse_export(document.get("export", {}))
    cfg = PipelineConfig(
        seed=seed,
        optics=optics,
        pipeline=nodes,
        label=label_nodes,
        export=export,
        version=version,
    )
    _check_unique_names(cfg)
    build(cfg)  # structural validation: every node must instantiate
    return cfg


def _parse_optics(raw: Any) -> OpticalConfig:
    if not isinstance(raw, dict):
        raise ValidationError("optics must be an object", path="$.optics")
    unknown = set(raw) - _OPTICS_KEYS
    if unknown:
        raise ValidationError(f"unknown keys {sorted(unknown)}", path="$.optics")
    kwargs = dict(raw)
    if "output_shape" in kwargs:
        shape = kwargs["output_shape"]
        if not (isinstance(shape, list) and len(shape) == 2):
            raise ValidationError(
                "output_shape must be [height, width]", path="$.optics.output_shape"
            )
        kwargs["output_shape"] = tuple(int(s) for s in shape)
    try:
        return OpticalConfig(**kwargs)
    except ValidationError as exc:
        raise ValidationError(exc.message, path="$.optics") from exc
    except (TypeError, ValueError) as exc:
        raise ValidationError(str(exc), path="$.optics") from exc


def _parse_export(raw: Any) -> ExportConfig:
    if not isinstance(raw, dict):
        raise ValidationError("export must be an object", path="$.export")
    unknown = set(raw) - _EXPORT_KEYS
    if unknown:
        raise ValidationError(f"unknown keys {sorted(unknown)}", path="$.export")
    return ExportConfig(**raw)


def _parse_node(raw: Any, path: str) -> NodeConfig:
    if not isinstance(raw, dict):
        raise ValidationError("node must be an object", path=path)
    unknown = set(raw) - _NODE_KEYS
    if unknown:
        raise ValidationError(f"unknown keys {sorted(unknown)}", path=path)
    type_name = raw.get("type")
    if not isinstance(type_name, str):
        raise ValidationError("node needs a string 'type'", path=path)

    if type_name == "duplicate":
        if "child" not in raw:
            raise ValidationError("duplicate needs a 'child' node", path=path)
        if "count" not in raw:
            raise ValidationError("duplicate needs a 'count'", path=path)
        if "properties" in raw:
            raise ValidationError(
                "duplicate takes 'count' directly, not 'properties'", path=path
            )
        child = _parse_node(raw["child"], f"{path}.child")
        count = raw["count"]
        _check_property_value("count", count, path)
        return NodeConfig(
            type="duplicate", name=raw.get("name", ""), child=child, count=count
        )

    if type_name not in REGISTRY:
        raise ValidationError(f"unknown feature type '{type_name}'", path=path)
    properties = raw.get("properties", {})
    if not isinstance(properties, dict):
        raise ValidationError("properties must be an object", path=path)
    for prop_name, prop_value in properties.items():
        _check_property_value(prop_name, prop_value, f"{path}.properties")
    name = raw.get("name", "")
    if name and not isinstance(name, str):
        raise ValidationError("name must be a string", path=path)
    return NodeConfig(type=type_name, name=name or "", properties=dict(properties))


def _check_property_value(name: str, value: Any, path: str) -> None:
    if isinstance(value, (int, float, str, bool)):
        return
    if isinstance(value, dict):
        if "expr" in value:
            if len(value) != 1 or not isinstance(value["expr"], str):
                raise ValidationError(
                    f"property '{name}': expr takes a single string", path=path
                )
            return
        if len(value) == 1 and next(iter(value)) in ("uniform", "normal", "choice"):
            return
        raise ValidationError(
            f"property '{name}': object must be expr/uniform/normal/choice", path=path
        )
    raise ValidationError(
        f"property '{name}': unsupported JSON value {value!r}", path=path
    )


def _check_unique_names(cfg: PipelineConfig) -> None:
    seen: dict[str, str] = {}

    def visit(node: NodeConfig, path: str) -> None:
        if node.name:
            if node.name in seen:
                raise ValidationError(
                    f"name '{node.name}' already used at {seen[node.name]}", path=path
                )
            seen[node.name] = path
        if node.child is not None:
            visit(node.child, f"{path}.child")

    for i, node in enumerate(cfg.pipeline):
        visit(node, f"$.pipeline[{i}]")
    for i, node in enumerate(cfg.label):
        visit(node, f"$.label[{i}]")


def _build_node(node: NodeConfig, instance_id: str) -> PipelineNode:
    if node.type == "duplicate":
        child = _build_node(node.child, f"{instance_id}/child")
        from .features import duplicate as make_duplicate

        return make_duplicate(child, node.count, instance_id=instance_id)
    try:
        return make_node(
            node.type,
            properties=node.properties,
            instance_id=instance_id,
            name=node.name,
        )
    except ValidationError as exc:
        raise ValidationError(exc.message, path=instance_id) from exc


def build(
    cfg: PipelineConfig,
) -> tuple[PipelineNode, PipelineNode | None, OpticalConfig]:
    """Instantiate (image_root, label_root, optics) from a config."""
    image_nodes = [
        _build_node(node, f"pipeline[{i}]") for i, node in enumerate(cfg.pipeline)
    ]
    image_root = (
        image_nodes[0]
        if len(image_nodes) == 1
        else chain(*image_nodes, instance_id="pipeline")
    )
    label_root = None
    if cfg.label:
        label_nodes = [
            _build_node(node, f"label[{i}]") for i, node in enumerate(cfg.label)
        ]
        label_root = (
            label_nodes[0]
            if len(label_nodes) == 1
            else chain(*label_nodes, instance_id="label")
        )
    return image_root, label_root, cfg.optics


def to_dict(cfg: PipelineConfig) -> dict:
    """Canonical JSON-ready form; loading it back is the identity."""

    def node_dict(node: NodeConfig) -> dict:
        out: dict[str, Any] = {"type": node.type}
        if node.name:
            out["name"] = node.name
        if node.type == "duplicate":
            out["count"] = node.count
            out["child"] = node_dict(node.child)
        elif node.properties:
            out["properties"] = dict(sorted(node.properties.items()))
        return out

    optics = cfg.optics
    document: dict[str, Any] = {
        "version": cfg.version,
        "seed": cfg.seed,
        "optics": {
            "wavelength": optics.wavelength,
            "numerical_aperture": optics.numerical_aperture,
            "magnification": optics.magnification,
            "refractive_index_medium": optics.refractive_index_medium,
            "pixel_size": optics.pixel_size,
            "output_shape": list(optics.output_shape),
            "padding": optics.padding,
        },
        "pipeline": [node_dict(n) for n in cfg.pipeline],
    }
    if cfg.label:
        document["label"] = [node_dict(n) for n in cfg.label]
    document["export"] = {
        "image_format": cfg.export.image_format,
        "label_format": cfg.export.label_format,
        "prefix": cfg.export.prefix,
    }
    return document


def dumps(cfg: PipelineConfig) -> str:
    return json.dumps(to_dict(cfg), indent=2, sort_keys=True) + "\n"


def save(cfg: PipelineConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(dumps(cfg))


def config_hash(cfg: PipelineConfig) -> str:
    """Stable digest of the canonical form (manifests, cache keys)."""
    canonical = json.dumps(to_dict(cfg), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
