"""Built-in feature catalog: scatterers, microscopes, noise, labels.

Each entry couples a property schema (used by the config loader, the
service registry endpoint and the playground UI) with the function the
pipeline runs. Property records imprinted on images carry everything the
label renderers need, so ground truth is always derived from the same
resolved values that produced the image.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from typing import Any

import numpy as np

from . import augment, labels, noise, scatterers
from .errors import MissingField, ShapeMismatch, UnsupportedShape, ValidationError
from .optics import (
    coherent_image_field,
    convolve_incoherent,
    mie_scattered_spectrum,
)
from .pipeline import (
    EvalContext,
    PipelineNode,
    PropertyRecord,
    PropertySpec,
    check_merge_shapes,
    fresh_instance_id,
)
from .rng import derive_generator


@dataclass(frozen=True)
class PropertyField:
    name: str
    type: str = "float"  # float | int | string | choice
    required: bool = False
    default: Any = None
    choices: tuple[str, ...] = ()
    description: str = ""


@dataclass(frozen=True)
class FeatureType:
    name: str
    kind: str
    fn: Any
    fields: tuple[PropertyField, ...] = ()
    description: str = ""
    category: str = "misc"

    def field_named(self, name: str) -> PropertyField | None:
        for f in self.fields:
            if f.name == name:
                return f
        return None


REGISTRY: dict[str, FeatureType] = {}


def register(feature: FeatureType) -> FeatureType:
    if feature.name in REGISTRY:
        raise ValidationError(f"feature '{feature.name}' registered twice")
    REGISTRY[feature.name] = feature
    return feature


def feature_type(name: str) -> FeatureType:
    try:
        return REGISTRY[name]
    except KeyError:
        raise ValidationError(f"unknown feature type '{name}'") from None


def registry_schema() -> list[dict]:
    """JSON-ready description of every node type a config may use.

    Includes the structural ``duplicate`` node alongside the registered
    features, since client-side form builders need the full grammar.
    """
    out = [
        {
            "name": "duplicate",
            "kind": "duplicate",
            "category": "structure",
            "description": (
                "Repeat a child node; each copy re-samples its properties "
                "from an independent stream."
            ),
            "properties": [
                {
                    "name": "count",
                    "type": "int",
                    "required": True,
                    "default": None,
                    "choices": [],
                    "description": "number of copies (samplable)",
                }
            ],
        }
    ]
    for feature in REGISTRY.values():
        out.append(
            {
                "name": feature.name,
                "kind": feature.kind,
                "category": feature.category,
                "description": feature.description,
                "properties": [
                    {
                        "name": f.name,
                        "type": f.type,
                        "required": f.required,
                        "default": f.default,
                        "choices": list(f.choices),
                        "description": f.description,
                    }
                    for f in feature.fields
                ],
            }
        )
    return out


def make_node(
    type_name: str,
    properties: dict[str, Any] | None = None,
    instance_id: str | None = None,
    name: str = "",
    children: tuple[PipelineNode, ...] = (),
) -> PipelineNode:
    """Instantiate a registered feature as a pipeline node.

    Property values may be raw constants, PropertySpec instances, or
    descriptor dicts: {"uniform": [lo, hi]}, {"normal": {...}},
    {"choice": [...]}, {"expr": "..."}.
    """
    feature = feature_type(type_name)
    provided = dict(properties or {})
    specs: list[PropertySpec] = []
    for fld in feature.fields:
        if fld.name in provided:
            specs.append(_coerce_spec(fld.name, provided.pop(fld.name)))
        elif fld.required:
            raise ValidationError(
                f"feature '{type_name}' requires property '{fld.name}'"
            )
        elif fld.default is not None:
            specs.append(PropertySpec.constant(fld.name, fld.default))
    for extra_name, extra_value in provided.items():
        specs.append(_coerce_spec(extra_name, extra_value))
    return PipelineNode(
        feature_instance_id=instance_id or fresh_instance_id(type_name),
        kind=feature.kind,
        feature_name=feature.name,
        name=name,
        properties=tuple(specs),
        children=children,
        fn=feature.fn,
    )


def _coerce_spec(name: str, value: Any) -> PropertySpec:
    if isinstance(value, PropertySpec):
        if value.name != name:
            raise ValidationError(f"spec named '{value.name}' given for property '{name}'")
        return value
    if isinstance(value, dict):
        if "expr" in value:
            return PropertySpec.dependent(name, value["expr"])
        return PropertySpec.sampler(name, value)
    if isinstance(value, (int, float, str, bool)):
        return PropertySpec.constant(name, value)
    raise ValidationError(f"property '{name}': unsupported value {value!r}")


def duplicate(child: PipelineNode, count: Any, instance_id: str | None = None) -> PipelineNode:
    """Expand one child subtree into ``count`` independent clones."""
    return PipelineNode(
        feature_instance_id=instance_id or fresh_instance_id("duplicate"),
        kind="duplicate",
        feature_name="duplicate",
        properties=(_coerce_spec("count", count),),
        children=(child,),
    )


def _require_optics(ectx: EvalContext, feature: str):
    if ectx.optics is None:
        raise ValidationError(f"feature '{feature}' requires an optical configuration")
    return ectx.optics


def _position(record: PropertyRecord) -> tuple[float, float]:
    return float(record.values["position_y"]), float(record.values["position_x"])


# --------------------------------------------------------------------------
# Scatterers (append): object-plane intensity images, output shape.


def _ellipse_fn(record: PropertyRecord, ectx: EvalContext) -> np.ndarray:
    cfg = _require_optics(ectx, "ellipse")
    coverage = scatterers.ellipse_coverage(
        cfg.output_shape,
        _position(record),
        (float(record.values["radius_major"]), float(record.values["radius_minor"])),
        float(record.get("rotation", 0.0)),
    )
    return coverage * float(record.get("intensity", 1.0))


def _disk_fn(record: PropertyRecord, ectx: EvalContext) -> np.ndarray:
    cfg = _require_optics(ectx, "disk")
    coverage = scatterers.disk_coverage(
        cfg.output_shape, _position(record), float(record.values["radius"])
    )
    return coverage * float(record.get("intensity", 1.0))


def _blob_fn(record: PropertyRecord, ectx: EvalContext) -> np.ndarray:
    cfg = _require_optics(ectx, "blob")
    return scatterers.gaussian_blob(
        cfg.output_shape,
        _position(record),
        float(record.values["sigma"]),
        float(record.get("integral", 1.0)),
    )


def _point_fn(record: PropertyRecord, ectx: EvalContext) -> np.ndarray:
    cfg = _require_optics(ectx, "point")
    return scatterers.point_splat(
        cfg.output_shape, _position(record), float(record.get("intensity", 1.0))
    )


def _sphere_fn(record: PropertyRecord, ectx: EvalContext) -> np.ndarray:
    cfg = _require_optics(ectx, "sphere")
    pad = cfg.padding
    y, x = _position(record)
    return mie_scattered_spectrum(
        cfg,
        y_px=y + pad,
        x_px=x + pad,
        z_um=float(record.get("z", 0.0)),
        radius_um=float(record.values["radius"]),
        refractive_index=float(record.values["refractive_index"]),
    )


# --------------------------------------------------------------------------
# Microscopes (merge).


def _sum_object_images(images, feature: str) -> np.ndarray:
    check_merge_shapes(images)
    total = np.zeros(images[0].data.shape, dtype=float)
    for img in images:
        if np.iscomplexobj(img.data):
            raise UnsupportedShape(
                f"'{feature}' sums object-plane intensities; a coherent "
                "scatterer produced a complex spectrum (use brightfield or "
                "holography)"
            )
        total += img.data
    return total


def _fluorescence_fn(images, record: PropertyRecord, ectx: EvalContext) -> np.ndarray:
    cfg = _require_optics(ectx, "fluorescence")
    total = _sum_object_images(images, "fluorescence")
    if total.shape != cfg.output_shape:
        raise ShapeMismatch(
            f"object images have shape {total.shape}, optics expect {cfg.output_shape}"
        )
    return convolve_incoherent(
        total,
        cfg,
        coma_x=float(record.get("coma_x", 0.0)),
        coma_y=float(record.get("coma_y", 0.0)),
        z=float(record.get("z", 0.0)),
    )


def _coherent_field(images, record: PropertyRecord, ectx: EvalContext, feature: str):
    cfg = _require_optics(ectx, feature)
    spectra = []
    for img in images:
        if not np.iscomplexobj(img.data):
            raise UnsupportedShape(
                f"'{feature}' needs coherent scatterers (complex spectra); "
                f"got a real object image"
            )
        spectra.append(img.data)
    return coherent_image_field(
        cfg,
        spectra,
        coma_x=float(record.get("coma_x", 0.0)),
        coma_y=float(record.get("coma_y", 0.0)),
        z=float(record.get("z", 0.0)),
    )


def _brightfield_fn(images, record: PropertyRecord, ectx: EvalContext) -> np.ndarray:
    field = _coherent_field(images, record, ectx, "brightfield")
    return np.abs(field) ** 2


def _holography_fn(images, record: PropertyRecord, ectx: EvalContext) -> np.ndarray:
    mode = str(record.get("mode", "offaxis"))
    field = _coherent_field(images, record, ectx, "holography")
    if mode == "offaxis":
        return field
    if mode == "inline":
        return np.abs(field) ** 2
    raise ValidationError(f"holography mode must be 'offaxis' or 'inline', got {mode!r}")


# --------------------------------------------------------------------------
# Intensity transforms and noise.


def _offset_fn(data, record: PropertyRecord, ectx: EvalContext) -> np.ndarray:
    return noise.add_offset(data, float(record.values["value"]))


def _gain_fn(data, record: PropertyRecord, ectx: EvalContext) -> np.ndarray:
    return np.asarray(data, dtype=float) * float(record.values["factor"])


def _feature_rng(record: PropertyRecord, ectx: EvalContext, stream: str):
    return derive_generator(
        ectx.sample.master_seed,
        ectx.sample.sample_index,
        record.feature_instance_id,
        stream,
    )


def _gaussian_noise_fn(data, record: PropertyRecord, ectx: EvalContext) -> np.ndarray:
    rng = _feature_rng(record, ectx, "noise")
    return noise.gaussian_noise(data, float(record.values["sigma"]), rng)


def _poisson_noise_fn(data, record: PropertyRecord, ectx: EvalContext) -> np.ndarray:
    rng = _feature_rng(record, ectx, "noise")
    snr = record.get("snr")
    scale = record.get("scale")
    background = record.get("background")
    return noise.poisson_noise(
        data,
        rng,
        snr=None if snr is None else float(snr),
        background=None if background is None else float(background),
        scale=None if scale is None else float(scale),
    )


# --------------------------------------------------------------------------
# Geometric augmentations (post-merge transforms; label renderers replay
# their records to move point annotations along).


def _mirror_fn(data, record: PropertyRecord, ectx: EvalContext) -> np.ndarray:
    return augment.mirror_image(data, str(record.values["axis"]))


def _affine_fn(data, record: PropertyRecord, ectx: EvalContext) -> np.ndarray:
    return augment.affine_image(
        data,
        rotation=float(record.get("rotation", 0.0)),
        shear=float(record.get("shear", 0.0)),
        scale=float(record.get("scale", 1.0)),
        shift_y=float(record.get("shift_y", 0.0)),
        shift_x=float(record.get("shift_x", 0.0)),
    )


def _elastic_fields(record: PropertyRecord, ectx: EvalContext, shape):
    rng = _feature_rng(record, ectx, "field")
    return augment.elastic_displacement(
        shape, float(record.values["alpha"]), float(record.values["sigma"]), rng
    )


def _elastic_fn(data, record: PropertyRecord, ectx: EvalContext) -> np.ndarray:
    data = np.asarray(data, dtype=float)
    dy, dx = _elastic_fields(record, ectx, data.shape)
    return augment.elastic_image(data, dy, dx)


GEOMETRIC_FEATURES = ("mirror", "affine", "elastic")


def carry_positions(
    positions: np.ndarray,
    inherited: tuple[PropertyRecord, ...],
    ectx: EvalContext,
    shape: tuple[int, int],
) -> np.ndarray:
    """Push scatterer positions through every recorded geometric warp.

    Records are scanned in imprint order, which matches the order the
    transforms hit the image.
    """
    positions = np.atleast_2d(np.asarray(positions, dtype=float))
    for record in inherited:
        if record.feature_name == "mirror":
            positions = augment.mirror_positions(
                positions, str(record.values["axis"]), shape
            )
        elif record.feature_name == "affine":
            positions = augment.affine_positions(
                positions,
                shape,
                rotation=float(record.get("rotation", 0.0)),
                shear=float(record.get("shear", 0.0)),
                scale=float(record.get("scale", 1.0)),
                shift_y=float(record.get("shift_y", 0.0)),
                shift_x=float(record.get("shift_x", 0.0)),
            )
        elif record.feature_name == "elastic":
            dy, dx = _elastic_fields(record, ectx, shape)
            positions = augment.elastic_positions(positions, dy, dx)
    return positions


# --------------------------------------------------------------------------
# Label renderers. They read the image pipeline's records (inherited) and
# rasterize ground truth in the same coordinates as the image.

_POSITION_KEYS = ("position_y", "position_x")


def scatterer_records(
    inherited: tuple[PropertyRecord, ...], feature: str | None = None
) -> list[PropertyRecord]:
    out = []
    for record in inherited:
        if all(k in record.values for k in _POSITION_KEYS):
            if feature is None or record.feature_name == feature:
                out.append(record)
    return out


def _label_centers(record: PropertyRecord, ectx: EvalContext, shape) -> np.ndarray:
    wanted = record.get("feature")
    sources = scatterer_records(ectx.inherited, str(wanted) if wanted else None)
    if not sources:
        return np.zeros((0, 2))
    centers = np.array([_position(r) for r in sources])
    return carry_positions(centers, ectx.inherited, ectx, shape)


def _mask_label_fn(record: PropertyRecord, ectx: EvalContext) -> np.ndarray:
    cfg = _require_optics(ectx, "label_disk_mask")
    centers = _label_centers(record, ectx, cfg.output_shape)
    return labels.disk_mask(
        cfg.output_shape,
        [tuple(c) for c in centers],
        float(record.get("radius", 3.0)),
    ).astype(float)


def _density_label_fn(record: PropertyRecord, ectx: EvalContext) -> np.ndarray:
    cfg = _require_optics(ectx, "label_density")
    centers = _label_centers(record, ectx, cfg.output_shape)
    return labels.gaussian_density(
        cfg.output_shape,
        [tuple(c) for c in centers],
        float(record.get("sigma", 10.0)),
    )


def _volume_label_fn(record: PropertyRecord, ectx: EvalContext) -> np.ndarray:
    cfg = _require_optics(ectx, "label_sphere_volume")
    wanted = record.get("feature")
    sources = scatterer_records(ectx.inherited, str(wanted) if wanted else None)
    lateral = np.array([_position(r) for r in sources]) if sources else np.zeros((0, 2))
    if len(sources):
        lateral = carry_positions(lateral, ectx.inherited, ectx, cfg.output_shape)
    centers = [
        (float(pos[0]), float(pos[1]), float(rec.get("z", 0.0)))
        for pos, rec in zip(lateral, sources)
    ]
    depth = int(record.get("depth", 32))
    return labels.sphere_volume(
        (depth, *cfg.output_shape),
        centers,
        float(record.get("radius", 3.0)),
        (float(record.get("z_min", 2.0)), float(record.get("z_max", 30.0))),
    ).astype(float)


def _semantic_label_fn(record: PropertyRecord, ectx: EvalContext) -> np.ndarray:
    cfg = _require_optics(ectx, "label_semantic")
    shape = cfg.output_shape
    coverages: list[np.ndarray] = []
    class_indices: list[int] = []
    for source in scatterer_records(ectx.inherited):
        center = carry_positions(
            np.array([_position(source)]), ectx.inherited, ectx, shape
        )[0]
        if source.feature_name == "ellipse":
            coverage = scatterers.ellipse_coverage(
                shape,
                tuple(center),
                (
                    float(source.values["radius_major"]),
                    float(source.values["radius_minor"]),
                ),
                float(source.get("rotation", 0.0)),
            )
        elif source.feature_name == "disk":
            coverage = scatterers.disk_coverage(
                shape, tuple(center), float(source.values["radius"])
            )
        else:
            coverage = labels.disk_mask(
                shape, [tuple(center)], float(record.get("radius", 3.0))
            ).astype(float)
        coverages.append(coverage)
        class_indices.append(int(source.get("class_index", 1)))
    return labels.semantic_mask(
        shape, coverages, class_indices, float(record.get("threshold", 0.5))
    ).astype(float)


def _count_label_fn(record: PropertyRecord, ectx: EvalContext) -> np.ndarray:
    wanted = record.get("feature")
    sources = scatterer_records(ectx.inherited, str(wanted) if wanted else None)
    return np.asarray(float(len(sources)))


def _positions_label_fn(record: PropertyRecord, ectx: EvalContext) -> np.ndarray:
    cfg = _require_optics(ectx, "label_positions")
    return _label_centers(record, ectx, cfg.output_shape)


def _value_label_fn(record: PropertyRecord, ectx: EvalContext) -> np.ndarray:
    """Numeric regression target pulled off the scatterer records."""
    key = str(record.values["key"])
    wanted = record.get("feature")
    sources = scatterer_records(ectx.inherited, str(wanted) if wanted else None)
    values = [float(r.values[key]) for r in sources if key in r.values]
    if not values:
        raise MissingField(key)
    return np.asarray(values if len(values) > 1 else values[0])


# --------------------------------------------------------------------------
# Registration.

_POSITION_FIELDS = (
    PropertyField("position_y", "float", required=True, description="row, pixels"),
    PropertyField("position_x", "float", required=True, description="column, pixels"),
)

register(FeatureType(
    "ellipse", "append", _ellipse_fn,
    fields=_POSITION_FIELDS + (
        PropertyField("radius_major", "float", required=True, description="semi-axis, px"),
        PropertyField("radius_minor", "float", required=True, description="semi-axis, px"),
        PropertyField("rotation", "float", default=0.0, description="radians"),
        PropertyField("intensity", "float", default=1.0),
        PropertyField("class_index", "int", default=1),
    ),
    description="Filled anti-aliased ellipse (object-plane intensity).",
    category="scatterer",
))

register(FeatureType(
    "disk", "append", _disk_fn,
    fields=_POSITION_FIELDS + (
        PropertyField("radius", "float", required=True, description="pixels"),
        PropertyField("intensity", "float", default=1.0),
        PropertyField("class_index", "int", default=1),
    ),
    description="Filled anti-aliased circle (object-plane intensity).",
    category="scatterer",
))

register(FeatureType(
    "blob", "append", _blob_fn,
    fields=_POSITION_FIELDS + (
        PropertyField("sigma", "float", required=True, description="pixels"),
        PropertyField("integral", "float", default=1.0, description="total intensity"),
    ),
    description="Isotropic Gaussian intensity profile.",
    category="scatterer",
))

register(FeatureType(
    "point", "append", _point_fn,
    fields=_POSITION_FIELDS + (
        PropertyField("intensity", "float", default=1.0),
    ),
    description="Sub-pixel point emitter (bilinear splat).",
    category="scatterer",
))

register(FeatureType(
    "sphere", "append", _sphere_fn,
    fields=_POSITION_FIELDS + (
        PropertyField("z", "float", default=0.0, description="axial offset, um"),
        PropertyField("radius", "float", required=True, description="um"),
        PropertyField("refractive_index", "float", required=True),
    ),
    description="Dielectric sphere scattering a coherent beam (complex spectrum).",
    category="scatterer",
))

_MICROSCOPE_FIELDS = (
    PropertyField("coma_x", "float", default=0.0, description="pupil coma, radians"),
    PropertyField("coma_y", "float", default=0.0, description="pupil coma, radians"),
    PropertyField("z", "float", default=0.0, description="defocus, um"),
)

register(FeatureType(
    "fluorescence", "merge", _fluorescence_fn,
    fields=_MICROSCOPE_FIELDS,
    description="Incoherent imaging: sums object intensities, blurs with the PSF.",
    category="microscope",
))

register(FeatureType(
    "brightfield", "merge", _brightfield_fn,
    fields=_MICROSCOPE_FIELDS,
    description="Coherent imaging; camera records |reference + scattered|^2.",
    category="microscope",
))

register(FeatureType(
    "holography", "merge", _holography_fn,
    fields=_MICROSCOPE_FIELDS + (
        PropertyField("mode", "choice", default="offaxis", choices=("offaxis", "inline")),
    ),
    description="Holographic imaging: complex field (offaxis) or its squared amplitude (inline).",
    category="microscope",
))

register(FeatureType(
    "offset", "transform", _offset_fn,
    fields=(PropertyField("value", "float", required=True),),
    description="Add a constant background level.",
    category="noise",
))

register(FeatureType(
    "gain", "transform", _gain_fn,
    fields=(PropertyField("factor", "float", required=True),),
    description="Multiply intensities by a constant.",
    category="noise",
))

register(FeatureType(
    "gaussian_noise", "transform", _gaussian_noise_fn,
    fields=(PropertyField("sigma", "float", required=True),),
    description="Additive white Gaussian noise.",
    category="noise",
))

register(FeatureType(
    "poisson_noise", "transform", _poisson_noise_fn,
    fields=(
        PropertyField("snr", "float", description="target peak SNR (photon units)"),
        PropertyField("background", "float", description="background level for snr"),
        PropertyField("scale", "float", description="photons per intensity unit"),
    ),
    description="Shot noise with an SNR target or an explicit photon scale.",
    category="noise",
))

register(FeatureType(
    "mirror", "transform", _mirror_fn,
    fields=(PropertyField("axis", "choice", required=True, choices=("x", "y")),),
    description="Flip the image along one axis.",
    category="augment",
))

register(FeatureType(
    "affine", "transform", _affine_fn,
    fields=(
        PropertyField("rotation", "float", default=0.0, description="radians"),
        PropertyField("shear", "float", default=0.0),
        PropertyField("scale", "float", default=1.0),
        PropertyField("shift_y", "float", default=0.0, description="pixels"),
        PropertyField("shift_x", "float", default=0.0, description="pixels"),
    ),
    description="Rotation, shear, isotropic scale and translation about the center.",
    category="augment",
))

register(FeatureType(
    "elastic", "transform", _elastic_fn,
    fields=(
        PropertyField("alpha", "float", required=True, description="displacement, px"),
        PropertyField("sigma", "float", required=True, description="smoothness, px"),
    ),
    description="Smooth random warp (blurred white displacement fields).",
    category="augment",
))

register(FeatureType(
    "label_disk_mask", "append", _mask_label_fn,
    fields=(
        PropertyField("radius", "float", default=3.0, description="pixels"),
        PropertyField("feature", "string", description="only this scatterer type"),
    ),
    description="Binary disks centered on every scatterer.",
    category="label",
))

register(FeatureType(
    "label_density", "append", _density_label_fn,
    fields=(
        PropertyField("sigma", "float", default=10.0, description="pixels"),
        PropertyField("feature", "string", description="only this scatterer type"),
    ),
    description="Sum of unit-integral Gaussians at scatterer centers.",
    category="label",
))

register(FeatureType(
    "label_sphere_volume", "append", _volume_label_fn,
    fields=(
        PropertyField("radius", "float", default=3.0, description="voxels"),
        PropertyField("depth", "int", default=32, description="slices"),
        PropertyField("z_min", "float", default=2.0, description="um"),
        PropertyField("z_max", "float", default=30.0, description="um"),
        PropertyField("feature", "string", description="only this scatterer type"),
    ),
    description="Binary 3-D spheres; axial positions map linearly to slices.",
    category="label",
))

register(FeatureType(
    "label_semantic", "append", _semantic_label_fn,
    fields=(
        PropertyField("threshold", "float", default=0.5),
        PropertyField("radius", "float", default=3.0, description="fallback disk, px"),
    ),
    description="Integer class map re-rasterized from scatterer records.",
    category="label",
))

register(FeatureType(
    "label_count", "append", _count_label_fn,
    fields=(PropertyField("feature", "string", description="only this scatterer type"),),
    description="Scalar: how many scatterers are in the frame.",
    category="label",
))

register(FeatureType(
    "label_positions", "append", _positions_label_fn,
    fields=(PropertyField("feature", "string", description="only this scatterer type"),),
    description="(N, 2) array of scatterer centers, augmentations applied.",
    category="label",
))

register(FeatureType(
    "label_value", "append", _value_label_fn,
    fields=(
        PropertyField("key", "string", required=True, description="record property"),
        PropertyField("feature", "string", description="only this scatterer type"),
    ),
    description="Numeric target copied from scatterer records (e.g. radius).",
    category="label",
))
