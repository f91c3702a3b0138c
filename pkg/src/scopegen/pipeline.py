"""Compositional image-generation pipeline.

A pipeline is a tree of nodes. Each node holds property declarations
(constants, per-sample samplers, or dependent expressions) and one of a
small set of behaviors:

- ``append``     renders a new image and adds it to the running list,
- ``transform``  alters every image in the list,
- ``merge``      collapses the whole list into a single image,
- ``duplicate``  expands its child subtree into n independent clones,
- ``external``   a caller-supplied function behaving as a transform,
- ``chain``      plumbing: applies its children in sequence.

Every image carries the property records of the features that touched it,
deduplicated by feature instance, so ground truth can always be
reconstructed from the final image alone.
"""

from __future__ import annotations

import itertools
from collections.abc import Callable, Iterator, Mapping
from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Any

import numpy as np

from .errors import (
    CycleError,
    EmptyInput,
    FeatureEvaluationError,
    ShapeMismatch,
    UnknownReference,
    ValidationError,
)
from .expressions import Expression
from .rng import derive_generator

Value = float | int | str | bool

_NODE_COUNTER = itertools.count()


def fresh_instance_id(feature_name: str) -> str:
    """Process-local id for programmatically built nodes.

    Config-loaded pipelines use path-derived ids instead so that datasets
    regenerate identically across processes.
    """
    return f"{feature_name}-{next(_NODE_COUNTER)}"


@dataclass(frozen=True)
class PropertySpec:
    """One named parameter of a feature.

    Exactly one of ``value`` (constant), ``distribution`` (per-sample
    sampler descriptor) or ``expression`` (dependent) is set.
    """

    name: str
    value: Value | None = None
    distribution: Mapping[str, Any] | None = None
    expression: Expression | None = None

    def __post_init__(self):
        set_count = sum(
            x is not None for x in (self.value, self.distribution, self.expression)
        )
        if set_count != 1:
            raise ValidationError(
                f"property '{self.name}' must be exactly one of "
                "constant/sampler/dependent"
            )

    @property
    def kind(self) -> str:
        if self.value is not None:
            return "constant"
        if self.distribution is not None:
            return "sampler"
        return "dependent"

    @staticmethod
    def constant(name: str, value: Value) -> "PropertySpec":
        return PropertySpec(name, value=value)

    @staticmethod
    def sampler(name: str, descriptor: Mapping[str, Any]) -> "PropertySpec":
        _validate_descriptor(name, descriptor)
        return PropertySpec(name, distribution=dict(descriptor))

    @staticmethod
    def dependent(name: str, expression: str) -> "PropertySpec":
        return PropertySpec(name, expression=Expression(expression))


def _validate_descriptor(name: str, descriptor: Mapping[str, Any]) -> None:
    if len(descriptor) != 1:
        raise ValidationError(f"property '{name}': descriptor must have one key")
    kind, args = next(iter(descriptor.items()))
    if kind == "uniform":
        if not (isinstance(args, (list, tuple)) and len(args) == 2):
            raise ValidationError(f"property '{name}': uniform needs [lo, hi]")
    elif kind == "normal":
        if not (isinstance(args, Mapping) and {"mean", "std"} <= set(args)):
            raise ValidationError(f"property '{name}': normal needs mean and std")
    elif kind == "choice":
        if not (isinstance(args, (list, tuple)) and len(args) >= 1):
            raise ValidationError(f"property '{name}': choice needs a non-empty list")
    else:
        raise ValidationError(f"property '{name}': unknown distribution '{kind}'")


def sample_descriptor(descriptor: Mapping[str, Any], rng: np.random.Generator) -> Value:
    """Draw exactly one value from a distribution descriptor."""
    kind, args = next(iter(descriptor.items()))
    if kind == "uniform":
        return float(rng.uniform(float(args[0]), float(args[1])))
    if kind == "normal":
        return float(rng.normal(float(args["mean"]), float(args["std"])))
    if kind == "choice":
        item = args[int(rng.integers(0, len(args)))]
        if isinstance(item, (str, bool, int, float)):
            return item
        return float(item)
    raise ValidationError(f"unknown distribution '{kind}'")


@dataclass(frozen=True)
class SampleContext:
    """Everything that determines the randomness of one sample."""

    master_seed: int
    sample_index: int


@dataclass(frozen=True)
class PropertyRecord:
    """Resolved property values imprinted on images by one feature instance."""

    feature_instance_id: str
    feature_name: str
    node_name: str
    values: Mapping[str, Value]

    def __post_init__(self):
        object.__setattr__(self, "values", MappingProxyType(dict(self.values)))

    def get(self, key: str, default: Value | None = None) -> Value | None:
        return self.values.get(key, default)

    def as_dict(self) -> dict[str, Value]:
        return dict(self.values)


@dataclass(frozen=True)
class TaggedImage:
    """An n-dimensional array plus the ordered set of records that made it."""

    data: np.ndarray
    records: tuple[PropertyRecord, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "records", dedupe_records(self.records))

    def with_record(self, record: PropertyRecord) -> "TaggedImage":
        return TaggedImage(self.data, self.records + (record,))

    def records_of(self, feature_name: str) -> tuple[PropertyRecord, ...]:
        return tuple(r for r in self.records if r.feature_name == feature_name)


def dedupe_records(records) -> tuple[PropertyRecord, ...]:
    """Order-preserving dedup by feature instance id (first wins)."""
    seen: dict[str, PropertyRecord] = {}
    for record in records:
        seen.setdefault(record.feature_instance_id, record)
    return tuple(seen.values())


# Behavior callables, keyed by node kind:
#   append:            fn(record, ectx) -> ndarray
#   transform/external: fn(data, record, ectx) -> ndarray
#   merge:             fn(images, record, ectx) -> ndarray
AppendFn = Callable[["PropertyRecord", "EvalContext"], np.ndarray]
TransformFn = Callable[[np.ndarray, "PropertyRecord", "EvalContext"], np.ndarray]
MergeFn = Callable[[list, "PropertyRecord", "EvalContext"], np.ndarray]

_KINDS = {"append", "transform", "merge", "duplicate", "external", "chain"}


@dataclass(frozen=True)
class PipelineNode:
    feature_instance_id: str
    kind: str
    feature_name: str = ""
    name: str = ""
    properties: tuple[PropertySpec, ...] = ()
    children: tuple["PipelineNode", ...] = ()
    fn: Callable | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValidationError(f"unknown node kind '{self.kind}'")
        if not self.name:
            object.__setattr__(self, "name", self.feature_instance_id)
        names = [p.name for p in self.properties]
        if len(names) != len(set(names)):
            raise ValidationError(
                f"node '{self.feature_instance_id}' repeats a property name"
            )
        if self.kind == "duplicate":
            if len(self.children) != 1:
                raise ValidationError("duplicate takes exactly one child subtree")
            count = self.property("count")
            if count is not None and count.kind == "constant" and int(count.value) < 1:
                raise ValidationError("duplicate count must be >= 1")

    def property(self, name: str) -> PropertySpec | None:
        for spec in self.properties:
            if spec.name == name:
                return spec
        return None


@dataclass
class EvalContext:
    """Mutable state threaded through one evaluation of one sample."""

    sample: SampleContext
    optics: Any = None  # OpticalConfig, untyped here to avoid an import cycle
    inherited: tuple[PropertyRecord, ...] = ()
    env: dict[str, PropertyRecord] = field(default_factory=dict)
    _record_cache: dict[str, PropertyRecord] = field(default_factory=dict)

    def upstream_values(self) -> dict[str, Mapping[str, Value]]:
        return {name: rec.values for name, rec in self.env.items()}


def resolve_properties(node: PipelineNode, ctx: SampleContext | EvalContext) -> PropertyRecord:
    """Resolve all of a node's properties for one sample.

    Constants pass through; samplers draw one value from their derived
    stream; dependent expressions evaluate in topological order over the
    sibling dependency graph. Raises CycleError on cyclic dependencies and
    UnknownReference when an expression names a missing property.
    """
    ectx = ctx if isinstance(ctx, EvalContext) else EvalContext(sample=ctx)
    cached = ectx._record_cache.get(node.feature_instance_id)
    if cached is not None:
        return cached

    sample = ectx.sample
    values: dict[str, Value] = {}
    dependents: dict[str, PropertySpec] = {}
    for spec in node.properties:
        if spec.kind == "constant":
            values[spec.name] = spec.value
        elif spec.kind == "sampler":
            rng = derive_generator(
                sample.master_seed,
                sample.sample_index,
                node.feature_instance_id,
                spec.name,
            )
            values[spec.name] = sample_descriptor(spec.distribution, rng)
        else:
            dependents[spec.name] = spec

    for name in _dependent_order(node, dependents, set(values)):
        spec = dependents[name]
        values[name] = spec.expression.evaluate(values, ectx.upstream_values())

    record = PropertyRecord(
        feature_instance_id=node.feature_instance_id,
        feature_name=node.feature_name or node.kind,
        node_name=node.name,
        values=values,
    )
    ectx._record_cache[node.feature_instance_id] = record
    return record


def _dependent_order(
    node: PipelineNode, dependents: dict[str, PropertySpec], resolved: set[str]
) -> list[str]:
    """Topological order of dependent properties (Kahn's algorithm)."""
    local_deps: dict[str, set[str]] = {}
    for name, spec in dependents.items():
        deps = set()
        for ref in spec.expression.references:
            if "." in ref:
                continue  # upstream import, resolved via the environment
            if ref in dependents:
                deps.add(ref)
            elif ref not in resolved:
                raise UnknownReference(
                    f"node '{node.feature_instance_id}': property '{name}' "
                    f"references unknown property '{ref}'"
                )
        local_deps[name] = deps

    order: list[str] = []
    ready = sorted(n for n, d in local_deps.items() if not d)
    pending = {n: set(d) for n, d in local_deps.items() if d}
    while ready:
        name = ready.pop()
        order.append(name)
        for other in sorted(pending):
            pending[other].discard(name)
            if not pending[other]:
                ready.append(other)
                del pending[other]
    if pending:
        raise CycleError(
            f"node '{node.feature_instance_id}': dependency cycle among "
            f"{sorted(pending)}"
        )
    return order


def expand_duplicate(node: PipelineNode, count: int | None = None) -> list[PipelineNode]:
    """n clones of the child subtree, each with fresh instance ids.

    Fresh ids give every clone its own sampler streams, so each clone
    resolves independent property values.
    """
    if node.kind != "duplicate":
        raise ValidationError("expand_duplicate requires a duplicate node")
    if count is None:
        spec = node.property("count")
        if spec is None or spec.kind != "constant":
            raise ValidationError(
                "duplicate count is not constant; pass the resolved count"
            )
        count = int(spec.value)
    if count < 1:
        raise ValidationError("duplicate count must be >= 1")
    child = node.children[0]
    return [_reid(child, f"{child.feature_instance_id}#{k}") for k in range(count)]


def _reid(node: PipelineNode, new_id: str) -> PipelineNode:
    children = tuple(
        _reid(c, f"{new_id}/{c.feature_instance_id}") for c in node.children
    )
    renamed = node.name if node.name != node.feature_instance_id else new_id
    return replace(
        node, feature_instance_id=new_id, name=renamed, children=children
    )


def wrap_external(
    transform: Callable[..., np.ndarray],
    declared_properties: tuple[PropertySpec, ...] = (),
    name: str | None = None,
) -> PipelineNode:
    """Wrap any image function as a transform node.

    The function is called as ``transform(data, **resolved_properties)``
    and must be pure in those inputs. Failures surface as
    FeatureEvaluationError naming the node.
    """
    node_name = name or getattr(transform, "__name__", "external")

    def apply(data: np.ndarray, record: PropertyRecord, ectx: EvalContext) -> np.ndarray:
        try:
            return np.asarray(transform(data, **record.as_dict()))
        except Exception as exc:  # noqa: BLE001 - caller code is arbitrary
            raise FeatureEvaluationError(record.feature_instance_id, str(exc)) from exc

    return PipelineNode(
        feature_instance_id=fresh_instance_id(node_name),
        kind="external",
        feature_name=node_name,
        properties=tuple(declared_properties),
        fn=apply,
    )


def chain(*nodes: PipelineNode, instance_id: str | None = None) -> PipelineNode:
    """Sequence node: applies children to the running image list in order."""
    return PipelineNode(
        feature_instance_id=instance_id or fresh_instance_id("chain"),
        kind="chain",
        feature_name="chain",
        children=tuple(nodes),
    )


def evaluate(
    root: PipelineNode,
    ctx: SampleContext,
    optics: Any = None,
    inherited: tuple[PropertyRecord, ...] = (),
    env: dict[str, PropertyRecord] | None = None,
) -> tuple[list[TaggedImage], EvalContext]:
    """Evaluate a pipeline for one sample.

    Returns the final image list and the evaluation context (whose
    environment maps node names to resolved records).
    """
    ectx = EvalContext(
        sample=ctx, optics=optics, inherited=inherited, env=dict(env or {})
    )
    return _eval_node(root, [], ectx), ectx


def evaluate_images(
    root: PipelineNode,
    ctx: SampleContext,
    optics: Any = None,
    inherited: tuple[PropertyRecord, ...] = (),
    env: dict[str, PropertyRecord] | None = None,
) -> list[TaggedImage]:
    images, _ = evaluate(root, ctx, optics=optics, inherited=inherited, env=env)
    return images


def _eval_node(
    node: PipelineNode, images: list[TaggedImage], ectx: EvalContext
) -> list[TaggedImage]:
    if node.kind == "chain":
        for child in node.children:
            images = _eval_node(child, images, ectx)
        return images

    if node.kind == "duplicate":
        count_spec = node.property("count")
        if count_spec is None:
            raise ValidationError(
                f"duplicate node '{node.feature_instance_id}' lacks a count"
            )
        if count_spec.kind == "constant":
            count = int(count_spec.value)
        else:
            probe = PipelineNode(
                feature_instance_id=node.feature_instance_id,
                kind="append",
                feature_name="duplicate",
                name=node.name,
                properties=(count_spec,),
                fn=lambda *_: None,
            )
            count = int(round(float(resolve_properties(probe, ectx).values["count"])))
            if count < 1:
                raise ValidationError(
                    f"duplicate node '{node.feature_instance_id}' resolved count {count} < 1"
                )
        for clone in expand_duplicate(node, count):
            images = _eval_node(clone, images, ectx)
        return images

    record = resolve_properties(node, ectx)
    ectx.env[node.name] = record

    if node.kind == "append":
        data = node.fn(record, ectx)
        return images + [TaggedImage(np.asarray(data), (record,))]

    if node.kind in ("transform", "external"):
        out: list[TaggedImage] = []
        for img in images:
            data = node.fn(img.data, record, ectx)
            out.append(TaggedImage(np.asarray(data), img.records + (record,)))
        return out

    if node.kind == "merge":
        if not images:
            raise EmptyInput(
                f"merge feature '{node.feature_instance_id}' received no images"
            )
        data = node.fn(images, record, ectx)
        merged_records = dedupe_records(
            tuple(r for img in images for r in img.records) + (record,)
        )
        return [TaggedImage(np.asarray(data), merged_records)]

    raise AssertionError(f"unhandled kind {node.kind}")


def check_merge_shapes(images: list[TaggedImage]) -> tuple[int, ...]:
    shapes = {img.data.shape for img in images}
    if len(shapes) > 1:
        raise ShapeMismatch(f"cannot merge images with shapes {sorted(shapes)}")
    return next(iter(shapes))


def sample_stream(
    image_root: PipelineNode,
    label_root: PipelineNode | None,
    master_seed: int,
    optics: Any = None,
    start: int = 0,
    count: int | None = None,
    lenient: bool = False,
) -> Iterator[tuple[TaggedImage, TaggedImage | None]]:
    """Stateless stream of (image, label) pairs.

    Item k is a pure function of (master_seed, k): consumption order and
    worker count cannot change it. The label pipeline sees the image
    pipeline's records (inherited for label renderers, and by node name
    for dotted property imports).
    """
    indices = itertools.count(start) if count is None else range(start, start + count)
    for k in indices:
        try:
            yield generate_pair(image_root, label_root, master_seed, k, optics)
        except Exception:
            if lenient:
                continue
            raise


def generate_pair(
    image_root: PipelineNode,
    label_root: PipelineNode | None,
    master_seed: int,
    sample_index: int,
    optics: Any = None,
) -> tuple[TaggedImage, TaggedImage | None]:
    """The (image, label) pair for one sample index."""
    ctx = SampleContext(master_seed=master_seed, sample_index=sample_index)
    images, ectx = evaluate(image_root, ctx, optics=optics)
    if len(images) != 1:
        raise FeatureEvaluationError(
            image_root.feature_instance_id,
            f"image pipeline produced {len(images)} images, expected 1 "
            "(end the pipeline with a merge feature)",
        )
    image = images[0]
    if label_root is None:
        return image, None
    labels, _ = evaluate(
        label_root, ctx, optics=optics, inherited=image.records, env=ectx.env
    )
    if len(labels) != 1:
        raise FeatureEvaluationError(
            label_root.feature_instance_id,
            f"label pipeline produced {len(labels)} images, expected 1",
        )
    return image, labels[0]
