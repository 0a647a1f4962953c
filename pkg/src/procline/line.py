"""Process lines: a common core plus per-variant deltas over selected variants.

The core contains exactly the objects whose identity occurs in every member
variant (attribute values taken from the first variant), and the edges whose
endpoint-key pair occurs in every member.  Each delta stores what the variant
adds on top plus field overrides for core objects, so the original variant
can always be reconstructed exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import (
    IdentityKey,
    MetaModel,
    NotFoundError,
    ProcessError,
    ProcessModel,
    ProcessObject,
    require_valid,
)
from .reflection import ProcessDelta

CORE_MODEL_ID = "core"


def _object_patch(base: ProcessObject, other: ProcessObject) -> dict:
    """Fields of `other` that differ from `base`; empty dict means identical."""
    patch = {}
    if other.name != base.name:
        patch["name"] = other.name
    if other.priority != base.priority:
        patch["priority"] = other.priority
    if other.attributes != base.attributes:
        patch["attributes"] = dict(other.attributes)
    return patch


@dataclass
class VariantDelta:
    """Everything needed to rebuild one variant from the core."""

    variant_id: str
    added_objects: tuple = ()
    removed_object_keys: frozenset = frozenset()
    added_edges: frozenset = frozenset()    # identity-key pairs
    removed_edges: frozenset = frozenset()
    attribute_overrides: dict = field(default_factory=dict)  # key -> field patch
    containment: dict = field(default_factory=dict)          # the variant's full key map
    abstraction_index: int = 1
    characteristics: dict = field(default_factory=dict)
    meta_model: MetaModel = field(default_factory=MetaModel.full)
    refinement_links: tuple = ()

    def __post_init__(self):
        self.added_objects = tuple(self.added_objects)
        self.removed_object_keys = frozenset(self.removed_object_keys)
        self.added_edges = frozenset(self.added_edges)
        self.removed_edges = frozenset(self.removed_edges)
        self.refinement_links = tuple(self.refinement_links)

    @property
    def is_empty(self) -> bool:
        return not (
            self.added_objects
            or self.removed_object_keys
            or self.added_edges
            or self.removed_edges
            or self.attribute_overrides
        )


@dataclass
class ProcessLine:
    core: ProcessModel
    deltas: dict  # variant id -> VariantDelta
    abstraction_indices: dict  # variant id -> int

    def __post_init__(self):
        core_keys = self.core.key_set()
        for vid, delta in self.deltas.items():
            stray = delta.removed_object_keys - core_keys
            if stray:
                raise ProcessError(
                    f"delta {vid!r} removes {sorted(map(str, stray))}, which the core does not contain"
                )
            clashing = {obj.key() for obj in delta.added_objects} & core_keys
            if clashing:
                raise ProcessError(
                    f"delta {vid!r} adds {sorted(map(str, clashing))}, which already exist in the core"
                )

    def variant_ids(self) -> tuple:
        return tuple(sorted(self.deltas))

    def __len__(self) -> int:
        return len(self.deltas)


@dataclass
class CutProcessLine:
    """The members of a line at (or nearest to) one abstraction level."""

    selected_level: int
    members: tuple
    line: ProcessLine


def build_process_line(variants) -> ProcessLine:
    """Factor a non-empty list of variants into core plus deltas."""
    variants = list(variants)
    if not variants:
        raise ProcessError("cannot build a process line from zero variants")
    seen = set()
    for variant in variants:
        if variant.id in seen:
            raise ProcessError(f"duplicate variant id {variant.id!r}")
        seen.add(variant.id)
        require_valid(variant, "variant")

    core_keys = frozenset.intersection(*(v.key_set() for v in variants))
    core_edge_keys = frozenset.intersection(*(v.edge_keys() for v in variants))

    first = variants[0]
    first_by_key = first.by_key()
    core_objects = tuple(obj for obj in first.objects if obj.key() in core_keys)
    core_ids = {obj.id for obj in core_objects}

    # Containment inside the core: nearest ancestor (in the first variant)
    # that is itself a core object.
    containment = {}
    for obj in core_objects:
        node = first.parent_of(obj.id)
        while node is not None and node not in core_ids:
            node = first.parent_of(node)
        if node is not None:
            containment[obj.id] = node

    id_by_key = {obj.key(): obj.id for obj in core_objects}
    core_edges = frozenset(
        (id_by_key[a], id_by_key[b]) for a, b in core_edge_keys
    )

    core = ProcessModel(
        id=CORE_MODEL_ID,
        objects=core_objects,
        edges=core_edges,
        containment=containment,
        meta_model=MetaModel(frozenset().union(*(v.meta_model.kinds for v in variants))),
        abstraction_index=min(v.abstraction_index for v in variants),
    )

    deltas = {}
    for variant in variants:
        by_key = variant.by_key()
        overrides = {}
        for key in core_keys:
            patch = _object_patch(first_by_key[key], by_key[key])
            if patch:
                overrides[key] = patch
        deltas[variant.id] = VariantDelta(
            variant_id=variant.id,
            added_objects=tuple(obj for obj in variant.objects if obj.key() not in core_keys),
            added_edges=variant.edge_keys() - core_edge_keys,
            attribute_overrides=overrides,
            containment=variant.containment_keys(),
            abstraction_index=variant.abstraction_index,
            characteristics=dict(variant.characteristics),
            meta_model=variant.meta_model,
            refinement_links=variant.refinement_links,
        )

    return ProcessLine(
        core=core,
        deltas=deltas,
        abstraction_indices={v.id: v.abstraction_index for v in variants},
    )


def reconstruct_variant(line: ProcessLine, variant_id: str) -> ProcessModel:
    """Invert the factorization: core plus delta gives back the variant."""
    if variant_id not in line.deltas:
        raise NotFoundError(f"process line has no variant {variant_id!r}")
    delta = line.deltas[variant_id]

    taken_ids = {obj.id for obj in delta.added_objects}
    objects = []
    for core_obj in line.core.objects:
        key = core_obj.key()
        if key in delta.removed_object_keys:
            continue
        patch = delta.attribute_overrides.get(key, {})
        obj_id = core_obj.id
        while obj_id in taken_ids:  # keep ids unique if an added object reused one
            obj_id += "+core"
        taken_ids.add(obj_id)
        objects.append(
            ProcessObject(
                id=obj_id,
                kind=core_obj.kind,
                name=patch.get("name", core_obj.name),
                priority=patch.get("priority", core_obj.priority),
                attributes=dict(patch.get("attributes", core_obj.attributes)),
            )
        )
    objects.extend(delta.added_objects)

    id_by_key = {obj.key(): obj.id for obj in objects}
    edge_keys = (line.core.edge_keys() - delta.removed_edges) | delta.added_edges
    edges = frozenset(
        (id_by_key[a], id_by_key[b]) for a, b in edge_keys if a in id_by_key and b in id_by_key
    )
    containment = {
        id_by_key[child]: id_by_key[parent]
        for child, parent in delta.containment.items()
        if child in id_by_key and parent in id_by_key
    }

    return ProcessModel(
        id=variant_id,
        objects=tuple(objects),
        edges=edges,
        containment=containment,
        meta_model=delta.meta_model,
        abstraction_index=delta.abstraction_index,
        characteristics=dict(delta.characteristics),
        refinement_links=delta.refinement_links,
    )


def cut_at_abstraction(line: ProcessLine, level: int) -> CutProcessLine:
    """Members at the requested level, or at the nearest level below it.

    When nothing exists at or below the requested level, the coarsest
    available level is used so navigation always yields a member.
    """
    if level < 1:
        raise ProcessError(f"abstraction level {level} must be >= 1")
    if not line.deltas:
        raise ProcessError("cannot cut an empty process line")

    indices = line.abstraction_indices
    exact = sorted(vid for vid, idx in indices.items() if idx == level)
    if exact:
        return CutProcessLine(selected_level=level, members=tuple(exact), line=line)

    below = [idx for idx in indices.values() if idx < level]
    selected = max(below) if below else min(indices.values())
    members = sorted(vid for vid, idx in indices.items() if idx == selected)
    return CutProcessLine(selected_level=selected, members=tuple(members), line=line)


def diff_to_core(line: ProcessLine, variant_id: str) -> ProcessDelta:
    """Symmetric difference between a variant and the core, plus its overrides."""
    if variant_id not in line.deltas:
        raise NotFoundError(f"process line has no variant {variant_id!r}")
    variant = reconstruct_variant(line, variant_id)
    delta = line.deltas[variant_id]

    core_keys, variant_keys = line.core.key_set(), variant.key_set()
    core_edges, variant_edges = line.core.edge_keys(), variant.edge_keys()
    return ProcessDelta(
        missing_objects=core_keys - variant_keys,
        extra_objects=variant_keys - core_keys,
        missing_edges=core_edges - variant_edges,
        extra_edges=variant_edges - core_edges,
        attribute_overrides={k: dict(v) for k, v in delta.attribute_overrides.items()},
    )
