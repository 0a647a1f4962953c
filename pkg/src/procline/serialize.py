"""Strict JSON persistence for every domain value.

Unknown fields are rejected with their location, numbers and enums are type
checked, and load(save(x)) gives back an equal value.  The process base file
carries a schema version so incompatible files fail fast instead of loading
half-right.
"""

from __future__ import annotations

import json
from pathlib import Path

from .model import (
    AttributeKind,
    IdentityKey,
    MetaModel,
    ParseError,
    Priority,
    ProcessError,
    ProcessModel,
    ProcessObject,
    SchemaVersionError,
    require_valid,
)
from .line import CutProcessLine, ProcessLine, VariantDelta
from .reflection import (
    Approval,
    DecisionAction,
    JustificationLedger,
    LedgerEntry,
    ProcessDelta,
    RefinementDecision,
    RelationConflict,
    Relation,
    parse_timestamp,
)
from .selection import ProjectCharacteristic
from . import tailoring

SCHEMA_VERSION = 1


def _expect_object(value, path: str, required, optional=()) -> dict:
    if not isinstance(value, dict):
        raise ParseError(f"{path}: expected an object, got {type(value).__name__}")
    unknown = sorted(set(value) - set(required) - set(optional))
    if unknown:
        raise ParseError(f"{path}: unknown fields {unknown}")
    missing = sorted(set(required) - set(value))
    if missing:
        raise ParseError(f"{path}: missing required fields {missing}")
    return value


def _expect_str(value, path: str) -> str:
    if not isinstance(value, str):
        raise ParseError(f"{path}: expected a string, got {type(value).__name__}")
    return value


def _expect_int(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"{path}: expected an integer, got {type(value).__name__}")
    return value


def _expect_list(value, path: str) -> list:
    if not isinstance(value, list):
        raise ParseError(f"{path}: expected an array, got {type(value).__name__}")
    return value


def _jsonable(value):
    if isinstance(value, tuple):
        return [_jsonable(v) for v in value]
    return value


def _freeze(value):
    if isinstance(value, list):
        return tuple(_freeze(v) for v in value)
    return value


# -- process objects and models ------------------------------------------------


def object_to_dict(obj: ProcessObject) -> dict:
    return {
        "id": obj.id,
        "kind": obj.kind.value,
        "name": obj.name,
        "priority": obj.priority.value,
        "attributes": {k.value: _jsonable(v) for k, v in sorted(obj.attributes.items())},
    }


def object_from_dict(data, path: str = "object") -> ProcessObject:
    data = _expect_object(data, path, required=("id", "kind", "name"), optional=("priority", "attributes"))
    attributes = data.get("attributes", {})
    if not isinstance(attributes, dict):
        raise ParseError(f"{path}.attributes: expected an object")
    try:
        return ProcessObject(
            id=_expect_str(data["id"], f"{path}.id"),
            kind=data["kind"],
            name=_expect_str(data["name"], f"{path}.name"),
            priority=data.get("priority", Priority.OPTIONAL.value),
            attributes={k: _freeze(v) for k, v in attributes.items()},
        )
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from None


def model_to_dict(model: ProcessModel) -> dict:
    return {
        "id": model.id,
        "abstraction_index": model.abstraction_index,
        "characteristics": dict(sorted(model.characteristics.items())),
        "meta_model": sorted(k.value for k in model.meta_model.kinds),
        "objects": [object_to_dict(obj) for obj in model.objects],
        "edges": sorted([a, b] for a, b in model.edges),
        "containment": dict(sorted(model.containment.items())),
        "refinement_links": list(model.refinement_links),
    }


def model_from_dict(data, path: str = "model") -> ProcessModel:
    data = _expect_object(
        data,
        path,
        required=("id", "objects"),
        optional=(
            "abstraction_index",
            "characteristics",
            "meta_model",
            "edges",
            "containment",
            "refinement_links",
        ),
    )
    objects = tuple(
        object_from_dict(item, f"{path}.objects[{i}]")
        for i, item in enumerate(_expect_list(data["objects"], f"{path}.objects"))
    )
    edges = set()
    for i, pair in enumerate(_expect_list(data.get("edges", []), f"{path}.edges")):
        pair = _expect_list(pair, f"{path}.edges[{i}]")
        if len(pair) != 2:
            raise ParseError(f"{path}.edges[{i}]: an edge is a pair of object ids")
        edges.add((_expect_str(pair[0], f"{path}.edges[{i}][0]"), _expect_str(pair[1], f"{path}.edges[{i}][1]")))
    containment = data.get("containment", {})
    if not isinstance(containment, dict):
        raise ParseError(f"{path}.containment: expected an object")
    try:
        meta = MetaModel(frozenset(data.get("meta_model", [k.value for k in AttributeKind])))
    except ValueError as exc:
        raise ParseError(f"{path}.meta_model: {exc}") from None
    characteristics = data.get("characteristics", {})
    if not isinstance(characteristics, dict):
        raise ParseError(f"{path}.characteristics: expected an object")
    return ProcessModel(
        id=_expect_str(data["id"], f"{path}.id"),
        objects=objects,
        edges=frozenset(edges),
        containment=dict(containment),
        meta_model=meta,
        abstraction_index=_expect_int(data.get("abstraction_index", 1), f"{path}.abstraction_index"),
        characteristics=dict(characteristics),
        refinement_links=tuple(
            _expect_str(v, f"{path}.refinement_links[{i}]")
            for i, v in enumerate(_expect_list(data.get("refinement_links", []), f"{path}.refinement_links"))
        ),
    )


# -- process base ---------------------------------------------------------------


def base_to_dict(base) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "variants": [model_to_dict(v) for v in base.variants],
    }


def base_from_dict(data, path: str = "base"):
    from .interfaces import ProcessBase  # local import to avoid a cycle

    data = _expect_object(data, path, required=("schema_version", "variants"))
    version = _expect_int(data["schema_version"], f"{path}.schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaVersionError(
            f"process base has schema version {version}, this build reads {SCHEMA_VERSION}; "
            "migration required"
        )
    variants = [
        model_from_dict(item, f"{path}.variants[{i}]")
        for i, item in enumerate(_expect_list(data["variants"], f"{path}.variants"))
    ]
    return ProcessBase(variants=tuple(variants))


def load_base(path):
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}")
    return base_from_dict(data, path=str(path))


def save_base(base, path) -> None:
    Path(path).write_text(dumps(base_to_dict(base)), encoding="utf-8")


def dumps(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


# -- identity keys, deltas, lines -----------------------------------------------


def key_to_str(key: IdentityKey) -> str:
    return str(key)


def key_pair_to_list(pair) -> list:
    return [str(pair[0]), str(pair[1])]


def _key_from(value, path: str) -> IdentityKey:
    return IdentityKey.parse(_expect_str(value, path))


def _key_pair_from(value, path: str):
    pair = _expect_list(value, path)
    if len(pair) != 2:
        raise ParseError(f"{path}: an edge is a pair of identity keys")
    return (_key_from(pair[0], f"{path}[0]"), _key_from(pair[1], f"{path}[1]"))


def _patch_to_dict(patch: dict) -> dict:
    out = {}
    if "name" in patch:
        out["name"] = patch["name"]
    if "priority" in patch:
        out["priority"] = Priority(patch["priority"]).value
    if "attributes" in patch:
        out["attributes"] = {k.value: _jsonable(v) for k, v in sorted(patch["attributes"].items())}
    return out


def _patch_from_dict(data, path: str) -> dict:
    data = _expect_object(data, path, required=(), optional=("name", "priority", "attributes"))
    patch = {}
    if "name" in data:
        patch["name"] = _expect_str(data["name"], f"{path}.name")
    if "priority" in data:
        patch["priority"] = Priority(data["priority"])
    if "attributes" in data:
        attrs = data["attributes"]
        if not isinstance(attrs, dict):
            raise ParseError(f"{path}.attributes: expected an object")
        patch["attributes"] = {AttributeKind(k): _freeze(v) for k, v in attrs.items()}
    return patch


def delta_to_dict(delta: VariantDelta) -> dict:
    return {
        "variant_id": delta.variant_id,
        "added_objects": [object_to_dict(o) for o in delta.added_objects],
        "removed_object_keys": sorted(str(k) for k in delta.removed_object_keys),
        "added_edges": sorted(key_pair_to_list(p) for p in delta.added_edges),
        "removed_edges": sorted(key_pair_to_list(p) for p in delta.removed_edges),
        "attribute_overrides": {
            str(k): _patch_to_dict(v) for k, v in sorted(delta.attribute_overrides.items())
        },
        "containment": {str(c): str(p) for c, p in sorted(delta.containment.items())},
        "abstraction_index": delta.abstraction_index,
        "characteristics": dict(sorted(delta.characteristics.items())),
        "meta_model": sorted(k.value for k in delta.meta_model.kinds),
        "refinement_links": list(delta.refinement_links),
    }


def delta_from_dict(data, path: str = "delta") -> VariantDelta:
    data = _expect_object(
        data,
        path,
        required=("variant_id",),
        optional=(
            "added_objects",
            "removed_object_keys",
            "added_edges",
            "removed_edges",
            "attribute_overrides",
            "containment",
            "abstraction_index",
            "characteristics",
            "meta_model",
            "refinement_links",
        ),
    )
    return VariantDelta(
        variant_id=_expect_str(data["variant_id"], f"{path}.variant_id"),
        added_objects=tuple(
            object_from_dict(o, f"{path}.added_objects[{i}]")
            for i, o in enumerate(_expect_list(data.get("added_objects", []), f"{path}.added_objects"))
        ),
        removed_object_keys=frozenset(
            _key_from(k, f"{path}.removed_object_keys[{i}]")
            for i, k in enumerate(_expect_list(data.get("removed_object_keys", []), f"{path}.removed_object_keys"))
        ),
        added_edges=frozenset(
            _key_pair_from(p, f"{path}.added_edges[{i}]")
            for i, p in enumerate(_expect_list(data.get("added_edges", []), f"{path}.added_edges"))
        ),
        removed_edges=frozenset(
            _key_pair_from(p, f"{path}.removed_edges[{i}]")
            for i, p in enumerate(_expect_list(data.get("removed_edges", []), f"{path}.removed_edges"))
        ),
        attribute_overrides={
            IdentityKey.parse(k): _patch_from_dict(v, f"{path}.attribute_overrides[{k}]")
            for k, v in data.get("attribute_overrides", {}).items()
        },
        containment={
            IdentityKey.parse(c): IdentityKey.parse(p)
            for c, p in data.get("containment", {}).items()
        },
        abstraction_index=_expect_int(data.get("abstraction_index", 1), f"{path}.abstraction_index"),
        characteristics=dict(data.get("characteristics", {})),
        meta_model=MetaModel(frozenset(data.get("meta_model", [k.value for k in AttributeKind]))),
        refinement_links=tuple(data.get("refinement_links", [])),
    )


def line_to_dict(line: ProcessLine) -> dict:
    return {
        "core": model_to_dict(line.core),
        "deltas": {vid: delta_to_dict(d) for vid, d in sorted(line.deltas.items())},
        "abstraction_indices": dict(sorted(line.abstraction_indices.items())),
    }


def line_from_dict(data, path: str = "line") -> ProcessLine:
    data = _expect_object(data, path, required=("core", "deltas", "abstraction_indices"))
    deltas = {
        vid: delta_from_dict(d, f"{path}.deltas[{vid}]") for vid, d in data["deltas"].items()
    }
    indices = {
        vid: _expect_int(v, f"{path}.abstraction_indices[{vid}]")
        for vid, v in data["abstraction_indices"].items()
    }
    return ProcessLine(
        core=model_from_dict(data["core"], f"{path}.core"),
        deltas=deltas,
        abstraction_indices=indices,
    )


def cut_to_dict(cut: CutProcessLine) -> dict:
    return {"selected_level": cut.selected_level, "members": list(cut.members)}


def process_delta_to_dict(delta: ProcessDelta) -> dict:
    return {
        "missing_objects": sorted(str(k) for k in delta.missing_objects),
        "extra_objects": sorted(str(k) for k in delta.extra_objects),
        "missing_edges": sorted(key_pair_to_list(p) for p in delta.missing_edges),
        "extra_edges": sorted(key_pair_to_list(p) for p in delta.extra_edges),
        "relation_conflicts": [
            {
                "a": str(c.a),
                "b": str(c.b),
                "prescriptive": c.prescriptive.value,
                "performed": c.performed.value,
            }
            for c in delta.relation_conflicts
        ],
        "frequency": dict(sorted(delta.frequency.items())),
        "case_count": delta.case_count,
        "attribute_overrides": {
            str(k): _patch_to_dict(v) for k, v in sorted(delta.attribute_overrides.items())
        },
    }


def process_delta_from_dict(data, path: str = "delta") -> ProcessDelta:
    data = _expect_object(
        data,
        path,
        required=(),
        optional=(
            "missing_objects",
            "extra_objects",
            "missing_edges",
            "extra_edges",
            "relation_conflicts",
            "frequency",
            "case_count",
            "attribute_overrides",
        ),
    )
    return ProcessDelta(
        missing_objects=frozenset(
            _key_from(k, f"{path}.missing_objects[{i}]")
            for i, k in enumerate(data.get("missing_objects", []))
        ),
        extra_objects=frozenset(
            _key_from(k, f"{path}.extra_objects[{i}]")
            for i, k in enumerate(data.get("extra_objects", []))
        ),
        missing_edges=frozenset(
            _key_pair_from(p, f"{path}.missing_edges[{i}]")
            for i, p in enumerate(data.get("missing_edges", []))
        ),
        extra_edges=frozenset(
            _key_pair_from(p, f"{path}.extra_edges[{i}]")
            for i, p in enumerate(data.get("extra_edges", []))
        ),
        relation_conflicts=tuple(
            RelationConflict(
                a=_key_from(c["a"], f"{path}.relation_conflicts[{i}].a"),
                b=_key_from(c["b"], f"{path}.relation_conflicts[{i}].b"),
                prescriptive=Relation(c["prescriptive"]),
                performed=Relation(c["performed"]),
            )
            for i, c in enumerate(data.get("relation_conflicts", []))
        ),
        frequency=dict(data.get("frequency", {})),
        case_count=data.get("case_count", 0),
        attribute_overrides={
            IdentityKey.parse(k): _patch_from_dict(v, f"{path}.attribute_overrides[{k}]")
            for k, v in data.get("attribute_overrides", {}).items()
        },
    )


# -- ledger, approvals, decisions, characteristics ------------------------------


def ledger_to_dict(ledger: JustificationLedger) -> list:
    return [
        {
            "timestamp": e.timestamp.isoformat(),
            "actor": e.actor,
            "action": e.action,
            "target": e.target,
            "justification": e.justification,
        }
        for e in ledger.entries
    ]


def ledger_from_list(data, path: str = "ledger") -> JustificationLedger:
    entries = []
    for i, item in enumerate(_expect_list(data, path)):
        item = _expect_object(
            item, f"{path}[{i}]", required=("timestamp", "actor", "action", "target", "justification")
        )
        entries.append(
            LedgerEntry(
                timestamp=parse_timestamp(item["timestamp"]),
                actor=item["actor"],
                action=item["action"],
                target=item["target"],
                justification=item["justification"],
            )
        )
    return JustificationLedger(entries)


def approval_from_dict(data, path: str = "approval") -> Approval:
    data = _expect_object(data, path, required=("approver", "justification"))
    return Approval(
        approver=_expect_str(data["approver"], f"{path}.approver"),
        justification=_expect_str(data["justification"], f"{path}.justification"),
    )


def approval_to_dict(approval: Approval) -> dict:
    return {"approver": approval.approver, "justification": approval.justification}


def decision_to_dict(decision: RefinementDecision) -> dict:
    out = {
        "target": key_pair_to_list(decision.target) if decision.is_edge else str(decision.target),
        "action": decision.action.value,
    }
    if decision.approval is not None:
        out["approval"] = approval_to_dict(decision.approval)
    return out


def decision_from_dict(data, path: str = "decision") -> RefinementDecision:
    data = _expect_object(data, path, required=("target", "action"), optional=("approval",))
    raw_target = data["target"]
    if isinstance(raw_target, list):
        target = _key_pair_from(raw_target, f"{path}.target")
    else:
        target = _key_from(raw_target, f"{path}.target")
    approval = approval_from_dict(data["approval"], f"{path}.approval") if "approval" in data else None
    try:
        action = DecisionAction(data["action"])
    except ValueError:
        raise ParseError(f"{path}.action: unknown action {data['action']!r}") from None
    return RefinementDecision(target=target, action=action, approval=approval)


def characteristic_to_dict(c: ProjectCharacteristic) -> dict:
    out = {"name": c.name, "value": c.value, "weight": c.weight}
    if c.ordinal_range is not None:
        out["range"] = list(c.ordinal_range)
    return out


def characteristic_from_dict(data, path: str = "characteristic") -> ProjectCharacteristic:
    data = _expect_object(data, path, required=("name", "value"), optional=("weight", "range"))
    span = None
    if "range" in data:
        pair = _expect_list(data["range"], f"{path}.range")
        if len(pair) != 2:
            raise ParseError(f"{path}.range: expected [low, high]")
        span = (pair[0], pair[1])
    weight = data.get("weight", 1.0)
    if isinstance(weight, bool) or not isinstance(weight, (int, float)):
        raise ParseError(f"{path}.weight: expected a number")
    return ProjectCharacteristic(
        name=_expect_str(data["name"], f"{path}.name"),
        value=data["value"],
        weight=float(weight),
        ordinal_range=span,
    )


def characteristics_from_list(data, path: str = "characteristics") -> list:
    return [
        characteristic_from_dict(item, f"{path}[{i}]")
        for i, item in enumerate(_expect_list(data, path))
    ]


# -- tailoring actions -----------------------------------------------------------


def action_to_dict(action) -> dict:
    if isinstance(action, tailoring.RemoveObject):
        out = {"type": "remove-object", "key": str(action.key)}
        if action.approval is not None:
            out["approval"] = approval_to_dict(action.approval)
        return out
    if isinstance(action, tailoring.AddObject):
        out = {"type": "add-object", "object": object_to_dict(action.obj)}
        if action.parent is not None:
            out["parent"] = str(action.parent)
        return out
    if isinstance(action, tailoring.RemoveEdge):
        return {"type": "remove-edge", "source": str(action.source), "target": str(action.target)}
    if isinstance(action, tailoring.AddEdge):
        return {"type": "add-edge", "source": str(action.source), "target": str(action.target)}
    if isinstance(action, tailoring.SetAttribute):
        return {
            "type": "set-attribute",
            "key": str(action.key),
            "attribute": action.attribute.value,
            "value": _jsonable(action.value),
        }
    raise ProcessError(f"cannot serialize action {action!r}")


def action_from_dict(data, path: str = "action"):
    if not isinstance(data, dict) or "type" not in data:
        raise ParseError(f"{path}: expected an object with a 'type' field")
    kind = data["type"]
    if kind == "remove-object":
        data = _expect_object(data, path, required=("type", "key"), optional=("approval",))
        approval = approval_from_dict(data["approval"], f"{path}.approval") if "approval" in data else None
        return tailoring.RemoveObject(key=_key_from(data["key"], f"{path}.key"), approval=approval)
    if kind == "add-object":
        data = _expect_object(data, path, required=("type", "object"), optional=("parent",))
        parent = _key_from(data["parent"], f"{path}.parent") if "parent" in data else None
        return tailoring.AddObject(obj=object_from_dict(data["object"], f"{path}.object"), parent=parent)
    if kind == "remove-edge":
        data = _expect_object(data, path, required=("type", "source", "target"))
        return tailoring.RemoveEdge(
            source=_key_from(data["source"], f"{path}.source"),
            target=_key_from(data["target"], f"{path}.target"),
        )
    if kind == "add-edge":
        data = _expect_object(data, path, required=("type", "source", "target"))
        return tailoring.AddEdge(
            source=_key_from(data["source"], f"{path}.source"),
            target=_key_from(data["target"], f"{path}.target"),
        )
    if kind == "set-attribute":
        data = _expect_object(data, path, required=("type", "key", "attribute", "value"))
        try:
            attribute = AttributeKind(data["attribute"])
        except ValueError:
            raise ParseError(f"{path}.attribute: unknown kind {data['attribute']!r}") from None
        return tailoring.SetAttribute(
            key=_key_from(data["key"], f"{path}.key"),
            attribute=attribute,
            value=_freeze(data["value"]),
        )
    raise ParseError(f"{path}.type: unknown action type {kind!r}")
