"""Top-down adaptation of a selected process under the minimal-requirement guard.

Covers the adapt-versus-build gate, meta-model adaptation, single tailoring
actions, the standard tailoring order (milestones, then phases per milestone,
then residual attribute kinds), building a process from scratch with
data-dependency notifications, and the consistency check against the
selected process.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime
from enum import Enum
from typing import Union

from .model import (
    ApprovalRequiredError,
    AttributeKind,
    DataDependency,
    IdentityKey,
    KindDisabledError,
    MANDATORY_KINDS,
    MandatoryKindError,
    MetaModel,
    NotFoundError,
    ObjectKind,
    Priority,
    ProcessError,
    ProcessModel,
    ProcessObject,
    descendants,
    normalize_name,
    require_valid,
)
from .reflection import Approval, JustificationLedger, record_removal


class AdaptDecision(str, Enum):
    ADAPT = "adapt"
    BUILD = "build"


@dataclass(frozen=True)
class RoiEstimate:
    adapt_effort: int
    build_effort: int
    roi: float
    decision: AdaptDecision

    def __post_init__(self):
        expected = AdaptDecision.ADAPT if self.roi > 1 else AdaptDecision.BUILD
        if self.decision is not expected:
            raise ProcessError(f"decision {self.decision.value!r} contradicts roi {self.roi}")


def estimate_roi(selected: ProcessModel, target_sketch: ProcessModel) -> RoiEstimate:
    """Adapt when building from scratch costs strictly more than adapting.

    Effort proxies: adapting costs one unit per object or edge in the
    symmetric difference; building costs one unit per object or edge of the
    target sketch.  roi = build / adapt, and only roi > 1 selects Adapt.
    """
    require_valid(selected, "selected model")
    require_valid(target_sketch, "target sketch")
    object_diff = selected.key_set() ^ target_sketch.key_set()
    edge_diff = selected.edge_keys() ^ target_sketch.edge_keys()
    adapt_effort = len(object_diff) + len(edge_diff)
    build_effort = len(target_sketch.key_set()) + len(target_sketch.edge_keys())
    roi = math.inf if adapt_effort == 0 else build_effort / adapt_effort
    decision = AdaptDecision.ADAPT if roi > 1 else AdaptDecision.BUILD
    return RoiEstimate(adapt_effort, build_effort, roi, decision)


def adapt_meta_model(model: ProcessModel, add=(), remove=()) -> ProcessModel:
    """Enable or disable attribute kinds; disabling strips values everywhere."""
    add = {AttributeKind(k) for k in add}
    remove = {AttributeKind(k) for k in remove}
    blocked = remove & MANDATORY_KINDS
    if blocked:
        names = ", ".join(sorted(k.value for k in blocked))
        raise MandatoryKindError(f"attribute kinds {names} cannot be removed from the meta model")
    kinds = (model.meta_model.kinds - remove) | add
    objects = tuple(
        ProcessObject(
            id=obj.id,
            kind=obj.kind,
            name=obj.name,
            priority=obj.priority,
            attributes={k: v for k, v in obj.attributes.items() if k not in remove},
        )
        for obj in model.objects
    )
    return ProcessModel(
        id=model.id,
        objects=objects,
        edges=model.edges,
        containment=dict(model.containment),
        meta_model=MetaModel(kinds),
        abstraction_index=model.abstraction_index,
        characteristics=dict(model.characteristics),
        refinement_links=model.refinement_links,
    )


# -- tailoring actions ------------------------------------------------------


@dataclass(frozen=True)
class RemoveObject:
    key: IdentityKey
    approval: Approval | None = None


@dataclass(frozen=True)
class AddObject:
    obj: ProcessObject
    parent: IdentityKey | None = None


@dataclass(frozen=True)
class RemoveEdge:
    source: IdentityKey
    target: IdentityKey


@dataclass(frozen=True)
class AddEdge:
    source: IdentityKey
    target: IdentityKey


@dataclass(frozen=True)
class SetAttribute:
    key: IdentityKey
    attribute: AttributeKind
    value: object  # None clears the value


TailoringAction = Union[RemoveObject, AddObject, RemoveEdge, AddEdge, SetAttribute]


def _resolve(model: ProcessModel, key: IdentityKey) -> ProcessObject:
    obj = model.by_key().get(key)
    if obj is None:
        raise NotFoundError(f"model {model.id!r} has no object with identity {key}")
    return obj


def _remove_object(model, action, ledger, at):
    target = _resolve(model, action.key)
    by_id = model.object_by_id()

    # The whole containment subtree is affected: phases vanish with their
    # milestone, tasks survive by moving to the nearest surviving ancestor.
    doomed = {target.id}
    for node_id in descendants(model, target.id):
        if by_id[node_id].kind is not ObjectKind.TASK:
            doomed.add(node_id)

    guarded = sorted(
        (by_id[i].key() for i in doomed if by_id[i].priority is Priority.MINIMAL_REQUIREMENT),
    )
    if guarded:
        if action.approval is None:
            names = ", ".join(str(k) for k in guarded)
            raise ApprovalRequiredError(
                f"removal would delete minimal-requirement object(s) {names}; "
                "project-manager approval with a justification is required",
                keys=tuple(guarded),
            )
        for key in guarded:
            record_removal(ledger, key, action.approval, at)

    objects = tuple(obj for obj in model.objects if obj.id not in doomed)
    edges = frozenset((a, b) for a, b in model.edges if a not in doomed and b not in doomed)

    containment = {}
    for child, parent in model.containment.items():
        if child in doomed:
            continue
        node = parent
        while node is not None and node in doomed:
            node = model.containment.get(node)
        if node is not None:
            containment[child] = node

    return ProcessModel(
        id=model.id,
        objects=objects,
        edges=edges,
        containment=containment,
        meta_model=model.meta_model,
        abstraction_index=model.abstraction_index,
        characteristics=dict(model.characteristics),
        refinement_links=model.refinement_links,
    )


_ALLOWED_PARENTS = {
    ObjectKind.MILESTONE: (),
    ObjectKind.PHASE: (ObjectKind.MILESTONE,),
    ObjectKind.TASK: (ObjectKind.PHASE, ObjectKind.MILESTONE, ObjectKind.TASK),
}


def _add_object(model, action):
    obj = action.obj
    if not normalize_name(obj.name):
        raise ProcessError("cannot add an object with an empty name")
    if obj.key() in model.key_set():
        raise ProcessError(f"an object with identity {obj.key()} already exists")
    if any(existing.id == obj.id for existing in model.objects):
        raise ProcessError(f"object id {obj.id!r} is already in use")
    for kind in obj.attributes:
        if kind not in model.meta_model:
            raise KindDisabledError(
                f"attribute kind {kind.value!r} is not enabled by the meta model"
            )
    containment = dict(model.containment)
    if action.parent is not None:
        parent = _resolve(model, action.parent)
        if parent.kind not in _ALLOWED_PARENTS[obj.kind]:
            raise ProcessError(
                f"a {obj.kind.value} cannot be contained in a {parent.kind.value}"
            )
        containment[obj.id] = parent.id

    return ProcessModel(
        id=model.id,
        objects=model.objects + (obj,),
        edges=model.edges,
        containment=containment,
        meta_model=model.meta_model,
        abstraction_index=model.abstraction_index,
        characteristics=dict(model.characteristics),
        refinement_links=model.refinement_links,
    )


def apply_tailoring(
    model: ProcessModel,
    action: TailoringAction,
    ledger: JustificationLedger | None = None,
    at: datetime | None = None,
) -> ProcessModel:
    """Apply one tailoring action, enforcing the minimal-requirement guard.

    Removing an object removes its incident edges, deletes contained
    non-task objects, and reparents contained tasks; every removed
    minimal-requirement object needs the action's approval and lands in the
    ledger.
    """
    if isinstance(action, RemoveObject):
        return _remove_object(model, action, ledger, at)
    if isinstance(action, AddObject):
        return _add_object(model, action)
    if isinstance(action, (RemoveEdge, AddEdge)):
        source = _resolve(model, action.source)
        target = _resolve(model, action.target)
        pair = (source.id, target.id)
        if isinstance(action, RemoveEdge):
            if pair not in model.edges:
                raise NotFoundError(f"no edge {action.source} -> {action.target}")
            edges = model.edges - {pair}
        else:
            edges = model.edges | {pair}
        return ProcessModel(
            id=model.id,
            objects=model.objects,
            edges=edges,
            containment=dict(model.containment),
            meta_model=model.meta_model,
            abstraction_index=model.abstraction_index,
            characteristics=dict(model.characteristics),
            refinement_links=model.refinement_links,
        )
    if isinstance(action, SetAttribute):
        if AttributeKind(action.attribute) not in model.meta_model:
            raise KindDisabledError(
                f"attribute kind {AttributeKind(action.attribute).value!r} is not enabled by the meta model"
            )
        target = _resolve(model, action.key)
        objects = tuple(
            obj.with_attribute(action.attribute, action.value) if obj.id == target.id else obj
            for obj in model.objects
        )
        return ProcessModel(
            id=model.id,
            objects=objects,
            edges=model.edges,
            containment=dict(model.containment),
            meta_model=model.meta_model,
            abstraction_index=model.abstraction_index,
            characteristics=dict(model.characteristics),
            refinement_links=model.refinement_links,
        )
    raise ProcessError(f"unknown tailoring action {action!r}")


# -- standard tailoring ------------------------------------------------------


@dataclass(frozen=True)
class PlanStep:
    """Removals then additions for one attribute kind of the standard order."""

    kind: AttributeKind
    remove: tuple = ()  # RemoveObject (object kinds) or SetAttribute with value None
    add: tuple = ()     # AddObject (object kinds) or SetAttribute

    def __post_init__(self):
        object.__setattr__(self, "kind", AttributeKind(self.kind))
        object.__setattr__(self, "remove", tuple(self.remove))
        object.__setattr__(self, "add", tuple(self.add))


@dataclass(frozen=True)
class TailoringPlan:
    steps: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))

    def step_for(self, kind: AttributeKind) -> PlanStep | None:
        for step in self.steps:
            if step.kind is AttributeKind(kind):
                return step
        return None


def expand_standard_plan(model: ProcessModel, plan: TailoringPlan) -> list:
    """Flatten a plan into the concrete action order of standard tailoring.

    Milestone actions come first, then phase actions iterated per surviving
    milestone, then residual kinds in plan order.  Removals whose target has
    already vanished in a cascade are dropped.
    """
    for step in plan.steps:
        if step.kind not in model.meta_model:
            raise KindDisabledError(
                f"plan addresses {step.kind.value!r}, which the meta model does not enable"
            )

    working = model
    actions = []

    def push(action) -> None:
        nonlocal working
        gone = isinstance(action, (RemoveObject, SetAttribute)) and action.key not in working.key_set()
        if gone and (isinstance(action, RemoveObject) or action.value is None):
            return  # cascade already removed the target
        working = apply_tailoring(working, action)
        actions.append(action)

    milestone_step = plan.step_for(AttributeKind.MILESTONES)
    if milestone_step:
        for action in milestone_step.remove:
            push(action)
        for action in milestone_step.add:
            push(action)

    phase_step = plan.step_for(AttributeKind.PHASES)
    if phase_step:
        pending_removals = list(phase_step.remove)
        pending_additions = list(phase_step.add)
        for milestone in working.objects_of_kind(ObjectKind.MILESTONE):
            milestone_key = milestone.key()
            for action in list(pending_removals):
                target = working.by_key().get(action.key)
                if target is not None and working.parent_of(target.id) == milestone.id:
                    push(action)
                    pending_removals.remove(action)
            for action in list(pending_additions):
                if action.parent == milestone_key:
                    push(action)
                    pending_additions.remove(action)
        for action in pending_removals + pending_additions:
            push(action)

    for step in plan.steps:
        if step.kind in (AttributeKind.MILESTONES, AttributeKind.PHASES):
            continue
        for action in step.remove:
            push(action)
        for action in step.add:
            push(action)

    return actions


def standard_tailoring(
    model: ProcessModel,
    plan: TailoringPlan,
    ledger: JustificationLedger | None = None,
    at: datetime | None = None,
) -> ProcessModel:
    """Run a whole plan atomically; the first error leaves the model unchanged."""
    staging = JustificationLedger()
    working = model
    for action in expand_standard_plan(model, plan):
        working = apply_tailoring(working, action, ledger=staging, at=at)
    if ledger is not None:
        for entry in staging.entries:
            ledger.append(entry)
    return working


# -- building a process from scratch ----------------------------------------


@dataclass(frozen=True)
class MilestoneSpec:
    """A milestone to build: deliverables, due time, maturity, responsible role."""

    name: str
    deliverables: tuple
    due: str
    maturity: int
    responsible: str
    priority: Priority = Priority.RECOMMENDED

    def __post_init__(self):
        object.__setattr__(self, "deliverables", tuple(self.deliverables))
        object.__setattr__(self, "priority", Priority(self.priority))


@dataclass(frozen=True)
class TaskSpec:
    name: str
    milestone: str  # name of the milestone context
    parent: str | None = None  # name of the parent task for sub-task nesting
    priority: Priority = Priority.OPTIONAL
    performer: str | None = None
    inputs: tuple = ()
    outputs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "priority", Priority(self.priority))
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))


def build_process(
    meta: MetaModel,
    milestones,
    tasks,
    deps=(),
    model_id: str = "built-process",
):
    """Assemble a model from milestone and task specs.

    Returns the validated model plus notifications: for every task whose
    outputs feed a known data dependency, the role owning the dependent
    datum must be informed.
    """
    milestones = list(milestones)
    tasks = list(tasks)

    # Milestones inherently carry their four describing attributes, so the
    # corresponding kinds join the meta model if missing.
    needed = {
        AttributeKind.OUTPUTS,
        AttributeKind.DELIVERY_TIME,
        AttributeKind.DELIVERABLE_MATURITY,
        AttributeKind.ROLES,
    }
    if any(spec.inputs for spec in tasks):
        needed.add(AttributeKind.INPUTS)
    meta = MetaModel(meta.kinds | needed)

    by_task_name: dict = {}
    for spec in tasks:
        if spec.name in by_task_name:
            raise ProcessError(f"duplicate task name {spec.name!r}")
        by_task_name[spec.name] = spec

    # Parent links must form a forest before any object exists.
    for spec in tasks:
        seen = {spec.name}
        node = spec.parent
        while node is not None:
            if node not in by_task_name:
                raise NotFoundError(f"task {spec.name!r} names unknown parent {node!r}")
            if node in seen:
                raise ProcessError(f"cyclic sub-task parent links through {node!r}")
            seen.add(node)
            node = by_task_name[node].parent

    objects = []
    containment = {}
    milestone_ids: dict = {}
    for index, spec in enumerate(milestones, start=1):
        if spec.name in milestone_ids:
            raise ProcessError(f"duplicate milestone name {spec.name!r}")
        obj_id = f"m{index}"
        milestone_ids[spec.name] = obj_id
        objects.append(
            ProcessObject(
                id=obj_id,
                kind=ObjectKind.MILESTONE,
                name=spec.name,
                priority=spec.priority,
                attributes={
                    AttributeKind.OUTPUTS: spec.deliverables,
                    AttributeKind.DELIVERY_TIME: spec.due,
                    AttributeKind.DELIVERABLE_MATURITY: spec.maturity,
                    AttributeKind.ROLES: spec.responsible,
                },
            )
        )

    task_ids: dict = {}
    for index, spec in enumerate(tasks, start=1):
        if spec.milestone not in milestone_ids:
            raise NotFoundError(f"task {spec.name!r} references unknown milestone {spec.milestone!r}")
        task_ids[spec.name] = f"t{index}"
    for spec in tasks:
        attributes = {}
        if spec.performer is not None:
            attributes[AttributeKind.ROLES] = spec.performer
        if spec.inputs:
            attributes[AttributeKind.INPUTS] = spec.inputs
        if spec.outputs:
            attributes[AttributeKind.OUTPUTS] = spec.outputs
        obj_id = task_ids[spec.name]
        objects.append(
            ProcessObject(
                id=obj_id,
                kind=ObjectKind.TASK,
                name=spec.name,
                priority=spec.priority,
                attributes=attributes,
            )
        )
        if spec.parent is not None:
            containment[obj_id] = task_ids[spec.parent]
        else:
            containment[obj_id] = milestone_ids[spec.milestone]

    model = ProcessModel(
        id=model_id,
        objects=tuple(objects),
        containment=containment,
        meta_model=meta,
    )
    require_valid(model, "built model")

    notifications = []
    for spec in tasks:
        for dep in deps:
            if dep.from_artifact in spec.outputs:
                notification = (task_ids[spec.name], dep.owner_of_to)
                if notification not in notifications:
                    notifications.append(notification)
    return model, notifications


# -- consistency check -------------------------------------------------------


@dataclass(frozen=True)
class ConsistencyViolation:
    missing_key: IdentityKey
    kind: ObjectKind
    source: str = "selected process"


def check_consistency(selected: ProcessModel, tailored: ProcessModel) -> list:
    """Every minimal-requirement milestone or task of the selected process must survive."""
    require_valid(selected, "selected model")
    require_valid(tailored, "tailored model")
    tailored_keys = tailored.key_set()
    violations = []
    for obj in selected.objects:
        if obj.priority is not Priority.MINIMAL_REQUIREMENT:
            continue
        if obj.kind not in (ObjectKind.MILESTONE, ObjectKind.TASK):
            continue
        key = obj.key()
        if key not in tailored_keys:
            violations.append(ConsistencyViolation(missing_key=key, kind=obj.kind))
    return violations


def apply_fixes(tailored: ProcessModel, violations, selected: ProcessModel) -> ProcessModel:
    """Copy the missing objects back, anchored at the nearest surviving ancestor."""
    selected_by_key = selected.by_key()
    ordered = sorted(
        violations,
        key=lambda v: (0 if v.kind is ObjectKind.MILESTONE else 1, str(v.missing_key)),
    )
    working = tailored
    for violation in ordered:
        source = selected_by_key.get(violation.missing_key)
        if source is None:
            raise NotFoundError(
                f"consistency violation names {violation.missing_key}, which the selected process lacks"
            )
        if violation.missing_key in working.key_set():
            continue

        parent_key = None
        node = selected.parent_of(source.id)
        selected_ids = selected.object_by_id()
        while node is not None:
            candidate = selected_ids[node].key()
            if candidate in working.key_set():
                parent_key = candidate
                break
            node = selected.parent_of(node)

        taken = {obj.id for obj in working.objects}
        obj_id = source.id
        while obj_id in taken:
            obj_id += "+fix"
        attributes = {k: v for k, v in source.attributes.items() if k in working.meta_model}
        copy = ProcessObject(
            id=obj_id,
            kind=source.kind,
            name=source.name,
            priority=source.priority,
            attributes=attributes,
        )
        working = apply_tailoring(working, AddObject(obj=copy, parent=parent_key))
    return working
