"""Core domain types: process objects, attribute meta model, identity, validation.

A process model is a graph of milestones, phases, and tasks.  Objects carry
values for the attribute kinds enabled by the model's meta model, a
"directly precedes" edge relation, and a containment forest
(milestone > phase > task, with task-under-task nesting for sub-tasks).
Everything here is treated as an immutable value after construction;
operations elsewhere build new models instead of mutating.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum


class ProcessError(Exception):
    """Base class for domain errors. Mapped to exit code 1 / HTTP 4xx."""

    code = "domain-error"


class NotFoundError(ProcessError):
    code = "not-found"


class ApprovalRequiredError(ProcessError):
    """Raised when a minimal-requirement object would be removed without approval."""

    code = "approval-required"

    def __init__(self, message: str, keys: tuple = ()):
        super().__init__(message)
        self.keys = tuple(keys)


class MandatoryKindError(ProcessError):
    code = "mandatory-kind"


class KindDisabledError(ProcessError):
    code = "kind-disabled"


class InvalidQueryError(ProcessError):
    code = "invalid-query"


class InvalidObjectError(ProcessError):
    code = "invalid-object"


class PhaseError(ProcessError):
    code = "phase-error"


class ParseError(ProcessError):
    code = "parse-error"

    def __init__(self, message: str, line: int | None = None, field_name: str | None = None):
        detail = message
        if line is not None:
            detail = f"line {line}: {detail}"
        super().__init__(detail)
        self.line = line
        self.field_name = field_name


class SchemaVersionError(ProcessError):
    code = "migration-required"


class ObjectKind(str, Enum):
    MILESTONE = "milestone"
    PHASE = "phase"
    TASK = "task"


class AttributeKind(str, Enum):
    """The closed set of process attributes a meta model can enable."""

    MILESTONES = "milestones"
    PHASES = "phases"
    PHASE_PRECONDITION = "phase-precondition"
    PHASE_POSTCONDITION = "phase-postcondition"
    DELIVERY_TIME = "delivery-time"
    DELIVERABLE_MATURITY = "deliverable-maturity"
    ACTIVITIES = "activities"
    ACTIVITY_PRECONDITION = "activity-precondition"
    ACTIVITY_POSTCONDITION = "activity-postcondition"
    ACTIVITY_PRIORITY = "activity-priority"
    INPUTS = "inputs"
    OUTPUTS = "outputs"
    SUPPORT_PROCESS_INTERFACES = "support-process-interfaces"
    ROLES = "roles"


# Kinds that can never be disabled: tailoring guards and the consistency
# check rely on activities and their priorities being describable.
MANDATORY_KINDS = frozenset({AttributeKind.ACTIVITIES, AttributeKind.ACTIVITY_PRIORITY})

# Attribute kinds every milestone must populate when they are enabled:
# deliverables, due time, maturity of the deliverable, responsible role.
MILESTONE_EXTRAS = (
    AttributeKind.OUTPUTS,
    AttributeKind.DELIVERY_TIME,
    AttributeKind.DELIVERABLE_MATURITY,
    AttributeKind.ROLES,
)

MATURITY_RANGE = (0, 5)

# Abstraction index assigned to models mined from logs: they sit at the most
# detailed level the workbench distinguishes (1 = most abstract).
MAX_ABSTRACTION_INDEX = 2 ** 31 - 1


class Priority(str, Enum):
    MINIMAL_REQUIREMENT = "minimal-requirement"
    RECOMMENDED = "recommended"
    OPTIONAL = "optional"

    @property
    def rank(self) -> int:
        return _PRIORITY_RANK[self]


_PRIORITY_RANK = {
    Priority.MINIMAL_REQUIREMENT: 3,
    Priority.RECOMMENDED: 2,
    Priority.OPTIONAL: 1,
}


@dataclass(frozen=True)
class MetaModel:
    """The attribute kinds a model is described with. Mandatory kinds are always in."""

    kinds: frozenset = frozenset()

    def __post_init__(self):
        normalized = frozenset(AttributeKind(k) for k in self.kinds) | MANDATORY_KINDS
        object.__setattr__(self, "kinds", normalized)

    @classmethod
    def full(cls) -> "MetaModel":
        return cls(frozenset(AttributeKind))

    def __contains__(self, kind: AttributeKind) -> bool:
        return kind in self.kinds

    def __iter__(self):
        return iter(sorted(self.kinds, key=lambda k: k.value))


def normalize_name(name: str) -> str:
    """Case-fold and collapse whitespace so cosmetic differences do not split identity."""
    return " ".join(name.split()).casefold()


@dataclass(frozen=True, order=True)
class IdentityKey:
    """Cross-variant identity of a process object: kind plus normalized name."""

    kind: ObjectKind
    name: str

    def __str__(self) -> str:
        return f"{self.kind.value}:{self.name}"

    @classmethod
    def of(cls, kind: ObjectKind, name: str) -> "IdentityKey":
        normalized = normalize_name(name)
        if not normalized:
            raise InvalidObjectError("cannot build an identity key from an empty name")
        return cls(ObjectKind(kind), normalized)

    @classmethod
    def parse(cls, text: str) -> "IdentityKey":
        kind, sep, name = text.partition(":")
        if not sep or not name:
            raise ParseError(f"malformed identity key {text!r}, expected 'kind:name'")
        return cls.of(ObjectKind(kind), name)


def _freeze_value(value):
    if isinstance(value, (list, tuple)):
        return tuple(_freeze_value(v) for v in value)
    return value


@dataclass
class ProcessObject:
    """One milestone, phase, or task with its attribute values."""

    id: str
    kind: ObjectKind
    name: str
    priority: Priority = Priority.OPTIONAL
    attributes: dict = field(default_factory=dict)

    def __post_init__(self):
        self.kind = ObjectKind(self.kind)
        self.priority = Priority(self.priority)
        self.attributes = {
            AttributeKind(k): _freeze_value(v) for k, v in self.attributes.items()
        }

    def key(self) -> IdentityKey:
        return identity_key(self)

    def with_attribute(self, kind: AttributeKind, value) -> "ProcessObject":
        attrs = dict(self.attributes)
        if value is None:
            attrs.pop(AttributeKind(kind), None)
        else:
            attrs[AttributeKind(kind)] = _freeze_value(value)
        return replace(self, attributes=attrs)


def identity_key(obj: ProcessObject) -> IdentityKey:
    """Identity of an object across variants. Raises for unnameable objects."""
    return IdentityKey.of(obj.kind, obj.name)


@dataclass(frozen=True)
class DataDependency:
    """A data flow between two artifacts or parameters, with the role owning the target."""

    from_artifact: str
    to_artifact: str
    owner_of_to: str

    def __post_init__(self):
        if self.from_artifact == self.to_artifact:
            raise InvalidObjectError(
                f"data dependency from {self.from_artifact!r} to itself is meaningless"
            )


@dataclass
class ProcessModel:
    """A process variant: objects, directly-precedes edges, containment, context."""

    id: str
    objects: tuple = ()
    edges: frozenset = frozenset()
    containment: dict = field(default_factory=dict)  # child id -> parent id
    meta_model: MetaModel = field(default_factory=MetaModel.full)
    abstraction_index: int = 1
    characteristics: dict = field(default_factory=dict)
    refinement_links: tuple = ()

    def __post_init__(self):
        self.objects = tuple(self.objects)
        self.edges = frozenset((str(a), str(b)) for a, b in self.edges)
        self.containment = {str(c): str(p) for c, p in self.containment.items()}
        self.refinement_links = tuple(self.refinement_links)

    # -- lookup helpers ---------------------------------------------------

    def object_by_id(self) -> dict:
        return {obj.id: obj for obj in self.objects}

    def get(self, object_id: str) -> ProcessObject | None:
        for obj in self.objects:
            if obj.id == object_id:
                return obj
        return None

    def by_key(self) -> dict:
        """Map IdentityKey -> object, skipping unnameable objects."""
        index = {}
        for obj in self.objects:
            if normalize_name(obj.name):
                index[obj.key()] = obj
        return index

    def key_set(self) -> frozenset:
        return frozenset(self.by_key())

    def objects_of_kind(self, kind: ObjectKind) -> tuple:
        return tuple(obj for obj in self.objects if obj.kind == kind)

    def edge_keys(self) -> frozenset:
        """Edges lifted to identity-key pairs; unresolvable endpoints are skipped."""
        ids = self.object_by_id()
        pairs = set()
        for a, b in self.edges:
            if a in ids and b in ids and normalize_name(ids[a].name) and normalize_name(ids[b].name):
                pairs.add((ids[a].key(), ids[b].key()))
        return frozenset(pairs)

    def containment_keys(self) -> dict:
        ids = self.object_by_id()
        mapping = {}
        for child, parent in self.containment.items():
            if child in ids and parent in ids:
                mapping[ids[child].key()] = ids[parent].key()
        return mapping

    def parent_of(self, object_id: str) -> str | None:
        return self.containment.get(object_id)

    def children_of(self, object_id: str) -> tuple:
        return tuple(c for c, p in self.containment.items() if p == object_id)


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    object_id: str | None = None


# Allowed containment parents per child kind.
_PARENT_KINDS = {
    ObjectKind.MILESTONE: (),
    ObjectKind.PHASE: (ObjectKind.MILESTONE,),
    ObjectKind.TASK: (ObjectKind.PHASE, ObjectKind.MILESTONE, ObjectKind.TASK),
}


def validate_model(model: ProcessModel) -> list:
    """Check every structural invariant; violations are data, never exceptions."""
    violations = []

    seen_ids = set()
    for obj in model.objects:
        if obj.id in seen_ids:
            violations.append(
                Violation("duplicate-id", f"object id {obj.id!r} occurs more than once", obj.id)
            )
        seen_ids.add(obj.id)

    seen_keys = {}
    for obj in model.objects:
        if not normalize_name(obj.name):
            violations.append(Violation("empty-name", f"object {obj.id!r} has an empty name", obj.id))
            continue
        key = obj.key()
        if key in seen_keys:
            violations.append(
                Violation(
                    "duplicate-key",
                    f"objects {seen_keys[key]!r} and {obj.id!r} share identity {key}",
                    obj.id,
                )
            )
        else:
            seen_keys[key] = obj.id

    for obj in model.objects:
        for kind, value in obj.attributes.items():
            if kind not in model.meta_model:
                violations.append(
                    Violation(
                        "attribute-kind-disabled",
                        f"object {obj.id!r} carries {kind.value!r}, which the meta model does not enable",
                        obj.id,
                    )
                )
            if kind is AttributeKind.DELIVERABLE_MATURITY:
                lo, hi = MATURITY_RANGE
                if not isinstance(value, int) or isinstance(value, bool) or not lo <= value <= hi:
                    violations.append(
                        Violation(
                            "maturity-range",
                            f"object {obj.id!r} maturity {value!r} is not an integer in {lo}..{hi}",
                            obj.id,
                        )
                    )
        if obj.kind is ObjectKind.MILESTONE:
            for extra in MILESTONE_EXTRAS:
                if extra in model.meta_model and extra not in obj.attributes:
                    violations.append(
                        Violation(
                            "milestone-missing-extra",
                            f"milestone {obj.id!r} lacks {extra.value!r}",
                            obj.id,
                        )
                    )

    ids = model.object_by_id()
    for a, b in sorted(model.edges):
        for endpoint in (a, b):
            if endpoint not in ids:
                violations.append(
                    Violation("dangling-edge", f"edge ({a!r}, {b!r}) references missing id {endpoint!r}", endpoint)
                )

    for child, parent in sorted(model.containment.items()):
        if child not in ids:
            violations.append(
                Violation("dangling-containment", f"containment child {child!r} does not exist", child)
            )
        if parent not in ids:
            violations.append(
                Violation("dangling-containment", f"containment parent {parent!r} does not exist", parent)
            )
        if child in ids and parent in ids:
            allowed = _PARENT_KINDS[ids[child].kind]
            if ids[parent].kind not in allowed:
                violations.append(
                    Violation(
                        "containment-kind",
                        f"{ids[child].kind.value} {child!r} cannot be contained in {ids[parent].kind.value} {parent!r}",
                        child,
                    )
                )

    for start in sorted(model.containment):
        seen = []
        node = start
        while node in model.containment:
            if node in seen:
                cycle = seen[seen.index(node):]
                if start == min(cycle):  # report each cycle once
                    violations.append(
                        Violation(
                            "containment-cycle",
                            "containment parent chain loops: " + " -> ".join(cycle + [node]),
                            start,
                        )
                    )
                break
            seen.append(node)
            node = model.containment[node]

    if model.abstraction_index < 1:
        violations.append(
            Violation("abstraction-index", f"abstraction index {model.abstraction_index} must be >= 1")
        )

    return violations


def require_valid(model: ProcessModel, context: str = "model") -> None:
    """Raise a ProcessError listing all violations when the model is not valid."""
    violations = validate_model(model)
    if violations:
        lines = "; ".join(f"[{v.code}] {v.message}" for v in violations)
        raise ProcessError(f"{context} {model.id!r} is not valid: {lines}")


def models_equivalent(a: ProcessModel, b: ProcessModel, include_metadata: bool = True) -> bool:
    """Field-for-field equality under identity-key matching (object ids are opaque)."""
    a_by_key, b_by_key = a.by_key(), b.by_key()
    if set(a_by_key) != set(b_by_key):
        return False
    for key, obj_a in a_by_key.items():
        obj_b = b_by_key[key]
        if obj_a.priority != obj_b.priority or obj_a.attributes != obj_b.attributes:
            return False
    if a.edge_keys() != b.edge_keys():
        return False
    if a.containment_keys() != b.containment_keys():
        return False
    if include_metadata:
        if a.id != b.id or a.abstraction_index != b.abstraction_index:
            return False
        if a.characteristics != b.characteristics:
            return False
        if a.meta_model.kinds != b.meta_model.kinds:
            return False
        if a.refinement_links != b.refinement_links:
            return False
    return True


def descendants(model: ProcessModel, object_id: str) -> set:
    """All ids transitively contained in object_id."""
    found = set()
    frontier = [object_id]
    while frontier:
        node = frontier.pop()
        for child in model.children_of(node):
            if child not in found:
                found.add(child)
                frontier.append(child)
    return found
