"""Bottom-up process reflection: activity logs, discovery, delta analysis, refinement.

The performed process is mined from timestamped start/complete events using
the directly-follows relation over each case's completed events.  Comparing
the footprints of the prescriptive and the performed model yields
ordering-relation conflicts; object and edge set differences yield the
missing/extra parts of the delta.  Refinement replays accepted decisions
onto the prescriptive model under the minimal-requirement guard, writing an
append-only justification ledger.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum

from .model import (
    ApprovalRequiredError,
    AttributeKind,
    IdentityKey,
    MAX_ABSTRACTION_INDEX,
    MetaModel,
    NotFoundError,
    ObjectKind,
    ParseError,
    Priority,
    ProcessError,
    ProcessModel,
    ProcessObject,
    normalize_name,
    require_valid,
    validate_model,
)


class EventStatus(str, Enum):
    STARTED = "started"
    COMPLETED = "completed"


def parse_timestamp(text: str) -> datetime:
    """ISO-8601 instant; a trailing Z and naive stamps are normalized to UTC."""
    raw = text.strip()
    if raw.endswith(("Z", "z")):
        raw = raw[:-1] + "+00:00"
    try:
        stamp = datetime.fromisoformat(raw)
    except ValueError as exc:
        raise ParseError(f"invalid timestamp {text!r}: {exc}", field_name="timestamp")
    if stamp.tzinfo is None:
        stamp = stamp.replace(tzinfo=timezone.utc)
    return stamp


@dataclass
class Event:
    timestamp: datetime
    case_id: str
    activity: str
    status: EventStatus
    performer: str
    group: str | None = None
    line: int | None = field(default=None, compare=False)

    def __post_init__(self):
        self.status = EventStatus(self.status)
        if not self.activity:
            raise ParseError("event activity must not be empty", line=self.line, field_name="activity")


@dataclass
class EventLog:
    """Events in stable timestamp order."""

    events: tuple = ()

    def __post_init__(self):
        self.events = tuple(sorted(self.events, key=lambda e: e.timestamp))

    def cases(self) -> dict:
        """case_id -> events of that case, in log order."""
        grouped = {}
        for event in self.events:
            grouped.setdefault(event.case_id, []).append(event)
        return grouped

    def completed_traces(self) -> dict:
        """case_id -> time-ordered list of completed activity names."""
        return {
            case: [e.activity for e in events if e.status is EventStatus.COMPLETED]
            for case, events in self.cases().items()
        }

    def unmatched_warnings(self) -> list:
        """Completed events with no earlier unmatched started event (kept, not dropped)."""
        warnings = []
        open_counts = {}
        for event in self.events:
            slot = (event.case_id, event.activity, event.performer)
            if event.status is EventStatus.STARTED:
                open_counts[slot] = open_counts.get(slot, 0) + 1
            else:
                if open_counts.get(slot, 0) > 0:
                    open_counts[slot] -= 1
                else:
                    warnings.append(
                        f"completed event without a prior started event: "
                        f"case {event.case_id!r}, activity {event.activity!r}, performer {event.performer!r}"
                    )
        return warnings


LOG_FIELDS = ("timestamp", "case", "activity", "status", "performer", "group")


def parse_event_log(text: str) -> EventLog:
    """Parse the canonical line format TIMESTAMP;CASE;ACTIVITY;STATUS;PERFORMER[;GROUP]."""
    events = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(";")]
        if len(parts) not in (5, 6):
            raise ParseError(
                f"expected 5 or 6 semicolon-separated fields, got {len(parts)}",
                line=number,
            )
        timestamp, case_id, activity, status, performer = parts[:5]
        group = parts[5] if len(parts) == 6 else None
        try:
            stamp = parse_timestamp(timestamp)
        except ParseError as exc:
            raise ParseError(str(exc), line=number, field_name="timestamp") from None
        if status not in (EventStatus.STARTED.value, EventStatus.COMPLETED.value):
            raise ParseError(
                f"unknown status token {status!r} (expected 'started' or 'completed')",
                line=number,
                field_name="status",
            )
        if not activity:
            raise ParseError("activity must not be empty", line=number, field_name="activity")
        events.append(
            Event(
                timestamp=stamp,
                case_id=case_id,
                activity=activity,
                status=EventStatus(status),
                performer=performer,
                group=group,
                line=number,
            )
        )
    return EventLog(tuple(events))


def export_log_xml(log: EventLog) -> str:
    """Serialize to the interchange document: <event-log><event .../></event-log>."""
    root = ET.Element("event-log")
    for event in log.events:
        attrs = {
            "timestamp": event.timestamp.isoformat(),
            "case": event.case_id,
            "activity": event.activity,
            "status": event.status.value,
            "performer": event.performer,
        }
        if event.group is not None:
            attrs["group"] = event.group
        ET.SubElement(root, "event", attrs)
    ET.indent(root)
    return ET.tostring(root, encoding="unicode", xml_declaration=True)


def import_log_xml(text: str) -> EventLog:
    """Companion import; parse(export(log)) round-trips."""
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise ParseError(f"not well-formed XML: {exc}")
    if root.tag != "event-log":
        raise ParseError(f"unexpected root element {root.tag!r}, expected 'event-log'")
    events = []
    for number, element in enumerate(root, start=1):
        if element.tag != "event":
            raise ParseError(f"unexpected element {element.tag!r}", line=number)
        missing = [name for name in LOG_FIELDS[:5] if name not in element.attrib]
        if missing:
            raise ParseError(f"event lacks attributes {missing}", line=number)
        events.append(
            Event(
                timestamp=parse_timestamp(element.attrib["timestamp"]),
                case_id=element.attrib["case"],
                activity=element.attrib["activity"],
                status=EventStatus(element.attrib["status"]),
                performer=element.attrib["performer"],
                group=element.attrib.get("group"),
            )
        )
    return EventLog(tuple(events))


def discover_process(log: EventLog, model_id: str = "performed") -> ProcessModel:
    """Mine the performed process: one task per activity, directly-follows edges.

    (a, b) is an edge iff some case completes a immediately before b among
    that case's completed events in timestamp order.
    """
    traces = log.completed_traces()
    activities: list = []
    performers: dict = {}
    for events in log.cases().values():
        for event in events:
            if event.status is EventStatus.COMPLETED:
                if event.activity not in activities:
                    activities.append(event.activity)
                performers.setdefault(event.activity, set()).add(event.performer)

    objects = tuple(
        ProcessObject(
            id=name,
            kind=ObjectKind.TASK,
            name=name,
            priority=Priority.OPTIONAL,
            attributes={AttributeKind.ROLES: tuple(sorted(performers[name]))},
        )
        for name in activities
    )
    edges = set()
    for trace in traces.values():
        for a, b in zip(trace, trace[1:]):
            edges.add((a, b))
    return ProcessModel(
        id=model_id,
        objects=objects,
        edges=frozenset(edges),
        meta_model=MetaModel(
            {AttributeKind.ACTIVITIES, AttributeKind.ACTIVITY_PRIORITY, AttributeKind.ROLES}
        ),
        abstraction_index=MAX_ABSTRACTION_INDEX,
    )


class Relation(str, Enum):
    PRECEDES = "precedes"
    FOLLOWS = "follows"
    PARALLEL = "parallel"
    NEVER = "never-adjacent"


@dataclass
class FootprintMatrix:
    """Pairwise classification of activities from the directly-follows pairs."""

    activities: tuple
    cells: dict  # (a, b) -> Relation

    def relation(self, a, b) -> Relation:
        return self.cells[(a, b)]


def footprint(edges, activities) -> FootprintMatrix:
    activities = tuple(activities)
    known = set(activities)
    edge_set = set(edges)
    for a, b in edge_set:
        if a not in known or b not in known:
            raise ProcessError(f"edge ({a!r}, {b!r}) references an activity outside the matrix")
    cells = {}
    for a in activities:
        for b in activities:
            forward = (a, b) in edge_set
            backward = (b, a) in edge_set
            if forward and backward:
                cells[(a, b)] = Relation.PARALLEL
            elif forward:
                cells[(a, b)] = Relation.PRECEDES
            elif backward:
                cells[(a, b)] = Relation.FOLLOWS
            else:
                cells[(a, b)] = Relation.NEVER
    return FootprintMatrix(activities, cells)


@dataclass(frozen=True)
class RelationConflict:
    a: IdentityKey
    b: IdentityKey
    prescriptive: Relation
    performed: Relation


@dataclass
class ProcessDelta:
    """Differences between two models: set level, ordering level, and support counts.

    Also carries the per-variant attribute overrides when used for
    variant-versus-core diffs.
    """

    missing_objects: frozenset = frozenset()  # prescribed but not performed
    extra_objects: frozenset = frozenset()    # performed but not prescribed
    missing_edges: frozenset = frozenset()
    extra_edges: frozenset = frozenset()
    relation_conflicts: tuple = ()
    frequency: dict = field(default_factory=dict)  # activity name -> case support
    case_count: int = 0
    attribute_overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        self.missing_objects = frozenset(self.missing_objects)
        self.extra_objects = frozenset(self.extra_objects)
        self.missing_edges = frozenset(self.missing_edges)
        self.extra_edges = frozenset(self.extra_edges)
        self.relation_conflicts = tuple(self.relation_conflicts)
        overlap = self.missing_objects & self.extra_objects
        if overlap:
            raise ProcessError(f"delta lists {sorted(map(str, overlap))} as both missing and extra")

    @property
    def is_empty(self) -> bool:
        return not (
            self.missing_objects
            or self.extra_objects
            or self.missing_edges
            or self.extra_edges
            or self.relation_conflicts
            or self.attribute_overrides
        )


def _task_keys(model: ProcessModel) -> frozenset:
    return frozenset(k for k in model.key_set() if k.kind is ObjectKind.TASK)


def _task_edge_keys(model: ProcessModel) -> frozenset:
    return frozenset(
        (a, b)
        for a, b in model.edge_keys()
        if a.kind is ObjectKind.TASK and b.kind is ObjectKind.TASK
    )


def compute_delta(prescriptive: ProcessModel, performed: ProcessModel, log: EventLog) -> ProcessDelta:
    """Delta analysis over activities: set differences, footprint conflicts, case support.

    Only task objects and task-to-task edges take part; the performed model
    never contains milestones or phases, so comparing other kinds would mark
    every prescriptive milestone as missing.
    """
    require_valid(prescriptive, "prescriptive model")
    require_valid(performed, "performed model")

    p_keys, f_keys = _task_keys(prescriptive), _task_keys(performed)
    p_edges, f_edges = _task_edge_keys(prescriptive), _task_edge_keys(performed)

    shared = sorted(p_keys & f_keys)
    p_matrix = footprint({e for e in p_edges if e[0] in shared and e[1] in shared}, shared)
    f_matrix = footprint({e for e in f_edges if e[0] in shared and e[1] in shared}, shared)
    conflicts = []
    for i, a in enumerate(shared):
        for b in shared[i:]:
            if p_matrix.relation(a, b) != f_matrix.relation(a, b):
                conflicts.append(
                    RelationConflict(a, b, p_matrix.relation(a, b), f_matrix.relation(a, b))
                )

    frequency = {}
    for case, trace in log.completed_traces().items():
        for activity in set(trace):
            frequency[activity] = frequency.get(activity, 0) + 1

    return ProcessDelta(
        missing_objects=p_keys - f_keys,
        extra_objects=f_keys - p_keys,
        missing_edges=p_edges - f_edges,
        extra_edges=f_edges - p_edges,
        relation_conflicts=tuple(conflicts),
        frequency=frequency,
        case_count=len(log.cases()),
    )


class DecisionAction(str, Enum):
    ADD = "add"
    REMOVE = "remove"
    KEEP = "keep"


@dataclass(frozen=True)
class Approval:
    approver: str
    justification: str

    def __post_init__(self):
        if not self.approver.strip():
            raise InvalidApproval("approval needs an approver role")
        if not self.justification.strip():
            raise InvalidApproval("approval needs a non-empty justification")


class InvalidApproval(ProcessError):
    code = "invalid-approval"


@dataclass(frozen=True)
class RefinementDecision:
    target: IdentityKey | tuple  # object key, or (key, key) edge pair
    action: DecisionAction
    approval: Approval | None = None

    @property
    def is_edge(self) -> bool:
        return isinstance(self.target, tuple)


@dataclass(frozen=True)
class LedgerEntry:
    timestamp: datetime
    actor: str
    action: str
    target: str
    justification: str


class JustificationLedger:
    """Append-only audit trail of guarded removals and refinement decisions."""

    def __init__(self, entries=()):
        self._entries = list(entries)

    def append(self, entry: LedgerEntry) -> None:
        if not entry.justification.strip():
            raise InvalidApproval("ledger entries require a non-empty justification")
        self._entries.append(entry)

    @property
    def entries(self) -> tuple:
        return tuple(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def entries_for(self, target) -> tuple:
        wanted = str(target)
        return tuple(e for e in self._entries if e.target == wanted)


def record_removal(
    ledger: JustificationLedger | None,
    key: IdentityKey,
    approval: Approval,
    at: datetime | None = None,
) -> None:
    if ledger is None:
        return
    ledger.append(
        LedgerEntry(
            timestamp=at or datetime.now(timezone.utc),
            actor=approval.approver,
            action="remove-object",
            target=str(key),
            justification=approval.justification,
        )
    )


def suggest_additions(delta: ProcessDelta, threshold: float = 0.5) -> frozenset:
    """Extra activities whose case support reaches the threshold. Suggestions only."""
    if not 0.0 <= threshold <= 1.0:
        raise ProcessError(f"threshold {threshold} outside [0, 1]")
    if delta.case_count == 0:
        return frozenset()
    support_by_key: dict = {}
    for name, count in delta.frequency.items():
        key = IdentityKey.of(ObjectKind.TASK, name)
        support_by_key[key] = max(support_by_key.get(key, 0), count)
    return frozenset(
        key
        for key in delta.extra_objects
        if support_by_key.get(key, 0) / delta.case_count >= threshold
    )


def _fresh_id(taken: set, base: str) -> str:
    candidate = base
    n = 1
    while candidate in taken:
        n += 1
        candidate = f"{base}~{n}"
    taken.add(candidate)
    return candidate


def refine_process(
    prescriptive: ProcessModel,
    delta: ProcessDelta,
    decisions,
    threshold: float = 0.5,
    ledger: JustificationLedger | None = None,
    at: datetime | None = None,
):
    """Apply refinement decisions to the prescriptive model.

    Adds insert tasks/edges recorded as extra in the delta; removes delete
    missing objects/edges, requiring approval plus justification for
    minimal-requirement targets.  Returns the new model and the ledger.
    """
    require_valid(prescriptive, "prescriptive model")
    if not 0.0 <= threshold <= 1.0:
        raise ProcessError(f"threshold {threshold} outside [0, 1]")
    ledger = ledger if ledger is not None else JustificationLedger()

    for decision in decisions:
        if decision.is_edge:
            pool = delta.extra_edges if decision.action is DecisionAction.ADD else delta.missing_edges
            if decision.action is DecisionAction.KEEP:
                pool = delta.extra_edges | delta.missing_edges
        else:
            pool = delta.extra_objects if decision.action is DecisionAction.ADD else delta.missing_objects
            if decision.action is DecisionAction.KEEP:
                pool = delta.extra_objects | delta.missing_objects
        if decision.target not in pool:
            raise ProcessError(
                f"decision targets {decision.target}, which the delta does not list for {decision.action.value!r}"
            )

    by_key = prescriptive.by_key()
    objects = list(prescriptive.objects)
    edges = set(prescriptive.edges)
    containment = dict(prescriptive.containment)
    taken_ids = {obj.id for obj in objects}

    # object additions first so edge additions can resolve their endpoints
    for decision in decisions:
        if decision.action is DecisionAction.ADD and not decision.is_edge:
            if decision.target in {o.key() for o in objects if normalize_name(o.name)}:
                continue
            new = ProcessObject(
                id=_fresh_id(taken_ids, decision.target.name),
                kind=decision.target.kind,
                name=decision.target.name,
                priority=Priority.OPTIONAL,
            )
            objects.append(new)

    def resolve(key: IdentityKey) -> ProcessObject:
        for obj in objects:
            if normalize_name(obj.name) and obj.key() == key:
                return obj
        raise NotFoundError(f"no object with identity {key}")

    for decision in decisions:
        if decision.action is DecisionAction.REMOVE and not decision.is_edge:
            target = by_key.get(decision.target)
            if target is None:
                continue  # already absent
            if target.priority is Priority.MINIMAL_REQUIREMENT:
                if decision.approval is None:
                    raise ApprovalRequiredError(
                        f"removing minimal-requirement object {decision.target} requires approval "
                        "with a justification",
                        keys=(decision.target,),
                    )
                record_removal(ledger, decision.target, decision.approval, at)
            objects = [o for o in objects if o.id != target.id]
            edges = {(a, b) for a, b in edges if target.id not in (a, b)}
            parent = containment.get(target.id)
            containment.pop(target.id, None)
            for child, par in list(containment.items()):
                if par == target.id:
                    if parent is None:
                        containment.pop(child)
                    else:
                        containment[child] = parent

    ids_by_key = {o.key(): o.id for o in objects if normalize_name(o.name)}
    for decision in decisions:
        if decision.is_edge:
            a_key, b_key = decision.target
            if decision.action is DecisionAction.ADD:
                edges.add((resolve(a_key).id, resolve(b_key).id))
            elif decision.action is DecisionAction.REMOVE:
                a_id, b_id = ids_by_key.get(a_key), ids_by_key.get(b_key)
                if a_id is not None and b_id is not None:
                    edges.discard((a_id, b_id))

    refined = ProcessModel(
        id=prescriptive.id,
        objects=tuple(objects),
        edges=frozenset(edges),
        containment=containment,
        meta_model=prescriptive.meta_model,
        abstraction_index=prescriptive.abstraction_index,
        characteristics=dict(prescriptive.characteristics),
        refinement_links=prescriptive.refinement_links,
    )
    require_valid(refined, "refined model")
    return refined, ledger


@dataclass
class ReplayReport:
    verdicts: dict  # case_id -> bool
    reasons: dict   # case_id -> str for rejected cases

    @property
    def safe(self) -> bool:
        return all(self.verdicts.values())


def check_replayability(changed: ProcessModel, active_prefixes) -> ReplayReport:
    """A case accepts iff its executed prefix replays on the changed model.

    Every completed activity must exist as a task and every adjacent pair of
    the prefix must be an edge; the change is safe iff all cases accept.
    """
    task_keys = _task_keys(changed)
    edge_keys = _task_edge_keys(changed)
    verdicts, reasons = {}, {}
    for case_id, prefix in active_prefixes:
        verdicts[case_id] = True
        for activity in prefix:
            key = IdentityKey.of(ObjectKind.TASK, activity)
            if key not in task_keys:
                verdicts[case_id] = False
                reasons[case_id] = f"activity {activity!r} no longer exists"
                break
        if not verdicts[case_id]:
            continue
        for a, b in zip(prefix, prefix[1:]):
            pair = (IdentityKey.of(ObjectKind.TASK, a), IdentityKey.of(ObjectKind.TASK, b))
            if pair not in edge_keys:
                verdicts[case_id] = False
                reasons[case_id] = f"executed step {a!r} -> {b!r} is no longer an edge"
                break
    return ReplayReport(verdicts, reasons)
