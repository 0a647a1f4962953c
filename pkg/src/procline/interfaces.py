"""The tailoring-session state machine and the process base container.

Sessions are event-sourced: state is a pure function of the base plus the
transcript, so replaying a persisted transcript reproduces the session
exactly, including the justification ledger.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum

from .model import (
    NotFoundError,
    ParseError,
    PhaseError,
    ProcessError,
    ProcessModel,
    require_valid,
)
from .line import CutProcessLine, ProcessLine, build_process_line, cut_at_abstraction, reconstruct_variant
from .reflection import (
    EventLog,
    JustificationLedger,
    compute_delta,
    discover_process,
    parse_event_log,
    parse_timestamp,
    refine_process,
    suggest_additions,
)
from .selection import SelectionState, mark_selected, select_top_k
from .tailoring import adapt_meta_model, apply_fixes, apply_tailoring, check_consistency
from . import serialize


@dataclass
class ProcessBase:
    """All known process variants, each one valid and uniquely named."""

    variants: tuple = ()

    def __post_init__(self):
        self.variants = tuple(self.variants)
        seen = set()
        for variant in self.variants:
            if variant.id in seen:
                raise ProcessError(f"process base has duplicate variant id {variant.id!r}")
            seen.add(variant.id)
            require_valid(variant, "base variant")

    def get(self, variant_id: str) -> ProcessModel:
        for variant in self.variants:
            if variant.id == variant_id:
                return variant
        raise NotFoundError(f"process base has no variant {variant_id!r}")


class Phase(str, Enum):
    SELECTING = "selecting"
    CUTTING = "cutting"
    TAILORING = "tailoring"
    EXECUTING = "executing"
    REFLECTING = "reflecting"
    DONE = "done"


@dataclass(frozen=True)
class SessionAction:
    type: str
    payload: dict = field(default_factory=dict)
    at: datetime = field(default_factory=lambda: datetime.now(timezone.utc))


@dataclass
class Session:
    id: str
    base: ProcessBase
    phase: Phase = Phase.SELECTING
    transcript: tuple = ()
    scores: tuple = ()
    line: ProcessLine | None = None
    cut: CutProcessLine | None = None
    selection: SelectionState | None = None
    selected_model: ProcessModel | None = None     # snapshot the guard checks against
    working_model: ProcessModel | None = None
    consistency_violations: tuple = ()
    log_lines: tuple = ()
    event_log: EventLog | None = None
    performed_model: ProcessModel | None = None
    delta = None
    ledger: JustificationLedger = field(default_factory=JustificationLedger)


def new_session(session_id: str, base: ProcessBase) -> Session:
    return Session(id=session_id, base=base)


# Which action types are legal in which phase.
_PHASE_ACTIONS = {
    "select_top_k": (Phase.SELECTING,),
    "cut": (Phase.CUTTING,),
    "mark_selected": (Phase.CUTTING, Phase.TAILORING),
    "reopen_selection": (Phase.TAILORING,),
    "adapt_meta_model": (Phase.TAILORING,),
    "tailor": (Phase.TAILORING,),
    "check_consistency": (Phase.TAILORING,),
    "apply_fixes": (Phase.TAILORING,),
    "finish_tailoring": (Phase.TAILORING,),
    "append_log": (Phase.EXECUTING,),
    "finish_execution": (Phase.EXECUTING,),
    "discover": (Phase.REFLECTING,),
    "compute_delta": (Phase.REFLECTING,),
    "refine": (Phase.REFLECTING,),
    "finish": (Phase.REFLECTING,),
}


def _clone(session: Session) -> Session:
    clone = Session(
        id=session.id,
        base=session.base,
        phase=session.phase,
        transcript=session.transcript,
        scores=session.scores,
        line=session.line,
        cut=session.cut,
        selection=session.selection,
        selected_model=session.selected_model,
        working_model=session.working_model,
        consistency_violations=session.consistency_violations,
        log_lines=session.log_lines,
        event_log=session.event_log,
        performed_model=session.performed_model,
        ledger=JustificationLedger(session.ledger.entries),
    )
    clone.delta = session.delta
    return clone


def session_apply(session: Session, action: SessionAction) -> Session:
    """Apply one action; illegal phase/action combinations leave the session untouched."""
    allowed = _PHASE_ACTIONS.get(action.type)
    if allowed is None:
        raise ProcessError(f"unknown session action {action.type!r}")
    if session.phase not in allowed:
        raise PhaseError(
            f"action {action.type!r} is not legal in phase {session.phase.value!r}"
        )

    new = _clone(session)
    payload = action.payload

    if action.type == "select_top_k":
        query = serialize.characteristics_from_list(payload.get("characteristics", []))
        k = payload.get("k", 1)
        scores = select_top_k(session.base.variants, query, k)
        chosen = [session.base.get(s.variant_id) for s in scores]
        new.scores = tuple(scores)
        new.line = build_process_line(chosen)
        new.phase = Phase.CUTTING

    elif action.type == "cut":
        new.cut = cut_at_abstraction(session.line, payload["level"])
        new.selection = SelectionState(cut=new.cut)

    elif action.type == "mark_selected":
        if session.selection is None:
            raise PhaseError("cut the line before selecting a variant")
        new.selection = mark_selected(session.selection, payload["variant_id"])
        model = reconstruct_variant(session.line, payload["variant_id"])
        new.selected_model = model
        new.working_model = model
        new.phase = Phase.TAILORING

    elif action.type == "reopen_selection":
        new.phase = Phase.SELECTING
        new.cut = None
        new.selection = None
        new.selected_model = None
        new.working_model = None

    elif action.type == "adapt_meta_model":
        new.working_model = adapt_meta_model(
            session.working_model,
            add=payload.get("add", []),
            remove=payload.get("remove", []),
        )

    elif action.type == "tailor":
        tailoring_action = serialize.action_from_dict(payload["action"])
        new.working_model = apply_tailoring(
            session.working_model, tailoring_action, ledger=new.ledger, at=action.at
        )

    elif action.type == "check_consistency":
        new.consistency_violations = tuple(
            check_consistency(session.selected_model, session.working_model)
        )

    elif action.type == "apply_fixes":
        new.working_model = apply_fixes(
            session.working_model, session.consistency_violations, session.selected_model
        )
        new.consistency_violations = ()

    elif action.type == "finish_tailoring":
        if session.working_model is None:
            raise PhaseError("nothing was tailored yet")
        new.phase = Phase.EXECUTING

    elif action.type == "append_log":
        new.log_lines = session.log_lines + tuple(payload["text"].splitlines())

    elif action.type == "finish_execution":
        new.event_log = parse_event_log("\n".join(new.log_lines))
        new.phase = Phase.REFLECTING

    elif action.type == "discover":
        new.performed_model = discover_process(session.event_log)

    elif action.type == "compute_delta":
        if session.performed_model is None:
            raise PhaseError("run discovery before the delta analysis")
        new.delta = compute_delta(session.working_model, session.performed_model, session.event_log)

    elif action.type == "refine":
        if session.delta is None:
            raise PhaseError("compute the delta before refining")
        decisions = [
            serialize.decision_from_dict(d, f"decisions[{i}]")
            for i, d in enumerate(payload.get("decisions", []))
        ]
        refined, _ = refine_process(
            session.working_model,
            session.delta,
            decisions,
            threshold=payload.get("theta", 0.5),
            ledger=new.ledger,
            at=action.at,
        )
        new.working_model = refined
        new.delta = compute_delta(refined, session.performed_model, session.event_log)

    elif action.type == "finish":
        new.phase = Phase.DONE

    new.transcript = session.transcript + (action,)
    return new


def replay(session_id: str, base: ProcessBase, transcript) -> Session:
    """Rebuild a session from scratch; the result only depends on base and transcript."""
    session = new_session(session_id, base)
    for action in transcript:
        session = session_apply(session, action)
    return session


# -- persistence ----------------------------------------------------------------


def session_to_dict(session: Session) -> dict:
    return {
        "schema_version": serialize.SCHEMA_VERSION,
        "id": session.id,
        "base": serialize.base_to_dict(session.base),
        "transcript": [
            {"type": a.type, "payload": a.payload, "at": a.at.isoformat()}
            for a in session.transcript
        ],
    }


def session_from_dict(data) -> Session:
    data = serialize._expect_object(
        data, "session", required=("schema_version", "id", "base", "transcript")
    )
    if data["schema_version"] != serialize.SCHEMA_VERSION:
        raise ParseError(
            f"session has schema version {data['schema_version']}, expected {serialize.SCHEMA_VERSION}"
        )
    base = serialize.base_from_dict(data["base"], "session.base")
    transcript = []
    for i, item in enumerate(data["transcript"]):
        item = serialize._expect_object(
            item, f"session.transcript[{i}]", required=("type", "payload", "at")
        )
        transcript.append(
            SessionAction(type=item["type"], payload=item["payload"], at=parse_timestamp(item["at"]))
        )
    return replay(data["id"], base, transcript)


def session_view(session: Session) -> dict:
    """The outward-facing summary the service and CLI report."""
    view = {
        "id": session.id,
        "phase": session.phase.value,
        "transcript_length": len(session.transcript),
        "transcript": [
            {"type": a.type, "payload": a.payload, "at": a.at.isoformat()}
            for a in session.transcript
        ],
        "ledger": serialize.ledger_to_dict(session.ledger),
    }
    if session.scores:
        view["scores"] = [
            {"variant_id": s.variant_id, "score": s.score} for s in session.scores
        ]
    if session.cut is not None:
        view["cut"] = serialize.cut_to_dict(session.cut)
    if session.selection is not None and session.selection.selected_variant_id:
        view["selected_variant_id"] = session.selection.selected_variant_id
    if session.working_model is not None:
        model_view = serialize.model_to_dict(session.working_model)
        for obj, data in zip(session.working_model.objects, model_view["objects"]):
            data["key"] = str(obj.key())  # server-computed identity for action targets
        view["working_model"] = model_view
    if session.consistency_violations:
        view["consistency_violations"] = [
            {"key": str(v.missing_key), "kind": v.kind.value, "source": v.source}
            for v in session.consistency_violations
        ]
    if session.performed_model is not None:
        view["performed_model"] = serialize.model_to_dict(session.performed_model)
    if session.delta is not None:
        view["delta"] = serialize.process_delta_to_dict(session.delta)
        view["suggestions"] = sorted(str(k) for k in suggest_additions(session.delta))
    return view
