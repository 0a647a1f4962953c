"""procline: acquire a project-specific development process from a process line.

Top-down: score and select variants, build the line, cut it at an
abstraction level, and tailor the chosen variant under minimal-requirement
guards.  Bottom-up: parse activity logs, discover the performed process,
compare it with the prescriptive one, and refine under justification gating.
"""

from .model import (
    AttributeKind,
    DataDependency,
    IdentityKey,
    MetaModel,
    ObjectKind,
    Priority,
    ProcessError,
    ProcessModel,
    ProcessObject,
    identity_key,
    models_equivalent,
    validate_model,
)
from .line import (
    CutProcessLine,
    ProcessLine,
    VariantDelta,
    build_process_line,
    cut_at_abstraction,
    diff_to_core,
    reconstruct_variant,
)
from .selection import ProjectCharacteristic, SelectionState, VariantScore, mark_selected, score_variant, select_top_k
from .tailoring import (
    AddEdge,
    AddObject,
    MilestoneSpec,
    PlanStep,
    RemoveEdge,
    RemoveObject,
    RoiEstimate,
    SetAttribute,
    TailoringPlan,
    TaskSpec,
    adapt_meta_model,
    apply_fixes,
    apply_tailoring,
    build_process,
    check_consistency,
    estimate_roi,
    standard_tailoring,
)
from .reflection import (
    Approval,
    Event,
    EventLog,
    FootprintMatrix,
    JustificationLedger,
    ProcessDelta,
    RefinementDecision,
    check_replayability,
    compute_delta,
    discover_process,
    export_log_xml,
    footprint,
    import_log_xml,
    parse_event_log,
    refine_process,
    suggest_additions,
)
from .analytics import (
    EffortRecord,
    EffortTable,
    WeekBucket,
    aggregate_effort,
    compare_groups,
    derive_effort_records,
    verify_printed_totals,
)
from .interfaces import Phase, ProcessBase, Session, SessionAction, new_session, replay, session_apply

__version__ = "0.1.0"
