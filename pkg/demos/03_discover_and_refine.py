#!/usr/bin/env python3
"""Walkthrough: from an activity log to a refined prescriptive process.

Run from the repository root:  python demos/03_discover_and_refine.py
"""

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from procline.reflection import (
    Approval,
    DecisionAction,
    RefinementDecision,
    check_replayability,
    compute_delta,
    discover_process,
    export_log_xml,
    parse_event_log,
    refine_process,
    suggest_additions,
)
from procline.serialize import load_base

# 1. parse the text log the coordination tool delivered
log_text = (ROOT / "fixtures" / "sample_log.txt").read_text(encoding="utf-8")
log = parse_event_log(log_text)
print(f"parsed {len(log.events)} events over {len(log.cases())} cases")

# 2. the interchange document other tools consume
document = export_log_xml(log)
print(f"xml export: {document.splitlines()[1][:60]} ...")

# 3. mine the performed process
performed = discover_process(log)
print(f"performed process: tasks {sorted(o.name for o in performed.objects)}")
print(f"directly-follows edges: {sorted(performed.edges)}")

# 4. delta against the prescriptive process
prescriptive = load_base(ROOT / "fixtures" / "process_base.json").get("v-standard")
delta = compute_delta(prescriptive, performed, log)
print(f"\nprescribed but never performed: {sorted(str(k) for k in delta.missing_objects)}")
print(f"performed but never prescribed: {sorted(str(k) for k in delta.extra_objects)}")
print(f"suggested additions at theta=0.5: {sorted(str(k) for k in suggest_additions(delta, 0.5))}")

# 5. refine: adopt the new activity, drop one that was never performed
decisions = [
    RefinementDecision(
        target=next(iter(k for k in delta.extra_objects if k.name == "panel tuning")),
        action=DecisionAction.ADD,
    ),
    RefinementDecision(
        target=next(iter(k for k in delta.missing_objects if k.name == "panel development")),
        action=DecisionAction.REMOVE,
        approval=Approval("project-manager", "panel work happens in a support process now"),
    ),
]
refined, ledger = refine_process(prescriptive, delta, decisions)
print(f"\nrefined process has {len(refined.objects)} objects; ledger entries: {len(ledger)}")

# 6. is the change safe for the running cases?
active = [(case, trace) for case, trace in log.completed_traces().items()]
report = check_replayability(refined, active)
print(f"replayability: {report.verdicts} -> change is {'safe' if report.safe else 'NOT safe'}")
