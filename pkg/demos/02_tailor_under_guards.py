#!/usr/bin/env python3
"""Walkthrough: the adapt-versus-build gate and guarded tailoring.

Run from the repository root:  python demos/02_tailor_under_guards.py
"""

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from procline.model import (
    ApprovalRequiredError,
    AttributeKind,
    IdentityKey,
    ObjectKind,
)
from procline.reflection import Approval, JustificationLedger
from procline.serialize import load_base
from procline.tailoring import (
    AddObject,
    RemoveObject,
    adapt_meta_model,
    apply_fixes,
    apply_tailoring,
    check_consistency,
    estimate_roi,
)
from procline.model import ProcessObject

base = load_base(ROOT / "fixtures" / "process_base.json")
selected = base.get("v-standard")

# 1. is adapting cheaper than building from scratch?
target_sketch = base.get("v-safety")  # imagine this is roughly what we want
estimate = estimate_roi(selected, target_sketch)
print(f"adapt effort {estimate.adapt_effort}, build effort {estimate.build_effort}, "
      f"roi {estimate.roi:.2f} -> {estimate.decision.value}")

# 2. adapt the meta model: this project tracks no delivery times
working = adapt_meta_model(selected, remove={AttributeKind.DELIVERY_TIME})
print(f"meta model now has {len(working.meta_model.kinds)} attribute kinds")

# 3. a minimal-requirement object will not go quietly
ledger = JustificationLedger()
guarded = IdentityKey.of(ObjectKind.TASK, "Requirements review")
try:
    apply_tailoring(working, RemoveObject(key=guarded), ledger=ledger)
except ApprovalRequiredError as err:
    print(f"guard refused the removal: {err}")

approval = Approval(approver="project-manager", justification="review moved to the customer side")
working = apply_tailoring(working, RemoveObject(key=guarded, approval=approval), ledger=ledger)
print(f"removal approved and recorded; ledger now has {len(ledger)} entry")

# 4. add a task the project needs
working = apply_tailoring(
    working,
    AddObject(
        obj=ProcessObject(id="t-int", kind=ObjectKind.TASK, name="Integration"),
        parent=IdentityKey.of(ObjectKind.PHASE, "Construction"),
    ),
)

# 5. the consistency check notices the missing minimal requirement and heals it
violations = check_consistency(selected, working)
print(f"consistency violations: {[str(v.missing_key) for v in violations]}")
healed = apply_fixes(working, violations, selected)
print(f"after fixes: {check_consistency(selected, healed)}")
for entry in ledger.entries:
    print(f"ledger: {entry.actor} removed {entry.target}: {entry.justification!r}")
