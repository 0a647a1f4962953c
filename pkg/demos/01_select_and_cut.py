#!/usr/bin/env python3
"""Walkthrough: score the process base, build the line, cut it, diff a variant.

Run from the repository root:  python demos/01_select_and_cut.py
"""

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from procline.line import build_process_line, cut_at_abstraction, diff_to_core
from procline.selection import ProjectCharacteristic, select_top_k
from procline.serialize import load_base

base = load_base(ROOT / "fixtures" / "process_base.json")
print(f"process base: {len(base.variants)} variants")
for variant in base.variants:
    print(f"  {variant.id:15s} level {variant.abstraction_index}  {variant.characteristics}")

# 1. prioritize the project characteristics and rank the base
query = [
    ProjectCharacteristic("domain", "automotive", weight=2),
    ProjectCharacteristic("team-size", 8, weight=1, ordinal_range=(2, 20)),
    ProjectCharacteristic("safety-level", "qm", weight=1),
]
print("\nranking against the prioritized characteristics:")
scores = select_top_k(base.variants, query, k=2)
for score in scores:
    print(f"  {score.variant_id:15s} score {score.score:.3f}  {dict(score.contributions)}")

# 2. build the process line for the selected variants
line = build_process_line([base.get(s.variant_id) for s in scores])
print(f"\ncore of the line: {len(line.core.objects)} shared objects")
for obj in line.core.objects:
    print(f"  {obj.kind.value:9s} {obj.name}  [{obj.priority.value}]")

# 3. navigate abstraction levels
cut = cut_at_abstraction(line, level=2)
print(f"\ncut at level 2 -> members {cut.members} (level used: {cut.selected_level})")

# 4. show what each member adds on top of the core
for member in cut.members:
    delta = diff_to_core(line, member)
    extras = ", ".join(sorted(str(k) for k in delta.extra_objects)) or "(nothing)"
    print(f"  {member} adds: {extras}")
