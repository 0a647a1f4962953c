#!/usr/bin/env python3
"""Walkthrough: per-activity effort tables, group comparison, mismatch reporting.

Run from the repository root:  python demos/04_effort_analytics.py
"""

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from procline.analytics import (
    aggregate_effort,
    compare_groups,
    parse_effort_csv,
    parse_printed_totals_csv,
    taxonomy_and_buckets,
    verify_printed_totals,
)

records = parse_effort_csv((ROOT / "fixtures" / "effort_iteration1.csv").read_text(encoding="utf-8"))
taxonomy, buckets = taxonomy_and_buckets(records)
tables = aggregate_effort(records, taxonomy, buckets)

print("grand totals (recomputed from cells):")
for group, table in tables.items():
    print(f"  {group}: {table.grand_total()} minutes")

comparison = compare_groups(tables)
print(f"\nV group minus emergent groups: "
      f"EG1 {comparison.differences[('VG', 'EG1')]:+d}, EG2 {comparison.differences[('VG', 'EG2')]:+d}")

print("\nbusiest activities per group:")
for group, table in tables.items():
    activity = max(taxonomy, key=table.row_total)
    print(f"  {group}: {activity} ({table.row_total(activity)} minutes)")

# totals are never trusted from input: compare against the printed column
printed = parse_printed_totals_csv(
    (ROOT / "fixtures" / "effort_iteration1_printed_totals.csv").read_text(encoding="utf-8")
)
mismatches = verify_printed_totals(tables, printed)
print(f"\n{len(mismatches)} printed totals disagree with their cells:")
for m in mismatches:
    print(f"  {m.group} / {m.activity}: printed {m.printed}, recomputed {m.recomputed}")
