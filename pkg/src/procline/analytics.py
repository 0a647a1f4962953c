"""Effort analytics: per-activity, per-week, per-group aggregation and comparison.

Tables never store totals; every total is recomputed from the cells, and the
verifier reports where externally printed totals disagree with the cells.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date, datetime

from .model import ParseError, ProcessError
from .reflection import EventLog, EventStatus

GRAND_TOTAL_LABEL = "Total effort"


@dataclass(frozen=True)
class EffortRecord:
    week_bucket: str
    group: str
    activity: str
    minutes: int

    def __post_init__(self):
        if self.minutes < 0:
            raise ProcessError(
                f"effort record for {self.activity!r} has negative minutes {self.minutes}"
            )


@dataclass
class EffortTable:
    """One group's activity-by-week effort matrix; totals are always derived."""

    group: str
    activities: tuple
    buckets: tuple
    cells: dict = field(default_factory=dict)  # (activity, bucket) -> minutes

    def cell(self, activity: str, bucket: str) -> int:
        return self.cells.get((activity, bucket), 0)

    def row_total(self, activity: str) -> int:
        return sum(self.cell(activity, bucket) for bucket in self.buckets)

    def column_total(self, bucket: str) -> int:
        return sum(self.cell(activity, bucket) for activity in self.activities)

    def grand_total(self) -> int:
        return sum(self.cells.values())


def aggregate_effort(records, taxonomy, buckets) -> dict:
    """Group records into one EffortTable per group, in taxonomy/bucket order."""
    taxonomy = tuple(taxonomy)
    buckets = tuple(buckets)
    known_activities = set(taxonomy)
    known_buckets = set(buckets)

    tables: dict = {}
    for record in records:
        if record.activity not in known_activities:
            raise ProcessError(f"record names unknown activity {record.activity!r}")
        if record.week_bucket not in known_buckets:
            raise ProcessError(f"record names unknown week bucket {record.week_bucket!r}")
        table = tables.get(record.group)
        if table is None:
            table = EffortTable(group=record.group, activities=taxonomy, buckets=buckets)
            tables[record.group] = table
        slot = (record.activity, record.week_bucket)
        table.cells[slot] = table.cells.get(slot, 0) + record.minutes
    return dict(sorted(tables.items()))


@dataclass(frozen=True)
class WeekBucket:
    """A labelled half-open date range [start, end)."""

    label: str
    start: date
    end: date

    def covers(self, stamp: datetime) -> bool:
        return self.start <= stamp.date() < self.end


def derive_effort_records(log: EventLog, buckets):
    """Pair started/completed events FIFO per (case, activity, performer).

    Durations are floored to whole minutes and bucketed by the completed
    timestamp.  Returns (records, warnings); unmatched or unbucketable
    events contribute nothing but are reported.
    """
    buckets = list(buckets)
    records = []
    warnings = []
    open_events: dict = {}
    for event in log.events:
        slot = (event.case_id, event.activity, event.performer)
        if event.status is EventStatus.STARTED:
            open_events.setdefault(slot, []).append(event)
            continue
        queue = open_events.get(slot)
        if not queue:
            warnings.append(
                f"completed without started: case {event.case_id!r}, "
                f"activity {event.activity!r}, performer {event.performer!r}"
            )
            continue
        started = queue.pop(0)
        minutes = int((event.timestamp - started.timestamp).total_seconds() // 60)
        bucket = next((b for b in buckets if b.covers(event.timestamp)), None)
        if bucket is None:
            warnings.append(
                f"completed event at {event.timestamp.isoformat()} falls outside every week bucket"
            )
            continue
        records.append(
            EffortRecord(
                week_bucket=bucket.label,
                group=event.group or "default",
                activity=event.activity,
                minutes=max(0, minutes),
            )
        )
    for (case_id, activity, performer), queue in open_events.items():
        for _ in queue:
            warnings.append(
                f"started without completed: case {case_id!r}, "
                f"activity {activity!r}, performer {performer!r}"
            )
    return records, warnings


@dataclass
class GroupComparison:
    grand_totals: dict   # group -> minutes
    differences: dict    # (g1, g2) -> grand(g1) - grand(g2)


def compare_groups(tables: dict) -> GroupComparison:
    """Grand totals per group and all pairwise differences."""
    if len(tables) < 2:
        raise ProcessError("comparing groups needs at least two groups")
    grand = {group: table.grand_total() for group, table in sorted(tables.items())}
    differences = {}
    for g1 in grand:
        for g2 in grand:
            if g1 != g2:
                differences[(g1, g2)] = grand[g1] - grand[g2]
    return GroupComparison(grand_totals=grand, differences=differences)


@dataclass(frozen=True)
class TotalMismatch:
    group: str
    activity: str  # GRAND_TOTAL_LABEL for the per-group grand total
    printed: int
    recomputed: int


def verify_printed_totals(tables: dict, printed) -> list:
    """Compare externally printed totals against recomputed ones.

    `printed` holds EffortRecord-like rows (group, activity, minutes) where
    the activity GRAND_TOTAL_LABEL denotes the group's grand total.
    """
    mismatches = []
    for row in printed:
        table = tables.get(row.group)
        if table is None:
            raise ProcessError(f"printed totals name unknown group {row.group!r}")
        if row.activity == GRAND_TOTAL_LABEL:
            recomputed = table.grand_total()
        else:
            if row.activity not in table.activities:
                raise ProcessError(f"printed totals name unknown activity {row.activity!r}")
            recomputed = table.row_total(row.activity)
        if recomputed != row.minutes:
            mismatches.append(
                TotalMismatch(
                    group=row.group,
                    activity=row.activity,
                    printed=row.minutes,
                    recomputed=recomputed,
                )
            )
    return mismatches


# -- the CSV interchange format ----------------------------------------------

EFFORT_CSV_HEADER = "week;group;activity;minutes"
PRINTED_CSV_HEADER = "group;activity;minutes"


def parse_effort_csv(text: str) -> list:
    """Read `week;group;activity;minutes` rows; `#` starts a comment line."""
    records = []
    header_seen = False
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not header_seen:
            if line != EFFORT_CSV_HEADER:
                raise ParseError(
                    f"expected header {EFFORT_CSV_HEADER!r}, got {line!r}", line=number
                )
            header_seen = True
            continue
        parts = [p.strip() for p in line.split(";")]
        if len(parts) != 4:
            raise ParseError(f"expected 4 fields, got {len(parts)}", line=number)
        week, group, activity, minutes = parts
        try:
            value = int(minutes)
        except ValueError:
            raise ParseError(f"minutes {minutes!r} is not an integer", line=number) from None
        records.append(EffortRecord(week_bucket=week, group=group, activity=activity, minutes=value))
    return records


@dataclass(frozen=True)
class PrintedTotal:
    group: str
    activity: str
    minutes: int


def parse_printed_totals_csv(text: str) -> list:
    rows = []
    header_seen = False
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not header_seen:
            if line != PRINTED_CSV_HEADER:
                raise ParseError(
                    f"expected header {PRINTED_CSV_HEADER!r}, got {line!r}", line=number
                )
            header_seen = True
            continue
        parts = [p.strip() for p in line.split(";")]
        if len(parts) != 3:
            raise ParseError(f"expected 3 fields, got {len(parts)}", line=number)
        group, activity, minutes = parts
        try:
            value = int(minutes)
        except ValueError:
            raise ParseError(f"minutes {minutes!r} is not an integer", line=number) from None
        rows.append(PrintedTotal(group=group, activity=activity, minutes=value))
    return rows


def taxonomy_and_buckets(records):
    """First-seen activity and bucket orders, for files that carry their own order."""
    taxonomy, buckets = [], []
    for record in records:
        if record.activity not in taxonomy:
            taxonomy.append(record.activity)
        if record.week_bucket not in buckets:
            buckets.append(record.week_bucket)
    return tuple(taxonomy), tuple(buckets)
