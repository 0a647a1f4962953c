#!/usr/bin/env python3
"""Regenerate the static fixture files under fixtures/.

The effort figures are the first-iteration study numbers this workbench uses
as its analytics acceptance fixture: 17 activity types, four week buckets,
three groups (two emergent groups, one V-model group), minutes per cell.
Printed totals are kept verbatim in a separate file because some of them
disagree with the cells; the workbench reports those mismatches instead of
guessing which number is the typo.
"""

from __future__ import annotations

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from procline.interfaces import ProcessBase  # noqa: E402
from procline.model import AttributeKind, MetaModel, ObjectKind, Priority, ProcessModel, ProcessObject  # noqa: E402
from procline.serialize import dumps, save_base  # noqa: E402

WEEKS = ("10-17.11.2004", "17-22.11.2004", "23-30.11.2004", "01-07.12.2004")
GROUPS = ("EG1", "EG2", "VG")

# activity -> (week1 EG1, EG2, VG, week2 EG1, EG2, VG, ..., printed totals EG1, EG2, VG)
EFFORT_ROWS = {
    "Communication customer":        (0, 0, 0, 270, 300, 270, 0, 0, 0, 0, 0, 30, 270, 300, 300),
    "Communication TG":              (0, 0, 600, 210, 120, 0, 90, 60, 60, 0, 0, 30, 300, 180, 600),
    "Requirements specification":    (0, 0, 780, 120, 570, 600, 0, 240, 0, 0, 0, 240, 120, 810, 1620),
    "Requirements review":           (0, 0, 240, 0, 90, 450, 0, 0, 0, 0, 0, 0, 0, 90, 690),
    "Requirements adaptation":       (0, 0, 0, 0, 30, 60, 0, 0, 120, 0, 0, 0, 0, 30, 180),
    "Architecture modeling":         (0, 0, 240, 270, 565, 0, 0, 405, 0, 180, 0, 30, 450, 970, 270),
    "Architecture review":           (0, 0, 360, 0, 0, 120, 0, 0, 0, 0, 0, 0, 90, 0, 480),
    "Architecture change":           (0, 0, 0, 0, 0, 0, 0, 0, 0, 420, 0, 0, 420, 0, 0),
    "New statestate modeling":       (0, 0, 0, 720, 0, 0, 660, 1080, 1620, 765, 810, 0, 2145, 1890, 1620),
    "Statestate review":             (0, 0, 0, 0, 0, 240, 90, 180, 465, 0, 225, 0, 90, 315, 705),
    "Statestate change":             (0, 0, 0, 0, 0, 0, 180, 500, 0, 15, 0, 1200, 195, 500, 1200),
    "Fault removal from statestate": (0, 0, 0, 0, 0, 0, 135, 0, 120, 0, 0, 0, 135, 0, 120),
    "Statestate optimization":       (0, 0, 0, 0, 0, 0, 90, 0, 0, 0, 345, 60, 90, 345, 60),
    "Panel development":             (0, 0, 0, 0, 240, 0, 540, 0, 0, 0, 0, 0, 540, 240, 0),
    "Panel change":                  (0, 0, 0, 0, 0, 0, 0, 135, 0, 210, 0, 210, 210, 135, 210),
    "System test":                   (0, 0, 0, 0, 0, 480, 180, 60, 0, 420, 530, 450, 600, 590, 930),
    "Integration":                   (0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 330, 0, 0, 330),
}

PRINTED_GRAND_TOTALS = {"EG1": 5475, "EG2": 6485, "VG": 9405}


def write_effort_csv(path: Path) -> None:
    lines = ["# First-iteration effort per activity type, week, and group (minutes).",
             "week;group;activity;minutes"]
    for activity, row in EFFORT_ROWS.items():
        for w, week in enumerate(WEEKS):
            for g, group in enumerate(GROUPS):
                lines.append(f"{week};{group};{activity};{row[w * 3 + g]}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_printed_totals_csv(path: Path) -> None:
    lines = ["# Printed per-activity and grand totals, kept verbatim for mismatch reporting.",
             "group;activity;minutes"]
    for activity, row in EFFORT_ROWS.items():
        for g, group in enumerate(GROUPS):
            lines.append(f"{group};{activity};{row[12 + g]}")
    for group, total in PRINTED_GRAND_TOTALS.items():
        lines.append(f"{group};Total effort;{total}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


# -- the 5-variant process base -------------------------------------------------

K = AttributeKind


def milestone(oid, name, deliverables, due, maturity, role, priority=Priority.MINIMAL_REQUIREMENT):
    return ProcessObject(
        id=oid,
        kind=ObjectKind.MILESTONE,
        name=name,
        priority=priority,
        attributes={
            K.OUTPUTS: tuple(deliverables),
            K.DELIVERY_TIME: due,
            K.DELIVERABLE_MATURITY: maturity,
            K.ROLES: role,
        },
    )


def phase(oid, name, priority=Priority.RECOMMENDED, **attrs):
    return ProcessObject(id=oid, kind=ObjectKind.PHASE, name=name, priority=priority, attributes=attrs)


def task(oid, name, priority=Priority.OPTIONAL, role=None, outputs=(), inputs=()):
    attrs = {}
    if role:
        attrs[K.ROLES] = role
    if outputs:
        attrs[K.OUTPUTS] = tuple(outputs)
    if inputs:
        attrs[K.INPUTS] = tuple(inputs)
    return ProcessObject(id=oid, kind=ObjectKind.TASK, name=name, priority=priority, attributes=attrs)


def common_skeleton(role_for_review):
    """Objects, containment, edges shared by every variant."""
    objects = [
        milestone("ms-proto", "Prototype delivery", ["prototype"], "2004-12-07T17:00:00+00:00", 3, "project-manager"),
        phase("ph-spec", "Specification"),
        phase("ph-con", "Construction"),
        task("t-reqspec", "Requirements specification", Priority.MINIMAL_REQUIREMENT,
             role="requirements-engineer", outputs=["requirements document"]),
        task("t-reqrev", "Requirements review", Priority.MINIMAL_REQUIREMENT,
             role=role_for_review, inputs=["requirements document"]),
        task("t-state", "Statechart modeling", Priority.RECOMMENDED,
             role="developer", outputs=["statechart model"]),
        task("t-systest", "System test", Priority.MINIMAL_REQUIREMENT,
             role="tester", inputs=["prototype"]),
    ]
    containment = {
        "ph-spec": "ms-proto",
        "ph-con": "ms-proto",
        "t-reqspec": "ph-spec",
        "t-reqrev": "ph-spec",
        "t-state": "ph-con",
        "t-systest": "ph-con",
    }
    edges = {("t-reqspec", "t-reqrev"), ("t-state", "t-systest")}
    return objects, containment, edges


def variant(vid, abstraction, characteristics, extra_objects=(), extra_containment=(),
            extra_edges=(), role_for_review="qa-engineer", refinement_links=()):
    objects, containment, edges = common_skeleton(role_for_review)
    objects.extend(extra_objects)
    containment.update(dict(extra_containment))
    edges.update(set(extra_edges))
    return ProcessModel(
        id=vid,
        objects=tuple(objects),
        edges=frozenset(edges),
        containment=containment,
        meta_model=MetaModel.full(),
        abstraction_index=abstraction,
        characteristics=characteristics,
        refinement_links=tuple(refinement_links),
    )


def build_base() -> ProcessBase:
    v_lightweight = variant(
        "v-lightweight", 1,
        {"domain": "automotive", "team-size": 3, "safety-level": "none"},
        extra_objects=[task("t-demo", "Customer demo", role="project-manager")],
        extra_containment=[("t-demo", "ph-con")],
        extra_edges=[("t-systest", "t-demo")],
        refinement_links=("v-standard", "v-detailed"),
    )
    v_standard = variant(
        "v-standard", 2,
        {"domain": "automotive", "team-size": 8, "safety-level": "qm"},
        extra_objects=[
            task("t-arch", "Architecture modeling", Priority.RECOMMENDED,
                 role="architect", outputs=["architecture model"]),
            task("t-panel", "Panel development", role="developer", outputs=["panel"]),
        ],
        extra_containment=[("t-arch", "ph-spec"), ("t-panel", "ph-con")],
        extra_edges=[("t-reqrev", "t-arch"), ("t-arch", "t-state")],
        refinement_links=("v-detailed",),
    )
    v_safety = variant(
        "v-safety", 2,
        {"domain": "automotive", "team-size": 12, "safety-level": "asil-b"},
        extra_objects=[
            task("t-arch", "Architecture modeling", Priority.MINIMAL_REQUIREMENT,
                 role="architect", outputs=["architecture model"]),
            task("t-archrev", "Architecture review", Priority.MINIMAL_REQUIREMENT, role="safety-engineer"),
            task("t-fault", "Fault analysis", Priority.MINIMAL_REQUIREMENT,
                 role="safety-engineer", outputs=["fault report"]),
        ],
        extra_containment=[("t-arch", "ph-spec"), ("t-archrev", "ph-spec"), ("t-fault", "ph-con")],
        extra_edges=[("t-reqrev", "t-arch"), ("t-arch", "t-archrev"), ("t-fault", "t-systest")],
        role_for_review="safety-engineer",
    )
    v_detailed = variant(
        "v-detailed", 3,
        {"domain": "automotive", "team-size": 18, "safety-level": "asil-d"},
        extra_objects=[
            task("t-arch", "Architecture modeling", Priority.RECOMMENDED,
                 role="architect", outputs=["architecture model"]),
            task("t-archrev", "Architecture review", Priority.RECOMMENDED, role="architect"),
            task("t-doors", "Door control modeling", Priority.RECOMMENDED, role="developer"),
            task("t-lights", "Light control modeling", Priority.RECOMMENDED, role="developer"),
            task("t-staterev", "Statechart review", Priority.RECOMMENDED, role="qa-engineer"),
        ],
        extra_containment=[
            ("t-arch", "ph-spec"),
            ("t-archrev", "ph-spec"),
            ("t-doors", "t-state"),   # sub-tasks refine the modeling task
            ("t-lights", "t-state"),
            ("t-staterev", "ph-con"),
        ],
        extra_edges=[("t-reqrev", "t-arch"), ("t-arch", "t-archrev"), ("t-state", "t-staterev")],
    )
    v_embedded_ui = variant(
        "v-embedded-ui", 2,
        {"domain": "infotainment", "team-size": 6, "safety-level": "qm"},
        extra_objects=[
            task("t-panel", "Panel development", Priority.RECOMMENDED, role="ui-developer", outputs=["panel"]),
            task("t-panelchg", "Panel change", role="ui-developer"),
        ],
        extra_containment=[("t-panel", "ph-con"), ("t-panelchg", "ph-con")],
        extra_edges=[("t-panel", "t-panelchg")],
    )
    return ProcessBase(variants=(v_lightweight, v_standard, v_safety, v_detailed, v_embedded_ui))


def write_characteristics(path: Path) -> None:
    path.write_text(
        dumps(
            [
                {"name": "domain", "value": "automotive", "weight": 2},
                {"name": "team-size", "value": 8, "weight": 1, "range": [2, 20]},
                {"name": "safety-level", "value": "qm", "weight": 1},
            ]
        ),
        encoding="utf-8",
    )


def write_sample_log(path: Path) -> None:
    lines = [
        "# Activity log of the first prototype iteration (two cases).",
        "2004-11-15T09:00:00+00:00;iter1;Requirements specification;started;anna;EG1",
        "2004-11-15T11:30:00+00:00;iter1;Requirements specification;completed;anna;EG1",
        "2004-11-15T13:00:00+00:00;iter1;Requirements review;started;boris;EG1",
        "2004-11-15T13:45:00+00:00;iter1;Requirements review;completed;boris;EG1",
        "2004-11-16T09:00:00+00:00;iter1;Statechart modeling;started;carla;EG1",
        "2004-11-16T15:00:00+00:00;iter1;Statechart modeling;completed;carla;EG1",
        "2004-11-17T10:00:00+00:00;iter1;System test;started;dmitri;EG1",
        "2004-11-17T12:00:00+00:00;iter1;System test;completed;dmitri;EG1",
        "2004-11-18T09:00:00+00:00;iter2;Requirements specification;started;anna;EG1",
        "2004-11-18T10:00:00+00:00;iter2;Requirements specification;completed;anna;EG1",
        "2004-11-18T11:00:00+00:00;iter2;Panel tuning;started;carla;EG1",
        "2004-11-18T12:30:00+00:00;iter2;Panel tuning;completed;carla;EG1",
        "2004-11-18T13:00:00+00:00;iter2;System test;started;dmitri;EG1",
        "2004-11-18T14:00:00+00:00;iter2;System test;completed;dmitri;EG1",
    ]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def main() -> None:
    fixtures = ROOT / "fixtures"
    fixtures.mkdir(exist_ok=True)
    write_effort_csv(fixtures / "effort_iteration1.csv")
    write_printed_totals_csv(fixtures / "effort_iteration1_printed_totals.csv")
    save_base(build_base(), fixtures / "process_base.json")
    write_characteristics(fixtures / "characteristics.json")
    write_sample_log(fixtures / "sample_log.txt")
    print(f"fixtures written to {fixtures}")


if __name__ == "__main__":
    main()
