from __future__ import annotations

import random
import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from procline.model import (  # noqa: E402
    AttributeKind,
    MetaModel,
    ObjectKind,
    Priority,
    ProcessModel,
    ProcessObject,
)

FIXTURES = ROOT / "fixtures"
SCHEMAS = ROOT / "schemas"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL line per acceptance criterion at the end of the run."""
    lines = []
    for outcome in ("passed", "failed"):
        for report in terminalreporter.stats.get(outcome, []):
            if getattr(report, "when", "call") != "call":
                continue
            if "test_acceptance.py" in report.nodeid:
                name = report.nodeid.split("::")[-1]
                lines.append((name, "PASS" if outcome == "passed" else "FAIL"))
    if lines:
        terminalreporter.write_line("")
        terminalreporter.write_line("acceptance criteria:")
        for name, verdict in lines:
            terminalreporter.write_line(f"  [{verdict}] {name}")


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def schemas_dir() -> Path:
    return SCHEMAS


def make_milestone(oid, name, priority=Priority.MINIMAL_REQUIREMENT):
    return ProcessObject(
        id=oid,
        kind=ObjectKind.MILESTONE,
        name=name,
        priority=priority,
        attributes={
            AttributeKind.OUTPUTS: ("deliverable",),
            AttributeKind.DELIVERY_TIME: "2004-12-01T12:00:00+00:00",
            AttributeKind.DELIVERABLE_MATURITY: 3,
            AttributeKind.ROLES: "project-manager",
        },
    )


def make_task(oid, name, priority=Priority.OPTIONAL, **attrs):
    return ProcessObject(id=oid, kind=ObjectKind.TASK, name=name, priority=priority, attributes=attrs)


def make_phase(oid, name, priority=Priority.RECOMMENDED):
    return ProcessObject(id=oid, kind=ObjectKind.PHASE, name=name, priority=priority)


@pytest.fixture
def small_model() -> ProcessModel:
    """Milestone > phase > two tasks, one edge. Valid by construction."""
    return ProcessModel(
        id="small",
        objects=(
            make_milestone("m1", "Prototype delivery"),
            make_phase("p1", "Construction"),
            make_task("t1", "Statechart modeling", Priority.RECOMMENDED),
            make_task("t2", "System test", Priority.MINIMAL_REQUIREMENT),
        ),
        edges=frozenset({("t1", "t2")}),
        containment={"p1": "m1", "t1": "p1", "t2": "p1"},
        abstraction_index=2,
        characteristics={"domain": "automotive"},
    )


# -- random model generation (shared by line and guard suites) -------------------

NAME_POOL = [
    "Requirements specification", "Requirements review", "Requirements adaptation",
    "Architecture modeling", "Architecture review", "Architecture change",
    "Statechart modeling", "Statechart review", "Statechart change",
    "Fault analysis", "Panel development", "Panel change", "System test",
    "Integration", "Customer demo", "Communication customer", "Door control modeling",
    "Light control modeling", "Test planning", "Test execution", "Deployment",
    "Code review", "Module test", "Hazard analysis", "Safety case",
]

PHASE_POOL = ["Specification", "Design", "Construction", "Validation", "Handover"]
MILESTONE_POOL = ["Prototype delivery", "Design freeze", "Release", "UI freeze"]


def random_model(rng: random.Random, model_id: str, max_objects: int = 30) -> ProcessModel:
    """A structurally valid model with unique identities and kind-correct containment."""
    milestone_names = rng.sample(MILESTONE_POOL, rng.randint(1, 2))
    phase_names = rng.sample(PHASE_POOL, rng.randint(0, 3))
    budget = max(0, max_objects - len(milestone_names) - len(phase_names))
    task_names = rng.sample(NAME_POOL, rng.randint(1, min(len(NAME_POOL), max(1, budget))))

    objects = []
    containment = {}
    milestone_ids, phase_ids, task_ids = [], [], []
    counter = 0

    def next_id(prefix):
        nonlocal counter
        counter += 1
        return f"{model_id}-{prefix}{counter}"

    for name in milestone_names:
        oid = next_id("m")
        milestone_ids.append(oid)
        objects.append(make_milestone(oid, name, rng.choice(list(Priority))))
    for name in phase_names:
        oid = next_id("p")
        phase_ids.append(oid)
        objects.append(make_phase(oid, name, rng.choice(list(Priority))))
        containment[oid] = rng.choice(milestone_ids)
    for name in task_names:
        oid = next_id("t")
        attrs = {}
        if rng.random() < 0.5:
            attrs[AttributeKind.ROLES] = rng.choice(["developer", "tester", "architect"])
        if rng.random() < 0.3:
            attrs[AttributeKind.OUTPUTS] = (f"artifact-{rng.randint(1, 5)}",)
        objects.append(make_task(oid, name, rng.choice(list(Priority)), **attrs))
        # parent: phase, milestone, or an earlier task (acyclic by construction)
        choices = phase_ids + milestone_ids + task_ids
        if choices and rng.random() < 0.9:
            containment[oid] = rng.choice(choices)
        task_ids.append(oid)

    ids = [obj.id for obj in objects]
    edges = set()
    for _ in range(rng.randint(0, 2 * len(ids))):
        a, b = rng.choice(ids), rng.choice(ids)
        if a != b:
            edges.add((a, b))

    return ProcessModel(
        id=model_id,
        objects=tuple(objects),
        edges=frozenset(edges),
        containment=containment,
        meta_model=MetaModel.full(),
        abstraction_index=rng.randint(1, 4),
        characteristics={"domain": rng.choice(["automotive", "infotainment"]), "team-size": rng.randint(2, 20)},
    )
