from __future__ import annotations

import string

import pytest
from hypothesis import given, strategies as st

from procline.model import (
    AttributeKind,
    IdentityKey,
    InvalidObjectError,
    MANDATORY_KINDS,
    MetaModel,
    ObjectKind,
    Priority,
    ProcessModel,
    ProcessObject,
    identity_key,
    normalize_name,
    validate_model,
)

from conftest import make_milestone, make_phase, make_task


def test_attribute_kind_enumeration_is_closed():
    values = {k.value for k in AttributeKind}
    assert values == {
        "milestones", "phases", "phase-precondition", "phase-postcondition",
        "delivery-time", "deliverable-maturity", "activities",
        "activity-precondition", "activity-postcondition", "activity-priority",
        "inputs", "outputs", "support-process-interfaces", "roles",
    }
    with pytest.raises(ValueError):
        AttributeKind("budget")


def test_meta_model_always_contains_mandatory_kinds():
    meta = MetaModel(frozenset({AttributeKind.ROLES}))
    assert AttributeKind.ACTIVITIES in meta
    assert AttributeKind.ACTIVITY_PRIORITY in meta
    assert MetaModel(frozenset()).kinds == MANDATORY_KINDS


def test_priority_total_order():
    assert Priority.MINIMAL_REQUIREMENT.rank > Priority.RECOMMENDED.rank > Priority.OPTIONAL.rank


class TestIdentityKey:
    def test_case_and_whitespace_insensitive(self):
        a = make_task("t1", "Requirements review")
        b = make_task("t2", "  requirements REVIEW ")
        assert identity_key(a) == identity_key(b)

    def test_kind_distinguishes(self):
        task = make_task("t1", "A")
        milestone = make_milestone("m1", "A")
        assert identity_key(task) != identity_key(milestone)

    def test_names_distinguish(self):
        assert identity_key(make_task("t1", "A")) != identity_key(make_task("t2", "B"))

    def test_empty_name_rejected(self):
        with pytest.raises(InvalidObjectError):
            identity_key(make_task("t1", "   "))

    def test_string_round_trip(self):
        key = IdentityKey.of(ObjectKind.TASK, " System  Test ")
        assert IdentityKey.parse(str(key)) == key

    @given(
        st.text(alphabet=string.ascii_letters + " \t", min_size=1, max_size=12),
        st.text(alphabet=string.ascii_letters + " \t", min_size=1, max_size=12),
        st.sampled_from(list(ObjectKind)),
        st.sampled_from(list(ObjectKind)),
    )
    def test_congruence_with_normalization(self, name_a, name_b, kind_a, kind_b):
        # keys are equal exactly when kind and normalized name agree
        if not normalize_name(name_a) or not normalize_name(name_b):
            return
        key_a = IdentityKey.of(kind_a, name_a)
        key_b = IdentityKey.of(kind_b, name_b)
        expected = kind_a == kind_b and normalize_name(name_a) == normalize_name(name_b)
        assert (key_a == key_b) == expected


class TestValidateModel:
    def test_well_formed_model_yields_empty_report(self, small_model):
        assert validate_model(small_model) == []

    def test_validation_is_pure(self, small_model):
        first = validate_model(small_model)
        second = validate_model(small_model)
        assert first == second == []

    def test_dangling_edge_names_the_missing_id(self, small_model):
        broken = ProcessModel(
            id="broken",
            objects=small_model.objects,
            edges=frozenset({("t1", "X")}),
            containment=dict(small_model.containment),
        )
        report = validate_model(broken)
        assert any(v.code == "dangling-edge" and "X" in v.message for v in report)

    def test_parent_cycle_reported(self):
        model = ProcessModel(
            id="cyclic",
            objects=(make_task("T1", "alpha"), make_task("T2", "beta")),
            containment={"T1": "T2", "T2": "T1"},
        )
        report = validate_model(model)
        assert any(v.code == "containment-cycle" for v in report)

    def test_duplicate_ids_and_keys_reported(self):
        model = ProcessModel(
            id="dups",
            objects=(
                make_task("t1", "Review"),
                make_task("t1", "Other"),
                make_task("t2", " review "),
            ),
        )
        codes = {v.code for v in validate_model(model)}
        assert "duplicate-id" in codes
        assert "duplicate-key" in codes

    def test_disabled_attribute_kind_reported(self):
        model = ProcessModel(
            id="meta",
            objects=(make_task("t1", "Review", roles="qa"),),
            meta_model=MetaModel(frozenset()),
        )
        report = validate_model(model)
        assert any(v.code == "attribute-kind-disabled" for v in report)

    def test_milestone_missing_extras_reported(self):
        bare = ProcessObject(id="m1", kind=ObjectKind.MILESTONE, name="Release")
        model = ProcessModel(id="bare", objects=(bare,))
        report = validate_model(model)
        assert {v.code for v in report} == {"milestone-missing-extra"}
        assert len(report) == 4

    def test_containment_kind_rules(self):
        model = ProcessModel(
            id="kinds",
            objects=(make_phase("p1", "Spec"), make_task("t1", "Review")),
            containment={"p1": "t1"},  # a phase cannot live inside a task
        )
        assert any(v.code == "containment-kind" for v in validate_model(model))

    def test_maturity_range_checked(self):
        milestone = make_milestone("m1", "Release")
        bad = milestone.with_attribute(AttributeKind.DELIVERABLE_MATURITY, 9)
        model = ProcessModel(id="mat", objects=(bad,))
        assert any(v.code == "maturity-range" for v in validate_model(model))


def test_data_dependency_rejects_self_reference():
    from procline.model import DataDependency

    DataDependency("door_param", "light_ctrl", "LightDev")  # fine
    with pytest.raises(InvalidObjectError):
        DataDependency("door_param", "door_param", "DoorDev")


def test_attributes_normalize_lists_to_tuples():
    obj = ProcessObject(
        id="t1", kind=ObjectKind.TASK, name="Build",
        attributes={"outputs": ["a", "b"]},
    )
    assert obj.attributes[AttributeKind.OUTPUTS] == ("a", "b")
