from __future__ import annotations

import random
from dataclasses import replace

import pytest

from procline.line import (
    build_process_line,
    cut_at_abstraction,
    diff_to_core,
    reconstruct_variant,
)
from procline.model import (
    IdentityKey,
    NotFoundError,
    ObjectKind,
    Priority,
    ProcessError,
    ProcessModel,
    models_equivalent,
    validate_model,
)

from conftest import make_milestone, make_phase, make_task, random_model  # noqa: F401


def simple_variant(vid, task_names, abstraction=1, extra_edges=()):
    objects = [make_milestone(f"{vid}-m", "Release"), make_phase(f"{vid}-p", "Build")]
    containment = {f"{vid}-p": f"{vid}-m"}
    for i, name in enumerate(task_names):
        oid = f"{vid}-t{i}"
        objects.append(make_task(oid, name))
        containment[oid] = f"{vid}-p"
    by_name = {name: f"{vid}-t{i}" for i, name in enumerate(task_names)}
    edges = {(by_name[a], by_name[b]) for a, b in extra_edges}
    return ProcessModel(
        id=vid,
        objects=tuple(objects),
        edges=frozenset(edges),
        containment=containment,
        abstraction_index=abstraction,
    )


class TestBuildProcessLine:
    def test_identical_variants_share_everything(self):
        v1 = simple_variant("v1", ["Review", "Test"])
        v2 = simple_variant("v2", ["Review", "Test"])
        line = build_process_line([v1, v2])
        assert line.core.key_set() == v1.key_set()
        assert line.deltas["v1"].is_empty
        assert line.deltas["v2"].is_empty

    def test_disjoint_tasks_leave_no_tasks_in_core(self):
        v1 = simple_variant("v1", ["Review", "Test"])
        v2 = simple_variant("v2", ["Deploy", "Demo"])
        line = build_process_line([v1, v2])
        core_tasks = [k for k in line.core.key_set() if k.kind is ObjectKind.TASK]
        assert core_tasks == []
        assert {o.name for o in line.deltas["v1"].added_objects} == {"Review", "Test"}
        assert {o.name for o in line.deltas["v2"].added_objects} == {"Deploy", "Demo"}

    def test_core_keys_match_brute_force_intersection(self):
        # oracle: pairwise intersection of identity-key sets, computed independently
        rng = random.Random(17)
        variants = [random_model(rng, f"v{i}") for i in range(5)]
        line = build_process_line(variants)

        expected = set(variants[0].key_set())
        for variant in variants[1:]:
            expected &= set(variant.key_set())
        assert set(line.core.key_set()) == expected

    def test_empty_variant_list_rejected(self):
        with pytest.raises(ProcessError):
            build_process_line([])

    def test_duplicate_variant_id_rejected(self):
        v = simple_variant("v1", ["Review"])
        with pytest.raises(ProcessError, match="duplicate"):
            build_process_line([v, v])

    def test_core_is_valid(self):
        rng = random.Random(3)
        variants = [random_model(rng, f"v{i}") for i in range(4)]
        line = build_process_line(variants)
        assert validate_model(line.core) == []

    def test_delta_invariants_enforced_on_construction(self):
        from procline.line import ProcessLine, VariantDelta

        line = build_process_line([simple_variant("v1", ["Review"])])
        bad = VariantDelta(
            variant_id="v2",
            added_objects=(make_task("x", "Review"),),  # clashes with a core key
        )
        with pytest.raises(ProcessError, match="already exist in the core"):
            ProcessLine(core=line.core, deltas={"v2": bad}, abstraction_indices={"v2": 1})


class TestReconstruct:
    def test_round_trip_two_variants(self):
        v1 = simple_variant("v1", ["Review", "Test"], extra_edges=[("Review", "Test")])
        v2 = simple_variant("v2", ["Review", "Deploy"])
        line = build_process_line([v1, v2])
        assert models_equivalent(reconstruct_variant(line, "v1"), v1)
        assert models_equivalent(reconstruct_variant(line, "v2"), v2)

    def test_unknown_variant(self):
        line = build_process_line([simple_variant("v1", ["Review"])])
        with pytest.raises(NotFoundError):
            reconstruct_variant(line, "zz")

    def test_randomized_reconstruction_50_variants(self):
        rng = random.Random(99)
        variants = [random_model(rng, f"v{i:02d}", max_objects=15) for i in range(50)]
        line = build_process_line(variants)
        for variant in variants:
            rebuilt = reconstruct_variant(line, variant.id)
            assert models_equivalent(rebuilt, variant), variant.id
            assert validate_model(rebuilt) == []

    def test_core_of_singleton_equals_variant(self):
        v = simple_variant("v1", ["Review", "Test"])
        line = build_process_line([v])
        assert models_equivalent(line.core, v, include_metadata=False)
        assert line.deltas["v1"].is_empty

    def test_attribute_overrides_restore_variant_values(self):
        v1 = simple_variant("v1", ["Review"])
        v2 = simple_variant("v2", ["Review"])
        patched = tuple(
            replace(obj, priority=Priority.MINIMAL_REQUIREMENT) if obj.name == "Review" else obj
            for obj in v2.objects
        )
        v2 = ProcessModel(
            id="v2", objects=patched, edges=v2.edges,
            containment=dict(v2.containment), abstraction_index=v2.abstraction_index,
        )
        line = build_process_line([v1, v2])
        key = IdentityKey.of(ObjectKind.TASK, "Review")
        assert line.deltas["v2"].attribute_overrides[key] == {"priority": Priority.MINIMAL_REQUIREMENT}
        assert models_equivalent(reconstruct_variant(line, "v2"), v2)


class TestCoreMonotonicity:
    def test_adding_a_variant_never_grows_the_core(self):
        rng = random.Random(7)
        variants = [random_model(rng, f"v{i}", max_objects=12) for i in range(6)]
        previous = None
        for i in range(1, len(variants) + 1):
            line = build_process_line(variants[:i])
            keys = set(line.core.key_set())
            if previous is not None:
                assert keys <= previous
            previous = keys


class TestCutAtAbstraction:
    @pytest.fixture
    def line(self):
        variants = [
            simple_variant("a", ["Review"], abstraction=1),
            simple_variant("b", ["Review"], abstraction=2),
            simple_variant("c", ["Review"], abstraction=2),
            simple_variant("d", ["Review"], abstraction=3),
        ]
        return build_process_line(variants)

    def test_exact_level(self, line):
        cut = cut_at_abstraction(line, 2)
        assert cut.selected_level == 2
        assert cut.members == ("b", "c")

    def test_nearest_below_when_level_absent(self, line):
        cut = cut_at_abstraction(line, 5)
        assert cut.selected_level == 3
        assert cut.members == ("d",)

    def test_all_members_when_everything_matches(self):
        variants = [simple_variant(v, ["Review"], abstraction=1) for v in ("x", "y", "z")]
        cut = cut_at_abstraction(build_process_line(variants), 1)
        assert cut.members == ("x", "y", "z")

    def test_coarsest_available_when_nothing_at_or_below(self, line):
        # nothing below level 1 exists in a line starting at 2
        variants = [simple_variant("b", ["Review"], abstraction=2)]
        cut = cut_at_abstraction(build_process_line(variants), 1)
        assert cut.selected_level == 2
        assert cut.members == ("b",)

    def test_level_below_one_rejected(self, line):
        with pytest.raises(ProcessError):
            cut_at_abstraction(line, 0)


class TestDiffToCore:
    def test_variant_equal_to_core_has_empty_delta(self):
        v1 = simple_variant("v1", ["Review"])
        v2 = simple_variant("v2", ["Review"])
        line = build_process_line([v1, v2])
        assert diff_to_core(line, "v1").is_empty

    def test_extra_task_is_reported(self):
        v1 = simple_variant("v1", ["Review"])
        v2 = simple_variant("v2", ["Review", "Integration"])
        line = build_process_line([v1, v2])
        delta = diff_to_core(line, "v2")
        assert delta.extra_objects == {IdentityKey.of(ObjectKind.TASK, "Integration")}
        assert delta.missing_objects == frozenset()

    def test_matches_brute_force_symmetric_difference(self):
        # oracle: plain set differences between variant and core key sets
        rng = random.Random(41)
        variants = [random_model(rng, f"v{i}", max_objects=14) for i in range(4)]
        line = build_process_line(variants)
        for variant in variants:
            delta = diff_to_core(line, variant.id)
            core_keys, variant_keys = set(line.core.key_set()), set(variant.key_set())
            assert set(delta.extra_objects) == variant_keys - core_keys
            assert set(delta.missing_objects) == core_keys - variant_keys
            assert set(delta.extra_edges) == set(variant.edge_keys()) - set(line.core.edge_keys())

    def test_unknown_variant(self):
        line = build_process_line([simple_variant("v1", ["Review"])])
        with pytest.raises(NotFoundError):
            diff_to_core(line, "nope")

    def test_empty_diff_iff_reconstruction_equals_core(self):
        rng = random.Random(23)
        variants = [random_model(rng, f"v{i}", max_objects=10) for i in range(3)]
        line = build_process_line(variants)
        for variant in variants:
            delta = diff_to_core(line, variant.id)
            rebuilt = reconstruct_variant(line, variant.id)
            same_content = models_equivalent(rebuilt, line.core, include_metadata=False)
            assert delta.is_empty == same_content
