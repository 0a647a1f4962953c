from __future__ import annotations

import random

import pytest
from hypothesis import given, strategies as st

from procline.line import build_process_line, cut_at_abstraction
from procline.model import InvalidQueryError, NotFoundError, ProcessError, ProcessModel
from procline.selection import (
    ProjectCharacteristic,
    SelectionState,
    mark_selected,
    observed_ranges,
    score_variant,
    select_top_k,
)

from conftest import make_task


def variant(vid, **characteristics):
    return ProcessModel(
        id=vid,
        objects=(make_task(f"{vid}-t", "Review"),),
        characteristics=characteristics,
    )


def brute_force_score(variant_model, query, ranges):
    """Independent evaluator: literal weighted sum over the match rule."""
    total = sum(c.weight for c in query)
    acc = 0.0
    for c in query:
        actual = variant_model.characteristics.get(c.name)
        if actual is None:
            m = 0.0
        elif isinstance(actual, (int, float)) and isinstance(c.value, (int, float)):
            span = c.ordinal_range or ranges.get(c.name)
            if span and span[1] > span[0]:
                m = max(0.0, min(1.0, 1 - abs(actual - c.value) / (span[1] - span[0])))
            else:
                m = 1.0 if actual == c.value else 0.0
        else:
            m = 1.0 if actual == c.value else 0.0
        acc += c.weight * m
    return acc / total


class TestScoreVariant:
    def test_full_match_scores_one(self):
        query = [
            ProjectCharacteristic("domain", "automotive", 2),
            ProjectCharacteristic("safety-level", "qm", 1),
        ]
        v = variant("v1", **{"domain": "automotive", "safety-level": "qm"})
        assert score_variant(v, query).score == 1.0

    def test_no_match_scores_zero(self):
        query = [ProjectCharacteristic("domain", "automotive", 2)]
        v = variant("v1", domain="avionics")
        assert score_variant(v, query).score == 0.0

    def test_missing_characteristic_contributes_zero(self):
        query = [
            ProjectCharacteristic("domain", "automotive", 1),
            ProjectCharacteristic("safety-level", "qm", 1),
        ]
        v = variant("v1", domain="automotive")
        assert score_variant(v, query).score == 0.5

    def test_weighted_ordinal_example(self):
        # domain matches (w=2), team-size 14 vs 8 over range 2..20 (w=1)
        query = [
            ProjectCharacteristic("domain", "automotive", 2),
            ProjectCharacteristic("team-size", 8, 1, ordinal_range=(2, 20)),
        ]
        v = variant("v1", **{"domain": "automotive", "team-size": 14})
        expected = (2 * 1 + 1 * (1 - 6 / 18)) / 3
        got = score_variant(v, query)
        assert got.score == pytest.approx(expected)
        assert got.score == pytest.approx(brute_force_score(v, query, {}))

    def test_ordinal_distance_can_be_switched_off(self):
        query = [ProjectCharacteristic("team-size", 8, 1, ordinal_range=(2, 20))]
        v = variant("v1", **{"team-size": 14})
        assert score_variant(v, query).score > 0.0
        assert score_variant(v, query, ordinal_distance=False).score == 0.0

    def test_all_zero_weights_rejected(self):
        query = [ProjectCharacteristic("domain", "automotive", 0.0)]
        with pytest.raises(InvalidQueryError):
            score_variant(variant("v1", domain="automotive"), query)

    def test_negative_weight_rejected(self):
        with pytest.raises(InvalidQueryError):
            ProjectCharacteristic("domain", "automotive", -1)


class TestSelectTopK:
    def make_base(self):
        return [
            variant("v1", **{"domain": "automotive", "team-size": 8}),
            variant("v2", **{"domain": "automotive", "team-size": 16}),
            variant("v3", **{"domain": "avionics", "team-size": 8}),
            variant("v4", **{"domain": "automotive", "team-size": 2}),
            variant("v5", **{"domain": "infotainment", "team-size": 11}),
        ]

    def query(self):
        return [
            ProjectCharacteristic("domain", "automotive", 2),
            ProjectCharacteristic("team-size", 8, 1),
        ]

    def test_single_variant_base(self):
        base = [variant("only", domain="automotive")]
        scores = select_top_k(base, [ProjectCharacteristic("domain", "automotive", 1)], 1)
        assert [s.variant_id for s in scores] == ["only"]

    def test_k_larger_than_base_returns_all_ranked(self):
        base = self.make_base()[:3]
        scores = select_top_k(base, self.query(), 10)
        assert len(scores) == 3
        assert scores[0].score >= scores[1].score >= scores[2].score

    def test_matches_exhaustive_score_then_sort_oracle(self):
        base = self.make_base()
        query = self.query()
        ranges = observed_ranges(base, query)
        oracle = sorted(
            ((brute_force_score(v, query, ranges), v.id) for v in base),
            key=lambda pair: (-pair[0], pair[1]),
        )
        got = select_top_k(base, query, len(base))
        assert [s.variant_id for s in got] == [vid for _, vid in oracle]
        for score, (expected, _) in zip(got, oracle):
            assert score.score == pytest.approx(expected)

    def test_empty_base_rejected(self):
        with pytest.raises(ProcessError):
            select_top_k([], self.query(), 1)

    def test_full_selection_is_a_permutation(self):
        base = self.make_base()
        scores = select_top_k(base, self.query(), len(base))
        assert sorted(s.variant_id for s in scores) == sorted(v.id for v in base)

    @given(st.floats(min_value=0.1, max_value=50))
    def test_ranking_and_scores_invariant_under_weight_scaling(self, factor):
        base = self.make_base()
        query = self.query()
        scaled = [
            ProjectCharacteristic(c.name, c.value, c.weight * factor, c.ordinal_range)
            for c in query
        ]
        original = select_top_k(base, query, len(base))
        rescaled = select_top_k(base, scaled, len(base))
        assert [s.variant_id for s in original] == [s.variant_id for s in rescaled]
        for a, b in zip(original, rescaled):
            assert a.score == pytest.approx(b.score)

    def test_improving_one_match_never_lowers_the_score(self):
        rng = random.Random(5)
        query = [
            ProjectCharacteristic("domain", "automotive", 2),
            ProjectCharacteristic("team-size", 8, 1, ordinal_range=(2, 20)),
        ]
        for _ in range(50):
            size = rng.randint(2, 20)
            worse = variant("w", **{"domain": "avionics", "team-size": size})
            better = variant("b", **{"domain": "automotive", "team-size": size})
            assert score_variant(better, query).score >= score_variant(worse, query).score


class TestMarkSelected:
    def make_state(self):
        from test_line import simple_variant

        variants = [simple_variant(v, ["Review"], abstraction=1) for v in ("v1", "v2", "v3")]
        line = build_process_line(variants)
        return SelectionState(cut=cut_at_abstraction(line, 1))

    def test_select_member(self):
        state = mark_selected(self.make_state(), "v2")
        assert state.selected_variant_id == "v2"

    def test_reselection_allowed(self):
        state = mark_selected(self.make_state(), "v2")
        state = mark_selected(state, "v3")
        assert state.selected_variant_id == "v3"

    def test_non_member_rejected(self):
        with pytest.raises(NotFoundError):
            mark_selected(self.make_state(), "v9")
