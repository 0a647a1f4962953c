"""Variant selection: weighted matching of project characteristics, top-k ranking."""

from __future__ import annotations

from dataclasses import dataclass

from .model import InvalidQueryError, NotFoundError, ProcessError, ProcessModel
from .line import CutProcessLine


@dataclass(frozen=True)
class ProjectCharacteristic:
    """One prioritized query term: a name, the wanted value, and its weight.

    Ordinal characteristics may carry an explicit value range; otherwise the
    range observed across the process base is used for distance matching.
    """

    name: str
    value: object
    weight: float = 1.0
    ordinal_range: tuple | None = None

    def __post_init__(self):
        if self.weight < 0:
            raise InvalidQueryError(f"characteristic {self.name!r} has negative weight {self.weight}")
        if self.ordinal_range is not None:
            lo, hi = self.ordinal_range
            if hi < lo:
                raise InvalidQueryError(f"characteristic {self.name!r} range {self.ordinal_range} is inverted")


@dataclass(frozen=True)
class VariantScore:
    variant_id: str
    score: float
    contributions: tuple  # (name, match in [0, 1]) per weighted characteristic


@dataclass
class SelectionState:
    cut: CutProcessLine
    selected_variant_id: str | None = None


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _match(characteristic: ProjectCharacteristic, actual, ranges, ordinal_distance: bool) -> float:
    if actual is None:
        return 0.0
    wanted = characteristic.value
    if ordinal_distance and _is_number(wanted) and _is_number(actual):
        span = characteristic.ordinal_range or ranges.get(characteristic.name)
        if span is not None and span[1] > span[0]:
            m = 1.0 - abs(actual - wanted) / (span[1] - span[0])
            return min(1.0, max(0.0, m))
    return 1.0 if actual == wanted else 0.0


def score_variant(
    variant: ProcessModel,
    query,
    ordinal_distance: bool = True,
    ranges: dict | None = None,
) -> VariantScore:
    """Normalized weighted match of the variant's characteristics against the query."""
    query = list(query)
    total_weight = sum(c.weight for c in query)
    if total_weight <= 0:
        raise InvalidQueryError("query needs at least one characteristic with positive weight")
    ranges = ranges or {}
    contributions = []
    weighted = 0.0
    for characteristic in query:
        if characteristic.weight == 0:
            continue
        m = _match(
            characteristic,
            variant.characteristics.get(characteristic.name),
            ranges,
            ordinal_distance,
        )
        contributions.append((characteristic.name, m))
        weighted += characteristic.weight * m
    return VariantScore(
        variant_id=variant.id,
        score=weighted / total_weight,
        contributions=tuple(contributions),
    )


def observed_ranges(base, query) -> dict:
    """Per queried name, the (min, max) of numeric values seen across the base."""
    ranges = {}
    names = {c.name for c in query}
    for variant in base:
        for name, value in variant.characteristics.items():
            if name in names and _is_number(value):
                lo, hi = ranges.get(name, (value, value))
                ranges[name] = (min(lo, value), max(hi, value))
    return ranges


def select_top_k(base, query, k: int, ordinal_distance: bool = True) -> list:
    """Rank the base against the query and return up to k variants, best first.

    Ties break lexicographically by variant id so rankings are reproducible.
    """
    base = list(base)
    if not base:
        raise ProcessError("cannot select from an empty process base")
    if k < 1:
        raise ProcessError(f"k must be >= 1, got {k}")
    ranges = observed_ranges(base, query)
    scores = [
        score_variant(variant, query, ordinal_distance=ordinal_distance, ranges=ranges)
        for variant in base
    ]
    scores.sort(key=lambda s: (-s.score, s.variant_id))
    return scores[: min(k, len(base))]


def mark_selected(state: SelectionState, variant_id: str) -> SelectionState:
    """Record the interactively chosen variant; reselection is always allowed."""
    if variant_id not in state.cut.members:
        raise NotFoundError(
            f"variant {variant_id!r} is not a member of the cut at level {state.cut.selected_level}"
        )
    return SelectionState(cut=state.cut, selected_variant_id=variant_id)
