import random

import pytest
from hypothesis import given, strategies as st

from testalloc.domain import (
    Allocation,
    Area,
    Region,
    ScoreTriple,
    Weights,
    validate_region,
)
from helpers import mk_area, mk_region


def valid_one_area_region():
    return mk_region(
        [mk_area("a0", 0.0, 0.0, 100, {("A",): 60, ("B",): 40})],
        axes=(("group", ("A", "B")),),
    )


def test_valid_region_has_empty_report():
    assert validate_region(valid_one_area_region()) == []


def test_stratum_sum_mismatch_detected():
    region = mk_region(
        [mk_area("a0", 0.0, 0.0, 100, {("A",): 60, ("B",): 30})],
        axes=(("group", ("A", "B")),),
    )
    report = validate_region(region)
    assert len(report) == 1
    assert "stratum sum mismatch" in report[0].reason
    assert report[0].where == "a0"


def test_duplicate_area_ids_detected():
    region = mk_region([mk_area("a0", 0.0, 0.0, 10), mk_area("a0", 1.0, 0.0, 20)])
    reasons = [v.reason for v in validate_region(region)]
    assert "duplicate id" in reasons


def test_empty_region_detected():
    assert any(v.reason == "no areas" for v in validate_region(mk_region([])))


def test_unknown_stratum_combo_detected():
    region = mk_region(
        [mk_area("a0", 0.0, 0.0, 10, {("C",): 10})],
        axes=(("group", ("A", "B")),),
    )
    assert any("unknown stratum combination" in v.reason for v in validate_region(region))


def test_counts_without_axes_detected():
    region = mk_region([mk_area("a0", 0.0, 0.0, 10, {("A",): 10})])
    assert any("no stratum axes" in v.reason for v in validate_region(region))


def test_validation_is_idempotent():
    region = mk_region(
        [mk_area("a0", 0.0, 0.0, 100, {("A",): 99}), mk_area("a0", 1.0, 0.0, -3)],
        axes=(("group", ("A", "B")),),
    )
    assert validate_region(region) == validate_region(region)


# Random violating mutations must always be detected.
@given(st.integers(min_value=0, max_value=10_000), st.sampled_from(
    ["negative_pop", "bad_sum", "dup_id", "negative_count", "bad_combo"]))
def test_random_mutations_detected(seed, mutation):
    rng = random.Random(seed)
    pop = rng.randint(1, 1000)
    a_count = rng.randint(0, pop)
    good = [
        mk_area("a0", 0.0, 0.0, pop, {("A",): a_count, ("B",): pop - a_count}),
        mk_area("a1", 1.0, 2.0, 50, {("A",): 25, ("B",): 25}),
    ]
    axes = (("group", ("A", "B")),)
    assert validate_region(mk_region(good, axes)) == []

    if mutation == "negative_pop":
        bad = [Area("a0", (0.0, 0.0), -pop - 1, good[0].stratum_counts), good[1]]
    elif mutation == "bad_sum":
        bad = [mk_area("a0", 0.0, 0.0, pop, {("A",): a_count, ("B",): pop - a_count + 1}), good[1]]
    elif mutation == "dup_id":
        bad = [good[0], mk_area("a0", 1.0, 2.0, 50, {("A",): 25, ("B",): 25})]
    elif mutation == "negative_count":
        bad = [mk_area("a0", 0.0, 0.0, pop, {("A",): -1, ("B",): pop + 1}), good[1]]
    else:
        bad = [mk_area("a0", 0.0, 0.0, pop, {("A", "X"): pop}), good[1]]
    assert validate_region(mk_region(bad, axes)) != []


def test_allocation_of_deduplicates():
    alloc = Allocation.of([1, 1, 2], budget=3)
    assert alloc.selected == frozenset({1, 2})
    assert alloc.size == 2
    assert alloc.indices == (1, 2)


def test_weights_reject_negative():
    with pytest.raises(ValueError):
        Weights(lambda1=-1.0)


def test_weights_range_warnings():
    assert Weights(1e-2, 0.0, 1.0).range_warnings() == []
    warns = Weights(1e-9, 0.0, 1e7).range_warnings()
    assert len(warns) == 2
    # zero disables a criterion and is never flagged
    assert Weights(0.0, 0.0, 0.0).range_warnings() == []


def test_score_triple_holds_skipped_f2():
    t = ScoreTriple(coverage=3, d_optimality=None, equity=0.25)
    assert t.d_optimality is None


def test_region_helpers():
    region = valid_one_area_region()
    assert region.m == 1
    assert region.total_population() == 100
    assert region.stratum_combos() == [("A",), ("B",)]
    assert region.bounding_box_diagonal() == 0.0
