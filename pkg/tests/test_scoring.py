import math
import random
from dataclasses import replace

import pytest

from bookimpact import scoring
from bookimpact.ahp import WeightHierarchy, hierarchy_from_global, reference_weights
from bookimpact.datamodel import GROUP_IDS, METRIC_GROUPS, METRIC_IDS
from bookimpact.errors import NegativeInput, NoPresentMetrics
from bookimpact.metrics import MetricVector
from bookimpact.scoring import (
    impact_score,
    normalize,
    rank_books,
    shifted_raw,
    source_subscore,
    with_total_ranks,
)

from oracle import oracle_total


def test_normalize_anchor_values():
    assert normalize(0.0) == 0.0
    assert normalize(1.0) == pytest.approx(0.5)
    assert normalize(100.0) == pytest.approx(0.99363, abs=1e-5)


def test_normalize_rejects_negative():
    with pytest.raises(NegativeInput):
        normalize(-0.1)


def test_normalize_strictly_monotone_and_bounded():
    rng = random.Random(6)
    for _ in range(1000):
        a = rng.uniform(0, 500)
        b = a + rng.uniform(1e-9, 50)
        na, nb = normalize(a), normalize(b)
        assert nb > na
        assert 0.0 <= na < 1.0 and 0.0 <= nb < 1.0


def test_shifted_raw_moves_aspect_satisfaction():
    assert shifted_raw("aspect_satisfaction", -1.0) == 0.0
    assert shifted_raw("aspect_satisfaction", 1.0) == 1.0
    assert shifted_raw("star_rating", 4.2) == 4.2


def test_shifted_raw_applies_divisors():
    assert shifted_raw("pos_reviews", 50.0, {"pos_reviews": 10.0}) == 5.0
    assert shifted_raw("pos_reviews", 50.0, {}) == 50.0


def two_metric_weights() -> WeightHierarchy:
    # Near-degenerate hierarchy: 0.6/0.4 on the content pair, dust elsewhere.
    values = {m: 1e-12 for m in METRIC_IDS}
    values["toc_depth"] = 0.6
    values["toc_breadth"] = 0.4
    return hierarchy_from_global(values, provenance="custom")


def vector(**values) -> MetricVector:
    return MetricVector(isbn=values.pop("isbn", "b1"), **values)


def test_weighted_sum_toy_example():
    raw_half = math.tan(0.5 * math.pi / 2)     # normalizes to 0.50
    raw_quarter = math.tan(0.25 * math.pi / 2)  # normalizes to 0.25
    score = impact_score(
        vector(toc_depth=raw_half, toc_breadth=raw_quarter),
        two_metric_weights(),
        policy="zero",
    )
    assert score.total == pytest.approx(0.6 * 0.5 + 0.4 * 0.25, abs=1e-9)


def test_all_absent_zero_fill_scores_zero():
    score = impact_score(vector(), reference_weights(), policy="zero")
    assert score.total == 0.0
    assert all(v == 0.0 for v in score.subscores.values())


def test_all_absent_renormalize_rejected():
    with pytest.raises(NoPresentMetrics):
        impact_score(vector(), reference_weights(), policy="renorm")


def test_review_only_book_decomposition():
    score = impact_score(
        vector(pos_reviews=4.0, neg_reviews=1.0, star_rating=4.2, aspect_satisfaction=0.5),
        reference_weights(),
        policy="zero",
    )
    assert score.subscores["reviews"] == pytest.approx(score.total, abs=1e-12)
    for group in ("contents", "citations", "usages"):
        assert score.subscores[group] == 0.0


def test_uniform_case_subscores_proportional_to_group_size():
    weights = hierarchy_from_global({m: 1.0 for m in METRIC_IDS}, "custom")
    common_raw = 1.0  # every metric normalizes to 0.5
    values = {m: common_raw for m in METRIC_IDS}
    values["aspect_satisfaction"] = 2 * common_raw - 1  # shift lands back on 1.0
    score = impact_score(vector(**values), weights, policy="zero")
    for group in GROUP_IDS:
        share = len(METRIC_GROUPS[group]) / len(METRIC_IDS)
        assert score.subscores[group] == pytest.approx(0.5 * share, abs=1e-12)


def complete_vector(seed=0) -> MetricVector:
    rng = random.Random(seed)
    values = {}
    for metric in METRIC_IDS:
        values[metric] = rng.uniform(0.0, 30.0)
    values["aspect_satisfaction"] = rng.uniform(-1.0, 1.0)
    return vector(**values)


def test_policies_agree_on_complete_books():
    weights = reference_weights()
    for seed in range(20):
        vec = complete_vector(seed)
        zero = impact_score(vec, weights, "zero")
        renorm = impact_score(vec, weights, "renorm")
        assert zero.total == pytest.approx(renorm.total, abs=1e-12)
        for group in GROUP_IDS:
            assert zero.subscores[group] == pytest.approx(
                renorm.subscores[group], abs=1e-12
            )


def test_subscore_additivity_fixture(fixture_state):
    for score in fixture_state.scores:
        assert math.fsum(score.subscores.values()) == pytest.approx(
            score.total, abs=1e-9
        )


def test_fixture_scores_match_sum_of_products_oracle(fixture_state):
    weights = fixture_state.weights.global_weights
    for isbn, vec in fixture_state.vectors.items():
        expected, _ = oracle_total(vec.as_dict(), weights, "zero")
        got = fixture_state.score_of(isbn)
        assert got.total == pytest.approx(expected, abs=1e-9)


def scaled_hierarchy(base: WeightHierarchy, c: float) -> WeightHierarchy:
    return WeightHierarchy(
        primary_weights={g: c * w for g, w in base.primary_weights.items()},
        within_group_weights=base.within_group_weights,
        global_weights={m: c * w for m, w in base.global_weights.items()},
        consistency={},
        provenance="custom",
    )


def test_rank_invariance_under_weight_scaling():
    weights = reference_weights()
    vectors = [complete_vector(seed) for seed in range(12)]
    vectors = [replace(v, isbn=f"b{i}") for i, v in enumerate(vectors)]
    baseline = rank_books(
        [impact_score(v, weights, "zero") for v in vectors], "total"
    )
    base_order = [(rank, s.isbn) for rank, s in baseline]
    for c in (0.5, 2.0, 10.0):
        scaled = scaled_hierarchy(weights, c)
        ranked = rank_books(
            [impact_score(v, scaled, "zero") for v in vectors], "total"
        )
        assert [(rank, s.isbn) for rank, s in ranked] == base_order


def test_monotone_single_metric_improvement():
    rng = random.Random(99)
    weights = reference_weights()
    for _ in range(100):
        vec = complete_vector(rng.randrange(10_000))
        metric = rng.choice(METRIC_IDS)
        before = impact_score(vec, weights, "zero")
        bump = rng.uniform(0.05, 2.0)
        value = vec.value(metric) + bump
        if metric == "aspect_satisfaction":
            value = min(value, 1.0)
            if value <= vec.value(metric):
                continue
        improved = impact_score(replace(vec, **{metric: value}), weights, "zero")
        assert improved.total > before.total


def test_rank_books_tie_rule():
    weights = reference_weights()

    def fake(isbn, total):
        return scoring.ImpactScore(
            isbn=isbn, normalized={}, subscores={g: 0.0 for g in GROUP_IDS},
            total=total, policy="zero", weights_provenance=weights.provenance,
        )

    ranked = rank_books([fake("A", 0.5), fake("B", 0.7), fake("C", 0.5)], "total")
    assert [(r, s.isbn) for r, s in ranked] == [(1, "B"), (2, "A"), (2, "C")]


def test_rank_single_book():
    score = impact_score(complete_vector(), reference_weights(), "zero")
    assert rank_books([score])[0][0] == 1


def test_with_total_ranks(fixture_state):
    ranks = {s.isbn: s.rank for s in fixture_state.scores}
    recomputed = with_total_ranks(list(fixture_state.scores))
    assert {s.isbn: s.rank for s in recomputed} == ranks
    assert sorted(ranks.values())[0] == 1


def test_source_subscore_validates_group(fixture_state):
    score = fixture_state.scores[0]
    assert source_subscore(score, "reviews") == score.subscores["reviews"]
    with pytest.raises(ValueError):
        source_subscore(score, "sales")


def test_score_range_with_normalized_weights(fixture_state):
    for score in fixture_state.scores:
        assert 0.0 <= score.total < 1.0


def test_export_shape(fixture_state):
    header = scoring.export_header()
    rows = scoring.export_rows(fixture_state.scores)
    assert header[0] == "isbn" and header[-1] == "rank"
    assert len(header) == 1 + 15 + 4 + 2
    assert len(rows) == len(fixture_state.scores)
    assert all(len(row) == len(header) for row in rows)
