import random

import pytest

from bookimpact import metrics
from bookimpact.datamodel import CitationContext, CitingLiterature, Review
from bookimpact.errors import NotADistribution
from bookimpact.ingest import default_aspect_lexicon
from bookimpact.metrics import (
    citation_metrics,
    metric_vector,
    normalized_entropy,
    review_metrics,
    sale_positions,
    toc_breadth,
    toc_depth,
    usage_metrics,
)
from bookimpact.textmine import TopicModel

from oracle import entropy01


# ---------------------------------------------------------------------------
# normalized entropy
# ---------------------------------------------------------------------------


def test_entropy_uniform_is_one():
    for n in range(2, 11):
        assert normalized_entropy([1.0 / n] * n) == pytest.approx(1.0, abs=1e-9)


def test_entropy_degenerate_cases():
    assert normalized_entropy([1.0]) == 0.0
    assert normalized_entropy([1.0, 0.0, 0.0]) == 0.0


def test_entropy_hand_value():
    assert normalized_entropy([0.7, 0.2, 0.1]) == pytest.approx(0.7299, abs=1e-4)


def test_entropy_rejects_non_distributions():
    with pytest.raises(NotADistribution):
        normalized_entropy([0.5, 0.6])
    with pytest.raises(NotADistribution):
        normalized_entropy([1.2, -0.2])
    with pytest.raises(NotADistribution):
        normalized_entropy([])


def test_entropy_permutation_invariance():
    rng = random.Random(42)
    for _ in range(300):
        n = rng.randrange(2, 9)
        raw = [rng.random() + 1e-9 for _ in range(n)]
        total = sum(raw)
        dist = [x / total for x in raw]
        shuffled = dist[:]
        rng.shuffle(shuffled)
        assert normalized_entropy(shuffled) == pytest.approx(
            normalized_entropy(dist), abs=1e-12
        )


def test_entropy_zero_entries_never_change_the_value():
    rng = random.Random(14)
    for _ in range(100):
        n = rng.randrange(2, 7)
        raw = [rng.random() + 1e-9 for _ in range(n)]
        total = sum(raw)
        dist = [x / total for x in raw]
        padded = dist + [0.0] * rng.randrange(1, 4)
        rng.shuffle(padded)
        assert normalized_entropy(padded) == pytest.approx(
            normalized_entropy(dist), abs=1e-12
        )


def test_entropy_agrees_with_independent_oracle():
    rng = random.Random(9)
    for _ in range(100):
        n = rng.randrange(1, 7)
        raw = [rng.random() + 1e-9 for _ in range(n)]
        total = sum(raw)
        dist = [x / total for x in raw]
        assert normalized_entropy(dist) == pytest.approx(entropy01(dist), abs=1e-9)


# ---------------------------------------------------------------------------
# content metrics
# ---------------------------------------------------------------------------


def test_toc_depth_values():
    assert toc_depth(300, 3) == 100.0
    assert toc_depth(200, 1) == 200.0
    assert toc_depth(50, 50) == 1.0


def test_toc_depth_monotonicity():
    assert toc_depth(301, 3) > toc_depth(300, 3)
    assert toc_depth(300, 4) < toc_depth(300, 3)


def test_toc_breadth_values():
    assert toc_breadth([0.5, 0.5]) == pytest.approx(1.0)
    assert toc_breadth([1.0]) == 0.0
    assert toc_breadth([2 / 3, 1 / 3]) == pytest.approx(0.9183, abs=1e-4)


# ---------------------------------------------------------------------------
# review metrics
# ---------------------------------------------------------------------------


def gold_review(rid, star, polarity, aspects=None):
    return Review(
        "b1", rid, star, "text", polarity_label=polarity,
        aspect_labels=tuple(aspects) if aspects is not None else None,
    )


def test_review_metrics_hand_example():
    # Five reviews; aspect mentions Price {+,+,-} and Content {+} via gold labels.
    reviews = (
        gold_review("r1", 5, "Positive", [("Price", 1)]),
        gold_review("r2", 5, "Positive", [("Price", 1), ("Content", 1)]),
        gold_review("r3", 4, "Positive", [("Price", -1)]),
        gold_review("r4", 2, "Negative", []),
        gold_review("r5", 1, "Negative", []),
    )
    pos, neg, star, aspect = review_metrics(
        reviews, None, default_aspect_lexicon(), window=3
    )
    assert pos == 3 and neg == 2
    assert star == pytest.approx(3.4)
    assert aspect == pytest.approx((1 / 3 + 1.0) / 2, abs=1e-4)


def test_review_metrics_empty():
    assert review_metrics((), None, default_aspect_lexicon(), 3) == (None,) * 4


def test_review_metrics_star_only():
    reviews = (Review("b1", "r1", 5, "plain words no aspect"),)
    pos, neg, star, aspect = review_metrics(reviews, None, default_aspect_lexicon(), 3)
    assert star == 5.0
    assert aspect is None
    assert pos + neg == 1  # classified by the star fallback without a model


def test_review_partition_property():
    reviews = tuple(
        Review("b1", f"r{i}", s, "x", polarity_label=p)
        for i, (s, p) in enumerate(
            [(5, "Positive"), (4, None), (1, "Negative"), (2, None), (3, None)]
        )
    )
    pos, neg, _, _ = review_metrics(reviews, None, default_aspect_lexicon(), 3)
    assert pos + neg == len(reviews)


def test_review_star_in_range_property():
    rng = random.Random(8)
    for _ in range(50):
        stars = [rng.randrange(1, 6) for _ in range(rng.randrange(1, 9))]
        reviews = tuple(
            Review("b", f"r{i}", s, "x", polarity_label="Positive")
            for i, s in enumerate(stars)
        )
        _, _, star, _ = review_metrics(reviews, None, default_aspect_lexicon(), 3)
        assert min(stars) <= star <= max(stars)


def test_all_positive_mentions_give_saspect_one():
    reviews = (
        gold_review("r1", 5, "Positive", [("Price", 1), ("Cover", 1)]),
        gold_review("r2", 4, "Positive", [("Price", 1)]),
    )
    *_, aspect = review_metrics(reviews, None, default_aspect_lexicon(), 3)
    assert aspect == 1.0


# ---------------------------------------------------------------------------
# citation metrics
# ---------------------------------------------------------------------------


def lit(lid, intensity, contexts=(), body="alpha beta"):
    return CitingLiterature(
        isbn="b1", lit_id=lid, title=f"study {lid}", year=2010,
        body_text=body, intensity=intensity,
        contexts=tuple(
            CitationContext(lid, "b1", f"ctx {i}", function_label=label)
            for i, label in enumerate(contexts)
        ),
    )


def fake_topic_model(rows, tau=0.25):
    k = len(rows[0])
    return TopicModel(
        topic_count=k, seed=0, alpha=1.0, beta=0.01, iterations=1, tau=tau,
        vocabulary=("alpha", "beta"),
        topic_word=tuple(tuple(1.0 / 2 for _ in range(2)) for _ in range(k)),
        doc_topic=tuple(tuple(row) for row in rows),
    )


def test_citation_metrics_hand_example():
    lits = (
        lit("L1", 1, ["Use"]),
        lit("L2", 2, ["Use"]),
        lit("L3", 6, ["Background"]),
    )
    # Every literature sits on the same two active topics out of four.
    model = fake_topic_model([(0.5, 0.5, 0.0, 0.0)] * 3, tau=0.25)
    index = {("b1", "L1"): 0, ("b1", "L2"): 1, ("b1", "L3"): 2}
    count, depth, breadth, intensity, function = citation_metrics(
        lits, model, index, None, tau=0.25
    )
    assert count == 3
    assert depth == pytest.approx(1.5)
    assert breadth == pytest.approx(1.0)
    assert intensity == pytest.approx(3.0)
    assert function == pytest.approx((3 + 3 + 1) / 3, abs=1e-4)


def test_citation_metrics_uniform_two_topic():
    lits = tuple(lit(f"L{i}", 1) for i in range(4))
    model = fake_topic_model([(0.5, 0.5)] * 4, tau=0.25)
    index = {("b1", f"L{i}"): i for i in range(4)}
    count, depth, breadth, *_ = citation_metrics(lits, model, index, None, tau=0.25)
    assert count == 4 and depth == pytest.approx(2.0) and breadth == pytest.approx(1.0)


def test_citation_metrics_empty():
    assert citation_metrics((), None, None, None) == (None,) * 5


def test_citation_function_all_use_scores_three():
    lits = (lit("L1", 2, ["Use", "Use"]),)
    *_, function = citation_metrics(lits, None, None, None)
    assert function == 3.0


def test_citation_intensity_at_least_one():
    rng = random.Random(3)
    for _ in range(30):
        lits = tuple(
            lit(f"L{i}", rng.randrange(1, 7)) for i in range(rng.randrange(1, 6))
        )
        *_, intensity, _ = citation_metrics(lits, None, None, None)
        assert intensity >= 1.0


def test_length_weighted_citation_mixture():
    # 30-token literature on topic 0, 10-token literature on topic 1:
    # the mixture leans 3:1 toward topic 0.
    lits = (
        lit("L1", 1, body=" ".join(["alpha"] * 30)),
        lit("L2", 1, body=" ".join(["beta"] * 10)),
    )
    model = fake_topic_model([(1.0, 0.0), (0.0, 1.0)], tau=0.05)
    index = {("b1", "L1"): 0, ("b1", "L2"): 1}
    mixture = metrics.citation_topic_distribution(lits, model, index, "whitespace-punct")
    assert mixture == pytest.approx([0.75, 0.25])


# ---------------------------------------------------------------------------
# usage metrics
# ---------------------------------------------------------------------------


def test_usage_metrics_hand_example():
    region, number, dist, sale = usage_metrics({"USA": 15, "CHINA": 5}, 1, 20)
    assert region == 2 and number == 20
    assert dist == pytest.approx(0.8113, abs=1e-4)
    assert sale == 20


def test_usage_single_region():
    region, number, dist, sale = usage_metrics({"USA": 7}, None, 0)
    assert (region, number, dist, sale) == (1, 7, 0.0, None)


def test_usage_absent():
    assert usage_metrics(None, None, 0) == (None,) * 4


def test_sale_positions_identity_on_permutation():
    sales = {"a": 3, "b": 1, "c": 2}
    assert sale_positions(sales) == {"a": 3, "b": 1, "c": 2}


def test_sale_positions_compress_platform_ranks():
    sales = {"a": 5, "b": 17, "c": 300000}
    assert sale_positions(sales) == {"a": 1, "b": 2, "c": 3}


def test_sale_positions_ties_share_position():
    sales = {"a": 1, "b": 1, "c": 3}
    assert sale_positions(sales) == {"a": 1, "b": 1, "c": 2}


# ---------------------------------------------------------------------------
# assembly
# ---------------------------------------------------------------------------


def test_metric_vector_toc_only(fixture_dataset, fixture_models, fixture_config):
    # Rebuild a dataset view where one fixture book keeps only its TOC.
    from dataclasses import replace as drep

    isbn = sorted(fixture_dataset.books)[0]
    stripped = drep(
        fixture_dataset,
        reviews={},
        citing_literatures={},
        holdings={},
        sales={},
    )
    vec = metric_vector(
        isbn, stripped,
        fixture_models.toc_model, fixture_models.toc_index,
        fixture_models.citlit_model, fixture_models.citlit_index,
        fixture_models.sentiment, fixture_models.function,
        positions={}, window=5,
    )
    assert vec.present_metrics() == ("toc_depth", "toc_breadth")
    assert len([m for m in vec.as_dict().values() if m is None]) == 13


def test_metric_vector_empty_toc_book(fixture_state):
    # The authored fixture ships one book without a TOC.
    missing = [
        vec for vec in fixture_state.vectors.values() if not vec.present("toc_depth")
    ]
    assert len(missing) == 1
    assert not fixture_state.dataset.books[missing[0].isbn].toc_text.strip()


def test_vector_presence_tracks_sources(fixture_state):
    ds = fixture_state.dataset
    for isbn, vec in fixture_state.vectors.items():
        assert vec.present("pos_reviews") == bool(ds.reviews.get(isbn))
        assert vec.present("citation_frequency") == bool(
            ds.citing_literatures.get(isbn)
        )
        assert vec.present("holding_number") == (isbn in ds.holdings)
        assert vec.present("sale") == (isbn in ds.sales)
