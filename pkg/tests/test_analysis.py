import math
import random

import pytest
from scipy import stats as scipy_stats

from bookimpact.analysis import (
    book_report,
    depth_breadth_conversion,
    discipline_summary,
    metric_rank_table,
    pearson,
    per_source_validation,
    render_report,
    report_to_payload,
    spearman,
    validate_against_experts,
)
from bookimpact.datamodel import (
    BookRecord,
    Dataset,
    ExpertBookScore,
    GROUP_IDS,
    METRIC_IDS,
    Review,
)
from bookimpact.errors import (
    InsufficientData,
    InsufficientOverlap,
    LengthMismatch,
    UnknownBook,
    ZeroVariance,
)
from bookimpact.ingest import default_aspect_lexicon
from bookimpact.metrics import MetricVector
from bookimpact.scoring import ImpactScore


# ---------------------------------------------------------------------------
# correlations
# ---------------------------------------------------------------------------


def test_spearman_perfect_monotone():
    assert spearman([1, 2, 3], [10, 20, 30]).coefficient == pytest.approx(1.0)
    assert spearman([1, 2, 3], [3, 2, 1]).coefficient == pytest.approx(-1.0)


def test_spearman_average_ranks_for_ties():
    # Ranks of x are 1, 2.5, 2.5, 4 under average ranking; value frozen from
    # an independent run of scipy.stats.spearmanr on the same pairs.
    result = spearman([1, 2, 2, 4], [1, 3, 2, 4])
    assert result.coefficient == pytest.approx(0.9486832980505138, abs=1e-9)
    expected = scipy_stats.spearmanr([1, 2, 2, 4], [1, 3, 2, 4]).statistic
    assert result.coefficient == pytest.approx(float(expected), abs=1e-12)


def test_spearman_matches_scipy_on_random_tied_data():
    rng = random.Random(17)
    for _ in range(100):
        n = rng.randrange(3, 30)
        x = [rng.randrange(0, 8) for _ in range(n)]
        y = [rng.randrange(0, 8) for _ in range(n)]
        try:
            ours = spearman(x, y)
        except ZeroVariance:
            assert len(set(x)) == 1 or len(set(y)) == 1
            continue
        expected = scipy_stats.spearmanr(x, y)
        assert ours.coefficient == pytest.approx(float(expected.statistic), abs=1e-9)


def test_pearson_hand_cases():
    x = [0.5, 1.0, 4.0, 9.0]
    assert pearson(x, [2 * v for v in x]).coefficient == pytest.approx(1.0)
    assert pearson(x, [-v for v in x]).coefficient == pytest.approx(-1.0)
    assert pearson([1, 2, 3, 4], [2, 1, 4, 3]).coefficient == pytest.approx(0.6, abs=1e-6)


def test_correlation_errors():
    with pytest.raises(LengthMismatch):
        spearman([1, 2], [1, 2, 3])
    with pytest.raises(InsufficientData):
        pearson([1], [2])
    with pytest.raises(ZeroVariance):
        spearman([1, 1, 1], [1, 2, 3])


def test_spearman_rank_invariance_under_monotone_transforms():
    rng = random.Random(31)
    for _ in range(100):
        n = rng.randrange(4, 25)
        x = [rng.uniform(0, 10) for _ in range(n)]
        y = [rng.uniform(0, 10) for _ in range(n)]
        base = spearman(x, y).coefficient
        fx = [math.exp(0.3 * v) for v in x]          # strictly increasing
        gy = [v ** 3 + 2 * v for v in y]             # strictly increasing
        assert spearman(fx, gy).coefficient == pytest.approx(base, abs=1e-9)


def test_spearman_equals_pearson_on_untied_ranks():
    rng = random.Random(5)
    for _ in range(30):
        n = rng.randrange(3, 12)
        rx = list(range(1, n + 1))
        ry = list(range(1, n + 1))
        rng.shuffle(rx)
        rng.shuffle(ry)
        assert spearman(rx, ry).coefficient == pytest.approx(
            pearson(rx, ry).coefficient, abs=1e-12
        )


def test_significance_flags():
    rng = random.Random(2)
    n = 40
    x = [rng.uniform(0, 1) for _ in range(n)]
    y = [v + rng.uniform(-0.05, 0.05) for v in x]  # strong correlation
    strong = spearman(x, y)
    assert strong.significance == 0.01
    noise = [rng.uniform(0, 1) for _ in range(n)]
    weak = spearman(x, noise)
    assert weak.p_value is not None and weak.p_value > 0.05
    assert weak.significance is None


def test_exact_permutation_p_small_sample():
    result = spearman([1, 2, 3, 4, 5], [1, 2, 3, 5, 4], exact=True)
    assert result.p_value is not None and 0.0 < result.p_value <= 1.0


# ---------------------------------------------------------------------------
# expert validation
# ---------------------------------------------------------------------------


def tiny_dataset(n=5, disciplines=("Law",)) -> Dataset:
    books = {}
    for i in range(n):
        isbn = f"b{i}"
        books[isbn] = BookRecord(
            isbn, f"Book {i}", disciplines[i % len(disciplines)], 100, "toc"
        )
    return Dataset(
        books=books,
        reviews={},
        citing_literatures={},
        holdings={},
        sales={},
        expert_metric_ratings=(),
        expert_book_scores=tuple(
            ExpertBookScore("r1", f"b{i}", (i % 5) + 1) for i in range(n)
        ),
        aspect_lexicon=default_aspect_lexicon(),
    )


def fake_score(isbn, total, subscores=None) -> ImpactScore:
    return ImpactScore(
        isbn=isbn,
        normalized={},
        subscores=subscores or {g: total / 4 for g in GROUP_IDS},
        total=total,
        policy="zero",
        weights_provenance="custom",
    )


def test_expert_validation_perfect_agreement():
    ds = tiny_dataset()
    scores = [fake_score(f"b{i}", 0.1 * ((i % 5) + 1)) for i in range(5)]
    assert validate_against_experts(scores, ds).coefficient == pytest.approx(1.0)


def test_expert_validation_anti_ordered():
    ds = tiny_dataset()
    scores = [fake_score(f"b{i}", 0.1 * (5 - (i % 5))) for i in range(5)]
    assert validate_against_experts(scores, ds).coefficient == pytest.approx(-1.0)


def test_expert_validation_needs_overlap():
    ds = tiny_dataset()
    with pytest.raises(InsufficientOverlap):
        validate_against_experts([fake_score("zzz", 0.5)], ds)


def test_per_source_validation_usage_only_varies():
    ds = tiny_dataset()
    scores = []
    for i in range(5):
        subscores = {g: 0.05 for g in GROUP_IDS}
        subscores["usages"] = 0.1 * ((i % 5) + 1)
        scores.append(fake_score(f"b{i}", sum(subscores.values()), subscores))
    assert per_source_validation(scores, ds, "usages").coefficient == pytest.approx(1.0)
    for other in ("contents", "reviews", "citations"):
        with pytest.raises(ZeroVariance):
            per_source_validation(scores, ds, other)


def test_discipline_filter(fixture_state):
    result = validate_against_experts(
        fixture_state.scores, fixture_state.dataset, "Law"
    )
    law_books = [
        isbn
        for isbn, book in fixture_state.dataset.books.items()
        if book.discipline == "Law"
    ]
    assert result.n <= len(law_books)
    assert -1.0 <= result.coefficient <= 1.0


# ---------------------------------------------------------------------------
# depth/breadth conversion
# ---------------------------------------------------------------------------


def content_vector(isbn, depth, breadth):
    return MetricVector(isbn=isbn, toc_depth=depth, toc_breadth=breadth)


def test_conversion_exact_linear_anti_relation():
    # Arrange normalized breadth = -0.5 * normalized depth + 0.6 exactly.
    vectors = {}
    for i, nors_depth in enumerate([0.1, 0.3, 0.5, 0.7]):
        raw_depth = math.tan(nors_depth * math.pi / 2)
        nors_breadth = -0.5 * nors_depth + 0.6
        raw_breadth = math.tan(nors_breadth * math.pi / 2)
        vectors[f"b{i}"] = content_vector(f"b{i}", raw_depth, raw_breadth)
    estimate = depth_breadth_conversion(vectors)
    assert estimate.k == pytest.approx(0.5, abs=1e-9)
    assert estimate.pearson_r == pytest.approx(-1.0, abs=1e-9)
    assert estimate.n == 4


def test_conversion_uncorrelated_data():
    rng = random.Random(77)
    vectors = {
        f"b{i}": content_vector(f"b{i}", rng.uniform(1, 400), rng.uniform(0.01, 0.99))
        for i in range(200)
    }
    estimate = depth_breadth_conversion(vectors)
    assert abs(estimate.pearson_r) < 0.2


def test_conversion_errors():
    with pytest.raises(InsufficientData):
        depth_breadth_conversion({"b0": content_vector("b0", 10, 0.5)})
    constant = {
        f"b{i}": content_vector(f"b{i}", 10.0, 0.1 * i) for i in range(3)
    }
    with pytest.raises(ZeroVariance):
        depth_breadth_conversion(constant)


# ---------------------------------------------------------------------------
# discipline summary
# ---------------------------------------------------------------------------


def test_summary_single_bin():
    ds = tiny_dataset(4)
    scores = [fake_score(f"b{i}", 0.45) for i in range(4)]
    summary = discipline_summary(scores, ds)
    row = summary.rows[0]
    assert row.counts == (0, 4, 0, 0)
    assert row.proportions[1] == 1.0
    assert summary.clamped == ()


def test_summary_zero_row_for_unscored_discipline():
    ds = tiny_dataset(4, disciplines=("Law", "Medicine"))
    scores = [fake_score("b0", 0.45), fake_score("b2", 0.55)]  # Law books only
    summary = discipline_summary(scores, ds)
    rows = {r.discipline: r for r in summary.rows}
    assert rows["Medicine"].counts == (0, 0, 0, 0)
    assert rows["Medicine"].total == 0


def test_summary_clamps_out_of_range():
    ds = tiny_dataset(2)
    scores = [fake_score("b0", 0.05), fake_score("b1", 0.95)]
    summary = discipline_summary(scores, ds)
    row = summary.rows[0]
    assert row.counts == (1, 0, 0, 1)
    assert set(summary.clamped) == {"b0", "b1"}


def test_summary_partitions_scores(fixture_state):
    summary = discipline_summary(
        fixture_state.scores, fixture_state.dataset, fixture_state.config.score_edges
    )
    assert sum(sum(r.counts) for r in summary.rows) == len(fixture_state.scores)


# ---------------------------------------------------------------------------
# book report
# ---------------------------------------------------------------------------


def report_dataset():
    books = {
        "b1": BookRecord("b1", "Subject", "Law", 100, "toc"),
        "b2": BookRecord("b2", "Other", "Law", 100, "toc"),
    }
    reviews = {
        "b1": (
            Review("b1", "r1", 5, "", aspect_labels=(("Price", 1),)),
            Review("b1", "r2", 4, "", aspect_labels=(("Price", 1), ("Printing", 1))),
            Review("b1", "r3", 2, "", aspect_labels=(("Price", -1),)),
        )
    }
    return Dataset(
        books=books,
        reviews=reviews,
        citing_literatures={},
        holdings={},
        sales={},
        expert_metric_ratings=(),
        expert_book_scores=(),
        aspect_lexicon=default_aspect_lexicon(),
    )


def test_report_aspect_extremes():
    ds = report_dataset()
    vectors = {
        "b1": MetricVector(isbn="b1", pos_reviews=2.0, neg_reviews=1.0, star_rating=11 / 3),
        "b2": MetricVector(isbn="b2"),
    }
    scores = [fake_score("b1", 0.5), fake_score("b2", 0.3)]
    report = book_report("b1", ds, scores, vectors)
    assert report.most_satisfied_aspect == "Printing"
    assert report.least_satisfied_aspect == "Price"
    assert report.most_mentioned_aspect == "Price"
    assert report.aspect_scores["Price"] == pytest.approx(1 / 3, abs=1e-4)
    assert report.aspect_scores["Printing"] == 1.0
    assert report.polarity_shares["Positive"] == pytest.approx(2 / 3)
    assert sum(report.polarity_shares.values()) == pytest.approx(1.0, abs=1e-6)
    assert report.star_histogram == {1: 0, 2: 1, 3: 0, 4: 1, 5: 1}


def test_report_no_reviews_marks_no_data():
    ds = report_dataset()
    vectors = {"b1": MetricVector(isbn="b1"), "b2": MetricVector(isbn="b2")}
    scores = [fake_score("b1", 0.5), fake_score("b2", 0.3)]
    report = book_report("b2", ds, scores, vectors)
    assert report.polarity_shares is None
    assert report.star_histogram is None
    assert report.citation_count == 0
    text = render_report(report)
    assert "reviews: no data" in text
    assert "citations: no data" in text
    assert "holdings: no data" in text


def test_report_unknown_book():
    ds = report_dataset()
    with pytest.raises(UnknownBook):
        book_report("nope", ds, [], {})


def test_metric_ranks_agree_with_per_metric_ordering(fixture_state):
    table = metric_rank_table(fixture_state.vectors)
    for metric in METRIC_IDS:
        present = [
            (isbn, vec.value(metric))
            for isbn, vec in fixture_state.vectors.items()
            if vec.present(metric)
        ]
        expected_order = sorted(present, key=lambda p: (-p[1], p[0]))
        # Dense best-first ranking recomputed independently.
        rank, previous = 0, None
        for isbn, value in expected_order:
            if previous is None or value != previous:
                rank += 1
                previous = value
            assert table[metric][isbn] == rank
        absent = set(fixture_state.vectors) - {isbn for isbn, _ in present}
        for isbn in absent:
            assert isbn not in table[metric]


def test_fixture_report_shares_sum_to_one(fixture_state):
    st = fixture_state
    for isbn in st.dataset.books:
        report = book_report(
            isbn, st.dataset, st.scores, st.vectors,
            window=st.config.aspect_window,
            profile=st.config.tokenizer_profile,
            function_labels=st.function_labels,
        )
        if report.polarity_shares is not None:
            assert sum(report.polarity_shares.values()) == pytest.approx(1.0, abs=1e-6)
        if report.function_shares is not None:
            assert sum(report.function_shares.values()) == pytest.approx(1.0, abs=1e-6)
        payload = report_to_payload(report)
        assert payload["isbn"] == isbn
        assert set(payload["metric_ranks"]) == set(METRIC_IDS)


def test_report_rank_matches_scores(fixture_state):
    st = fixture_state
    best = min(st.scores, key=lambda s: s.rank)
    report = book_report(
        best.isbn, st.dataset, st.scores, st.vectors,
        function_labels=st.function_labels,
    )
    assert report.overall_rank == best.rank
    assert report.total == pytest.approx(best.total)
