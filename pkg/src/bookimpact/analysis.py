"""Validation and reporting on top of computed scores.

Rank correlations against expert judgements, the content depth/breadth
conversion estimate, per-discipline score distributions, and the fine-grained
per-book report panel all live here.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from itertools import permutations

import numpy as np
from scipy import stats as scipy_stats

from .datamodel import (
    Dataset,
    FUNCTION_LABELS,
    FUNCTION_SCORES,
    METRIC_IDS,
    NEGATIVE,
    POSITIVE,
)
from .errors import (
    InsufficientData,
    InsufficientOverlap,
    LengthMismatch,
    UnknownBook,
    ZeroVariance,
)
from .metrics import MetricVector, detected_aspects
from .scoring import ImpactScore, normalize, shifted_raw, source_subscore

log = logging.getLogger(__name__)

DEFAULT_SCORE_EDGES = (0.3, 0.4, 0.5, 0.6, 0.7)

# Exact permutation testing is feasible only for tiny samples.
PERMUTATION_TEST_MAX_N = 8


@dataclass(frozen=True)
class CorrelationResult:
    coefficient: float
    n: int
    method: str
    p_value: float | None
    significance: float | None  # 0.01, 0.05 or None

    @property
    def significant(self) -> bool:
        return self.significance is not None


def _average_ranks(values) -> np.ndarray:
    """Ranks 1..n with tied values sharing their average rank."""
    arr = np.asarray(values, dtype=float)
    order = np.argsort(arr, kind="stable")
    ranks = np.empty(len(arr), dtype=float)
    i = 0
    while i < len(arr):
        j = i
        while j + 1 < len(arr) and arr[order[j + 1]] == arr[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def _pearson_coefficient(x: np.ndarray, y: np.ndarray) -> float:
    dx = x - x.mean()
    dy = y - y.mean()
    sx = float(dx @ dx)
    sy = float(dy @ dy)
    if sx == 0.0 or sy == 0.0:
        raise ZeroVariance("constant input")
    return float(dx @ dy) / math.sqrt(sx * sy)


def _significance(r: float, n: int, exact: bool, x=None, y=None, spearman_ranks=False):
    """Two-sided p via the t-approximation with n-2 degrees of freedom.

    ``exact`` switches to full permutation enumeration (tiny n only) for
    fixtures where the t-approximation is meaningless.
    """
    if n <= 2:
        return None, None
    if exact and n <= PERMUTATION_TEST_MAX_N and x is not None and y is not None:
        return _permutation_p(x, y, r, spearman_ranks)
    if abs(r) >= 1.0:
        p = 0.0
    else:
        t = abs(r) * math.sqrt((n - 2) / (1.0 - r * r))
        p = 2.0 * float(scipy_stats.t.sf(t, n - 2))
    return p, _level(p)


def _level(p: float) -> float | None:
    if p <= 0.01:
        return 0.01
    if p <= 0.05:
        return 0.05
    return None


def _permutation_p(x, y, observed: float, spearman_ranks: bool):
    base = _average_ranks(x) if spearman_ranks else np.asarray(x, dtype=float)
    other = _average_ranks(y) if spearman_ranks else np.asarray(y, dtype=float)
    hits = 0
    total = 0
    for perm in permutations(range(len(base))):
        r = _pearson_coefficient(base[list(perm)], other)
        if abs(r) >= abs(observed) - 1e-12:
            hits += 1
        total += 1
    p = hits / total
    return p, _level(p)


def spearman(x, y, exact: bool = False) -> CorrelationResult:
    """Spearman rank correlation with average ranks for ties."""
    if len(x) != len(y):
        raise LengthMismatch(f"{len(x)} vs {len(y)} samples")
    n = len(x)
    if n < 2:
        raise InsufficientData(f"need >= 2 samples, got {n}")
    rx = _average_ranks(x)
    ry = _average_ranks(y)
    rho = _pearson_coefficient(rx, ry)
    p, level = _significance(rho, n, exact, x, y, spearman_ranks=True)
    return CorrelationResult(rho, n, "spearman", p, level)


def pearson(x, y, exact: bool = False) -> CorrelationResult:
    """Product-moment correlation."""
    if len(x) != len(y):
        raise LengthMismatch(f"{len(x)} vs {len(y)} samples")
    n = len(x)
    if n < 2:
        raise InsufficientData(f"need >= 2 samples, got {n}")
    r = _pearson_coefficient(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    p, level = _significance(r, n, exact, x, y, spearman_ranks=False)
    return CorrelationResult(r, n, "pearson", p, level)


# ---------------------------------------------------------------------------
# Expert validation
# ---------------------------------------------------------------------------


def expert_means(dataset: Dataset) -> dict[str, float]:
    """Per-book mean of the 1..5 expert impact judgements."""
    sums: dict[str, list[float]] = {}
    for record in dataset.expert_book_scores:
        sums.setdefault(record.isbn, []).append(record.impact)
    return {isbn: math.fsum(vals) / len(vals) for isbn, vals in sums.items()}


def _paired(
    scores: list[ImpactScore],
    dataset: Dataset,
    discipline: str | None,
    value_of,
) -> tuple[list[float], list[float]]:
    means = expert_means(dataset)
    xs, ys = [], []
    for score in sorted(scores, key=lambda s: s.isbn):
        if score.isbn not in means:
            continue
        if discipline is not None and dataset.books[score.isbn].discipline != discipline:
            continue
        xs.append(value_of(score))
        ys.append(means[score.isbn])
    if len(xs) < 2:
        raise InsufficientOverlap(
            f"only {len(xs)} book(s) carry both an impact score and an expert score"
        )
    return xs, ys


def validate_against_experts(
    scores: list[ImpactScore],
    dataset: Dataset,
    discipline: str | None = None,
    exact: bool = False,
) -> CorrelationResult:
    """Spearman correlation between total scores and expert mean scores."""
    xs, ys = _paired(scores, dataset, discipline, lambda s: s.total)
    return spearman(xs, ys, exact)


def per_source_validation(
    scores: list[ImpactScore],
    dataset: Dataset,
    source: str,
    discipline: str | None = None,
    exact: bool = False,
) -> CorrelationResult:
    """Spearman correlation between one source's subscore and expert means."""
    xs, ys = _paired(scores, dataset, discipline, lambda s: source_subscore(s, source))
    return spearman(xs, ys, exact)


# ---------------------------------------------------------------------------
# Depth / breadth conversion
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConversionEstimate:
    k: float
    pearson_r: float
    spearman_rho: float
    n: int


def depth_breadth_conversion(vectors: dict[str, MetricVector]) -> ConversionEstimate:
    """Least-squares conversion coefficient between the two content metrics.

    Fits normalized breadth as ``-k * normalized depth`` plus an intercept on
    the centered data, and reports both correlation flavours alongside.
    """
    xs, ys = [], []
    for isbn in sorted(vectors):
        vec = vectors[isbn]
        if vec.toc_depth is None or vec.toc_breadth is None:
            continue
        xs.append(normalize(shifted_raw("toc_depth", vec.toc_depth)))
        ys.append(normalize(shifted_raw("toc_breadth", vec.toc_breadth)))
    if len(xs) < 2:
        raise InsufficientData(
            f"need >= 2 books with both content metrics, got {len(xs)}"
        )
    x = np.asarray(xs)
    y = np.asarray(ys)
    dx = x - x.mean()
    var = float(dx @ dx)
    if var == 0.0:
        raise ZeroVariance("normalized depth is constant")
    slope = float(dx @ (y - y.mean())) / var
    return ConversionEstimate(
        k=-slope,
        pearson_r=pearson(xs, ys).coefficient,
        spearman_rho=spearman(xs, ys).coefficient,
        n=len(xs),
    )


# ---------------------------------------------------------------------------
# Discipline distributions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DisciplineRow:
    discipline: str
    counts: tuple[int, ...]
    proportions: tuple[float, ...]
    total: int


@dataclass(frozen=True)
class DisciplineSummary:
    edges: tuple[float, ...]
    rows: tuple[DisciplineRow, ...]
    clamped: tuple[str, ...]  # isbns whose score fell outside the edges

    def labels(self) -> list[str]:
        return [
            f"[{self.edges[i]:g},{self.edges[i + 1]:g})"
            for i in range(len(self.edges) - 1)
        ]


def discipline_summary(
    scores: list[ImpactScore],
    dataset: Dataset,
    edges: tuple[float, ...] = DEFAULT_SCORE_EDGES,
) -> DisciplineSummary:
    """Score histograms per discipline over the configured intervals.

    Scores outside the outer edges clamp into the nearest bin (with a
    warning) rather than being dropped, so counts always partition the books.
    """
    if len(edges) < 2 or any(b <= a for a, b in zip(edges, edges[1:])):
        raise ValueError("edges must be strictly increasing with >= 2 entries")
    n_bins = len(edges) - 1
    # Disciplines with no scored books keep an explicit zero row.
    counts: dict[str, list[int]] = {
        book.discipline: [0] * n_bins for book in dataset.books.values()
    }
    clamped: list[str] = []
    for score in sorted(scores, key=lambda s: s.isbn):
        discipline = dataset.books[score.isbn].discipline
        row = counts.setdefault(discipline, [0] * n_bins)
        idx = None
        for i in range(n_bins):
            if edges[i] <= score.total < edges[i + 1]:
                idx = i
                break
        if idx is None:
            idx = 0 if score.total < edges[0] else n_bins - 1
            clamped.append(score.isbn)
            log.warning(
                "score %.4f of %s outside [%g, %g); clamped into nearest bin",
                score.total, score.isbn, edges[0], edges[-1],
            )
        row[idx] += 1
    rows = []
    for discipline in sorted(counts):
        row = counts[discipline]
        total = sum(row)
        rows.append(
            DisciplineRow(
                discipline=discipline,
                counts=tuple(row),
                proportions=tuple(c / total for c in row) if total else tuple(row),
                total=total,
            )
        )
    return DisciplineSummary(tuple(edges), tuple(rows), tuple(clamped))


# ---------------------------------------------------------------------------
# Fine-grained per-book report
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BookReport:
    isbn: str
    title: str
    discipline: str
    overall_rank: int | None
    total: float
    metric_ranks: dict[str, int | None]
    review_count: int
    polarity_shares: dict[str, float] | None
    star_histogram: dict[int, int] | None
    aspect_scores: dict[str, float] | None
    aspect_mentions: dict[str, int] | None
    most_satisfied_aspect: str | None
    least_satisfied_aspect: str | None
    most_mentioned_aspect: str | None
    least_mentioned_aspect: str | None
    citation_count: int
    intensity_histogram: dict[int, int] | None
    function_shares: dict[str, float] | None
    holdings_by_region: dict[str, int] | None
    sale_rank: int | None


def metric_rank_table(vectors: dict[str, MetricVector]) -> dict[str, dict[str, int]]:
    """Dense best-first rank per metric, over books where it is present."""
    table: dict[str, dict[str, int]] = {}
    for metric_id in METRIC_IDS:
        scored = [
            (vec.value(metric_id), isbn)
            for isbn, vec in vectors.items()
            if vec.present(metric_id)
        ]
        scored.sort(key=lambda pair: (-pair[0], pair[1]))
        ranks: dict[str, int] = {}
        rank = 0
        previous = None
        for value, isbn in scored:
            if previous is None or value != previous:
                rank += 1
                previous = value
            ranks[isbn] = rank
        table[metric_id] = ranks
    return table


def _extreme(stats: dict[str, float], best: bool) -> str | None:
    if not stats:
        return None
    items = sorted(stats.items(), key=lambda kv: (-kv[1], kv[0]) if best else (kv[1], kv[0]))
    return items[0][0]


def book_report(
    isbn: str,
    dataset: Dataset,
    scores: list[ImpactScore],
    vectors: dict[str, MetricVector],
    window: int = 5,
    profile: str = "whitespace-punct",
    function_labels: dict[tuple[str, str, int], str] | None = None,
) -> BookReport:
    """All the per-book panel fields; absent sources surface as None.

    ``function_labels`` optionally carries classifier output for unlabeled
    contexts, keyed by (isbn, lit_id, context position); without it only
    gold-labeled contexts enter the function shares.
    """
    if isbn not in dataset.books:
        raise UnknownBook(isbn)
    book = dataset.books[isbn]
    score = next((s for s in scores if s.isbn == isbn), None)
    ranks = metric_rank_table(vectors)

    reviews = dataset.reviews_of(isbn)
    polarity_shares = star_histogram = None
    aspect_scores = aspect_mentions = None
    if reviews:
        vec = vectors[isbn]
        pos = int(vec.pos_reviews or 0)
        neg = int(vec.neg_reviews or 0)
        classified = pos + neg
        if classified:
            polarity_shares = {
                POSITIVE: pos / classified,
                NEGATIVE: neg / classified,
            }
        star_histogram = {s: 0 for s in range(1, 6)}
        for review in reviews:
            star_histogram[review.star] += 1
        signs: dict[str, list[int]] = {}
        for review in reviews:
            for aspect_id, sign in detected_aspects(
                review, dataset.aspect_lexicon, window, profile
            ):
                signs.setdefault(aspect_id, []).append(sign)
        if signs:
            aspect_scores = {
                a: sum(v) / len(v) for a, v in sorted(signs.items())
            }
            aspect_mentions = {a: len(v) for a, v in sorted(signs.items())}

    literatures = dataset.citations_of(isbn)
    intensity_histogram = function_shares = None
    if literatures:
        intensity_histogram = {}
        for lit in literatures:
            intensity_histogram[lit.intensity] = (
                intensity_histogram.get(lit.intensity, 0) + 1
            )
        intensity_histogram = dict(sorted(intensity_histogram.items()))
        label_counts = {label: 0 for label in FUNCTION_LABELS}
        scored = 0
        for lit in literatures:
            for pos_idx, ctx in enumerate(lit.contexts):
                label = ctx.function_label
                if label is None and function_labels is not None:
                    label = function_labels.get((isbn, lit.lit_id, pos_idx))
                if label in FUNCTION_SCORES:
                    label_counts[label] += 1
                    scored += 1
        if scored:
            function_shares = {
                label: label_counts[label] / scored for label in FUNCTION_LABELS
            }

    holdings = dataset.holdings.get(isbn)
    holdings_by_region = None
    if holdings:
        holdings_by_region = dict(
            sorted(holdings.per_region.items(), key=lambda kv: (-kv[1], kv[0]))
        )

    sale = dataset.sales.get(isbn)

    return BookReport(
        isbn=isbn,
        title=book.title,
        discipline=book.discipline,
        overall_rank=score.rank if score else None,
        total=score.total if score else float("nan"),
        metric_ranks={m: ranks[m].get(isbn) for m in METRIC_IDS},
        review_count=len(reviews),
        polarity_shares=polarity_shares,
        star_histogram=star_histogram,
        aspect_scores=aspect_scores,
        aspect_mentions=aspect_mentions,
        most_satisfied_aspect=_extreme(aspect_scores or {}, best=True),
        least_satisfied_aspect=_extreme(aspect_scores or {}, best=False),
        most_mentioned_aspect=_extreme(
            {a: float(n) for a, n in (aspect_mentions or {}).items()}, best=True
        ),
        least_mentioned_aspect=_extreme(
            {a: float(n) for a, n in (aspect_mentions or {}).items()}, best=False
        ),
        citation_count=len(literatures),
        intensity_histogram=intensity_histogram,
        function_shares=function_shares,
        holdings_by_region=holdings_by_region,
        sale_rank=sale.sale_rank if sale else None,
    )


def report_to_payload(report: BookReport) -> dict:
    """JSON-ready view of a book report (shared by CLI and HTTP service)."""
    return {
        "isbn": report.isbn,
        "title": report.title,
        "discipline": report.discipline,
        "overall_rank": report.overall_rank,
        "total": None if math.isnan(report.total) else report.total,
        "metric_ranks": report.metric_ranks,
        "review_count": report.review_count,
        "polarity_shares": report.polarity_shares,
        "star_histogram": (
            {str(k): v for k, v in report.star_histogram.items()}
            if report.star_histogram is not None
            else None
        ),
        "aspect_scores": report.aspect_scores,
        "aspect_mentions": report.aspect_mentions,
        "most_satisfied_aspect": report.most_satisfied_aspect,
        "least_satisfied_aspect": report.least_satisfied_aspect,
        "most_mentioned_aspect": report.most_mentioned_aspect,
        "least_mentioned_aspect": report.least_mentioned_aspect,
        "citation_count": report.citation_count,
        "intensity_histogram": (
            {str(k): v for k, v in report.intensity_histogram.items()}
            if report.intensity_histogram is not None
            else None
        ),
        "function_shares": report.function_shares,
        "holdings_by_region": report.holdings_by_region,
        "sale_rank": report.sale_rank,
    }


def render_report(report: BookReport) -> str:
    """Plain-text panel rendering of a book report."""
    lines = [
        f"{report.title} ({report.isbn})",
        f"discipline: {report.discipline}   "
        f"impact rank: {report.overall_rank if report.overall_rank else 'n/a'}   "
        f"score: {report.total:.4f}",
        "",
        "metric ranks:",
    ]
    for metric_id in METRIC_IDS:
        rank = report.metric_ranks[metric_id]
        lines.append(f"  {metric_id:<22} {rank if rank is not None else 'no data'}")

    lines.append("")
    if report.review_count:
        lines.append(f"reviews ({report.review_count}):")
        if report.polarity_shares:
            pos = report.polarity_shares[POSITIVE]
            neg = report.polarity_shares[NEGATIVE]
            lines.append(f"  positive {pos:.0%} / negative {neg:.0%}")
        stars = " ".join(
            f"{s}*:{report.star_histogram[s]}" for s in range(1, 6)
        )
        lines.append(f"  stars  {stars}")
        if report.aspect_scores:
            lines.append(
                f"  most satisfied aspect: {report.most_satisfied_aspect}"
                f"   least satisfied: {report.least_satisfied_aspect}"
            )
            lines.append(
                f"  most mentioned aspect: {report.most_mentioned_aspect}"
                f"   least mentioned: {report.least_mentioned_aspect}"
            )
        else:
            lines.append("  aspects: no data")
    else:
        lines.append("reviews: no data")

    lines.append("")
    if report.citation_count:
        lines.append(f"citations ({report.citation_count}):")
        intensity = " ".join(
            f"{k}x:{v}" for k, v in report.intensity_histogram.items()
        )
        lines.append(f"  intensity  {intensity}")
        if report.function_shares:
            shares = "  ".join(
                f"{label} {report.function_shares[label]:.0%}"
                for label in FUNCTION_LABELS
            )
            lines.append(f"  functions  {shares}")
        else:
            lines.append("  functions: no data")
    else:
        lines.append("citations: no data")

    lines.append("")
    if report.holdings_by_region:
        holdings = "  ".join(
            f"{region}:{count}" for region, count in report.holdings_by_region.items()
        )
        lines.append(f"holdings  {holdings}")
    else:
        lines.append("holdings: no data")
    lines.append(
        f"sale rank: {report.sale_rank if report.sale_rank is not None else 'no data'}"
    )
    return "\n".join(lines) + "\n"
