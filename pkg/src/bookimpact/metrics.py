"""Raw metric values per book: two content, four review, five citation and
four usage metrics.

All operations are pure functions of the dataset snapshot and the fitted
text models.  A metric is *absent* exactly when the evidence it needs is
empty; absence is encoded as ``None`` on the metric vector and consumed by
the missing-data policies in the scoring layer.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, fields

from .datamodel import (
    CitingLiterature,
    Dataset,
    FUNCTION_SCORES,
    METRIC_IDS,
    NEGATIVE,
    POSITIVE,
    Review,
)
from .errors import NotADistribution
from . import textmine
from .textmine import (
    AspectLexicon,
    FunctionClassifier,
    SentimentModel,
    TopicModel,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class MetricVector:
    """The fifteen raw metric values of one book; ``None`` marks absence."""

    isbn: str
    toc_depth: float | None = None
    toc_breadth: float | None = None
    pos_reviews: float | None = None
    neg_reviews: float | None = None
    star_rating: float | None = None
    aspect_satisfaction: float | None = None
    citation_frequency: float | None = None
    citlit_depth: float | None = None
    citlit_breadth: float | None = None
    citation_intensity: float | None = None
    citation_function: float | None = None
    holding_number: float | None = None
    holding_region: float | None = None
    holding_distribution: float | None = None
    sale: float | None = None

    def value(self, metric_id: str) -> float | None:
        return getattr(self, metric_id)

    def present(self, metric_id: str) -> bool:
        return getattr(self, metric_id) is not None

    def present_metrics(self) -> tuple[str, ...]:
        return tuple(m for m in METRIC_IDS if self.present(m))

    def as_dict(self) -> dict[str, float | None]:
        return {m: getattr(self, m) for m in METRIC_IDS}


assert all(m in {f.name for f in fields(MetricVector)} for m in METRIC_IDS)


# ---------------------------------------------------------------------------
# Shared entropy kernel
# ---------------------------------------------------------------------------


def normalized_entropy(distribution) -> float:
    """Shannon entropy of a probability vector, scaled by 1/ln(n) into [0, 1].

    ``n`` counts the positive-support entries, so zero entries contribute
    nothing at all: padding a vector with zeros never moves the value.
    Vectors uniform over their support score exactly 1; a point mass (and
    the single-entry vector) scores 0 by convention, no diversity.
    """
    values = [float(p) for p in distribution]
    if not values:
        raise NotADistribution("empty vector")
    if any(p < 0.0 for p in values):
        raise NotADistribution("negative entry")
    total = math.fsum(values)
    if abs(total - 1.0) > 1e-9:
        raise NotADistribution(f"entries sum to {total!r}, not 1")
    support = [p for p in values if p > 0.0]
    if len(support) <= 1:
        return 0.0
    h = -math.fsum(p * math.log(p) for p in support)
    return h / math.log(len(support))


# ---------------------------------------------------------------------------
# Content metrics
# ---------------------------------------------------------------------------


def toc_depth(pages: int, topic_count: int) -> float:
    """Pages per expressed topic: fewer topics over more pages means deeper."""
    if pages < 1:
        raise ValueError(f"pages must be >= 1, got {pages}")
    if topic_count < 1:
        raise ValueError(f"topic_count must be >= 1, got {topic_count}")
    return pages / topic_count


def toc_breadth(restricted) -> float:
    """Normalized entropy of the restricted active-topic distribution."""
    return normalized_entropy(restricted)


# ---------------------------------------------------------------------------
# Review metrics
# ---------------------------------------------------------------------------


def review_metrics(
    reviews: tuple[Review, ...],
    sentiment: SentimentModel | None,
    lexicon: AspectLexicon,
    window: int,
    profile: str = "whitespace-punct",
) -> tuple[float | None, float | None, float | None, float | None]:
    """(positive count, negative count, mean star, aspect satisfaction).

    Gold polarity labels win over the classifier.  Reviews without a label
    that cannot be classified (no trained model) fall back to the star rule
    (>= 4 positive, <= 2 negative, 3 positive on the documented tie side).
    Aspect satisfaction averages, over aspects with at least one detected
    mention, the per-aspect mean of the +/-1 mention signs; with no detected
    mention anywhere it is absent.
    """
    if not reviews:
        return None, None, None, None

    pos = neg = 0
    star_sum = 0
    aspect_signs: dict[str, list[int]] = {}
    for review in reviews:
        star_sum += review.star
        label = review.polarity_label
        if label is None:
            stream = textmine.tokenize(review.text, profile)
            if sentiment is not None:
                label = textmine.classify_sentiment(sentiment, stream)
            else:
                label = POSITIVE if review.star >= 3 else NEGATIVE
        if label == POSITIVE:
            pos += 1
        else:
            neg += 1
        for aspect_id, sign in detected_aspects(review, lexicon, window, profile):
            aspect_signs.setdefault(aspect_id, []).append(sign)

    star = star_sum / len(reviews)
    if aspect_signs:
        per_aspect = [sum(signs) / len(signs) for signs in aspect_signs.values()]
        aspect = math.fsum(per_aspect) / len(per_aspect)
    else:
        aspect = None
    return float(pos), float(neg), star, aspect


def detected_aspects(
    review: Review, lexicon: AspectLexicon, window: int, profile: str
) -> list[tuple[str, int]]:
    """Aspect mentions for one review; gold aspect labels bypass detection."""
    if review.aspect_labels is not None:
        return list(review.aspect_labels)
    stream = textmine.tokenize(review.text, profile)
    return textmine.detect_aspect_polarities(stream, lexicon, window)


# ---------------------------------------------------------------------------
# Citation metrics
# ---------------------------------------------------------------------------


def citation_topic_distribution(
    literatures: tuple[CitingLiterature, ...],
    model: TopicModel,
    doc_index: dict[tuple[str, str], int],
    profile: str,
) -> list[float] | None:
    """Book-level citation topic mixture.

    The mixture is the token-length-weighted mean of the citing literatures'
    document mixtures, so short abstracts do not dominate.  Literatures whose
    body produced no tokens are skipped; with none left the mixture is absent.
    """
    weighted: list[float] | None = None
    total_len = 0
    for lit in literatures:
        idx = doc_index.get((lit.isbn, lit.lit_id))
        if idx is None:
            continue
        stream = textmine.tokenize(lit.body_text, profile)
        if len(stream) == 0:
            continue
        mixture = model.doc_topic[idx]
        if weighted is None:
            weighted = [0.0] * model.topic_count
        for t in range(model.topic_count):
            weighted[t] += len(stream) * mixture[t]
        total_len += len(stream)
    if weighted is None or total_len == 0:
        return None
    return [w / total_len for w in weighted]


def citation_metrics(
    literatures: tuple[CitingLiterature, ...],
    model: TopicModel | None,
    doc_index: dict[tuple[str, str], int] | None,
    classifier: FunctionClassifier | None,
    tau: float | None = None,
    profile: str = "whitespace-punct",
) -> tuple[float | None, float | None, float | None, float | None, float | None]:
    """(citation count, literature depth, literature breadth, intensity,
    function score).

    Depth divides the citation count by the number of active topics in the
    book-level citation mixture; breadth is that mixture's normalized entropy
    after restriction.  Intensity is the mean citation-mark count per citing
    literature.  The function score averages Background=1 / Comparison=2 /
    Use=3 over scorable contexts and is absent without any.
    """
    if not literatures:
        return None, None, None, None, None

    count = float(len(literatures))
    intensity = math.fsum(lit.intensity for lit in literatures) / count

    depth = breadth = None
    if model is not None and doc_index is not None:
        if tau is None:
            tau = model.tau
        mixture = citation_topic_distribution(literatures, model, doc_index, profile)
        if mixture is not None:
            active = textmine.active_topic_count(mixture, tau)
            depth = count / active
            breadth = normalized_entropy(textmine.restricted_distribution(mixture, tau))

    scores = []
    for lit in literatures:
        for ctx in lit.contexts:
            label = textmine.classify_citation_function(classifier, ctx, profile)
            if label is not None:
                scores.append(FUNCTION_SCORES[label])
    function = math.fsum(scores) / len(scores) if scores else None

    return count, depth, breadth, intensity, function


# ---------------------------------------------------------------------------
# Usage metrics
# ---------------------------------------------------------------------------


def usage_metrics(
    per_region: dict[str, int] | None,
    sale_position: int | None,
    sale_population: int,
) -> tuple[float | None, float | None, float | None, float | None]:
    """(region count, holding total, holding distribution, sale score).

    The holding distribution is the normalized entropy of the per-region
    proportions (single region scores 0).  ``sale_position`` is the book's
    reordered 1..N position among the N books carrying sale data; the sale
    score flips it so larger means better-selling.
    """
    region = number = distribution = None
    if per_region:
        region = float(len(per_region))
        total = sum(per_region.values())
        number = float(total)
        distribution = normalized_entropy([c / total for c in per_region.values()])

    sale = None
    if sale_position is not None:
        if sale_position < 1:
            raise ValueError(f"sale position must be >= 1, got {sale_position}")
        sale = float(sale_population + 1 - sale_position)
    return region, number, distribution, sale


def sale_positions(sales: dict[str, int]) -> dict[str, int]:
    """Reorder raw platform ranks into dense 1..N positions.

    Providers may report platform-wide ranks (1 = best-selling) that exceed
    the number of books in the dataset; dense positions keep the ordering
    while making the flipped sale score well defined.  Ranks that already
    form a permutation of 1..N map to themselves.
    """
    distinct = sorted(set(sales.values()))
    position = {rank: i + 1 for i, rank in enumerate(distinct)}
    return {isbn: position[rank] for isbn, rank in sales.items()}


# ---------------------------------------------------------------------------
# Assembly
# ---------------------------------------------------------------------------


def metric_vector(
    isbn: str,
    dataset: Dataset,
    toc_model: TopicModel | None,
    toc_index: dict[str, int] | None,
    citlit_model: TopicModel | None,
    citlit_index: dict[tuple[str, str], int] | None,
    sentiment: SentimentModel | None,
    function_classifier: FunctionClassifier | None,
    positions: dict[str, int],
    window: int,
    profile: str = "whitespace-punct",
    tau: float | None = None,
) -> MetricVector:
    """Assemble all fifteen metric values for one book."""
    book = dataset.books[isbn]

    depth = breadth = None
    if toc_model is not None and toc_index is not None and isbn in toc_index:
        toc_tau = tau if tau is not None else toc_model.tau
        mixture = toc_model.doc_topic[toc_index[isbn]]
        active = textmine.active_topic_count(mixture, toc_tau)
        depth = toc_depth(book.page_count, active)
        breadth = toc_breadth(textmine.restricted_distribution(mixture, toc_tau))
    elif not book.toc_text.strip():
        log.warning("book %s has an empty TOC; content metrics absent", isbn)

    pos, neg, star, aspect = review_metrics(
        dataset.reviews_of(isbn),
        sentiment,
        dataset.aspect_lexicon,
        window,
        profile,
    )

    cit_tau = tau
    if cit_tau is None and citlit_model is not None:
        cit_tau = citlit_model.tau
    count, cit_depth, cit_breadth, intensity, function = citation_metrics(
        dataset.citations_of(isbn),
        citlit_model,
        citlit_index,
        function_classifier,
        cit_tau,
        profile,
    )

    hold = dataset.holdings.get(isbn)
    region, number, distribution, sale = usage_metrics(
        hold.per_region if hold else None,
        positions.get(isbn),
        len(positions),
    )

    return MetricVector(
        isbn=isbn,
        toc_depth=depth,
        toc_breadth=breadth,
        pos_reviews=pos,
        neg_reviews=neg,
        star_rating=star,
        aspect_satisfaction=aspect,
        citation_frequency=count,
        citlit_depth=cit_depth,
        citlit_breadth=cit_breadth,
        citation_intensity=intensity,
        citation_function=function,
        holding_number=number,
        holding_region=region,
        holding_distribution=distribution,
        sale=sale,
    )


def export_header() -> list[str]:
    """Column order of the metric table export (fixed across runs)."""
    return ["isbn"] + list(METRIC_IDS) + [f"{m}_present" for m in METRIC_IDS]


def export_rows(vectors: dict[str, MetricVector]) -> list[list[str]]:
    rows = []
    for isbn in sorted(vectors):
        vec = vectors[isbn]
        row = [isbn]
        row += ["" if vec.value(m) is None else repr(vec.value(m)) for m in METRIC_IDS]
        row += ["1" if vec.present(m) else "0" for m in METRIC_IDS]
        rows.append(row)
    return rows
