"""Canonical domain types, the metric registry, and dataset validation.

Every other module works against the types defined here.  A ``Dataset`` is an
immutable snapshot: once assembled by the ingest layer it is only read, never
mutated, so all downstream computation can share it freely.
"""

from __future__ import annotations

from dataclasses import dataclass

# Sentiment / citation-function class labels.
POSITIVE = "Positive"
NEGATIVE = "Negative"
POLARITIES = (POSITIVE, NEGATIVE)

BACKGROUND = "Background"
COMPARISON = "Comparison"
USE = "Use"
FUNCTION_LABELS = (BACKGROUND, COMPARISON, USE)
FUNCTION_SCORES = {BACKGROUND: 1, COMPARISON: 2, USE: 3}

# The four evaluation sources (primary metric groups), in report order.
GROUP_IDS = ("contents", "reviews", "citations", "usages")

# The fifteen metrics, top-to-bottom in the canonical hierarchy order used by
# every export, report and weight file.
METRIC_GROUPS: dict[str, tuple[str, ...]] = {
    "contents": ("toc_depth", "toc_breadth"),
    "reviews": ("pos_reviews", "neg_reviews", "star_rating", "aspect_satisfaction"),
    "citations": (
        "citation_frequency",
        "citlit_depth",
        "citlit_breadth",
        "citation_intensity",
        "citation_function",
    ),
    "usages": ("holding_number", "holding_region", "holding_distribution", "sale"),
}

METRIC_IDS: tuple[str, ...] = tuple(
    m for group in GROUP_IDS for m in METRIC_GROUPS[group]
)

GROUP_OF_METRIC: dict[str, str] = {
    m: group for group, members in METRIC_GROUPS.items() for m in members
}

# Human-facing metric labels for reports and the UI.
METRIC_LABELS = {
    "toc_depth": "TOC depth",
    "toc_breadth": "TOC breadth",
    "pos_reviews": "#positive reviews",
    "neg_reviews": "#negative reviews",
    "star_rating": "Star rating",
    "aspect_satisfaction": "Aspect satisfaction",
    "citation_frequency": "#citations",
    "citlit_depth": "Citation literature depth",
    "citlit_breadth": "Citation literature breadth",
    "citation_intensity": "Citation intensity",
    "citation_function": "Citation function",
    "holding_number": "Library holding number",
    "holding_region": "Library holding region",
    "holding_distribution": "Library holding distribution",
    "sale": "Sale",
}

# The five canonical disciplines; anything else is kept verbatim ("other").
CANONICAL_DISCIPLINES = (
    "Computer Science",
    "Literature",
    "Law",
    "Medicine",
    "Sport Science",
)

_DISCIPLINE_ALIASES = {
    d.replace(" ", "").lower(): d for d in CANONICAL_DISCIPLINES
}


def normalize_discipline(raw: str) -> str:
    """Map a free-form discipline name onto the canonical five when possible.

    Unrecognised names are preserved (trimmed) so new disciplines still group
    correctly in per-discipline analyses.
    """
    name = raw.strip()
    return _DISCIPLINE_ALIASES.get(name.replace(" ", "").lower(), name)


def normalize_region(raw: str) -> str:
    """Region codes are free-form strings, trimmed and upper-cased."""
    return raw.strip().upper()


# ---------------------------------------------------------------------------
# Record types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BookRecord:
    """One evaluated book: identity, discipline, page count and TOC text."""

    isbn: str
    title: str
    discipline: str
    page_count: int
    toc_text: str
    publication_year: int | None = None


@dataclass(frozen=True)
class Review:
    """One online review of a book.

    ``polarity_label`` and ``aspect_labels`` are optional gold annotations;
    when present they win over model output everywhere.
    """

    isbn: str
    review_id: str
    star: int
    text: str
    polarity_label: str | None = None
    aspect_labels: tuple[tuple[str, int], ...] | None = None


@dataclass(frozen=True)
class CitationContext:
    """A five-sentence window around one citation mark."""

    lit_id: str
    isbn: str
    window_text: str
    function_label: str | None = None


@dataclass(frozen=True)
class CitingLiterature:
    """A document that cites the evaluated book.

    ``intensity`` counts the book's citation marks within the document; the
    attached contexts may be a subset of those marks (some documents carry no
    usable mark in their text).
    """

    isbn: str
    lit_id: str
    title: str
    year: int
    body_text: str
    intensity: int
    contexts: tuple[CitationContext, ...] = ()


@dataclass(frozen=True)
class HoldingsRecord:
    """Library holding counts per region for one book.

    Regions with zero holdings are omitted, so every stored count is >= 1.
    """

    isbn: str
    per_region: dict[str, int]


@dataclass(frozen=True)
class SaleRecord:
    """Platform sale rank for one book (1 = best-selling)."""

    isbn: str
    sale_rank: int


@dataclass(frozen=True)
class ExpertMetricRating:
    """One questionnaire respondent's 1..5 importance ratings per metric id.

    Keys are the four group ids plus the fifteen metric ids; a respondent is
    usable for a level group only if every item of that group is rated.
    """

    respondent_id: str
    ratings: dict[str, int]


@dataclass(frozen=True)
class ExpertBookScore:
    """One respondent's 1..5 impact judgement for one book."""

    respondent_id: str
    isbn: str
    impact: int


@dataclass(frozen=True)
class AspectLexicon:
    """Aspect trigger terms plus the polarity cue lexicon.

    ``aspects`` maps aspect id to its trigger term set; cue terms and negators
    drive the window-based polarity rule in the text-mining layer.
    """

    aspects: dict[str, frozenset[str]]
    positive_cues: frozenset[str]
    negative_cues: frozenset[str]
    negators: frozenset[str]


@dataclass(frozen=True)
class Dataset:
    """Immutable evaluation snapshot: books plus all per-book evidence.

    Collections are keyed by isbn and canonically ordered, so two datasets
    built from the same records compare equal regardless of input order.
    """

    books: dict[str, BookRecord]
    reviews: dict[str, tuple[Review, ...]]
    citing_literatures: dict[str, tuple[CitingLiterature, ...]]
    holdings: dict[str, HoldingsRecord]
    sales: dict[str, SaleRecord]
    expert_metric_ratings: tuple[ExpertMetricRating, ...]
    expert_book_scores: tuple[ExpertBookScore, ...]
    aspect_lexicon: AspectLexicon

    def reviews_of(self, isbn: str) -> tuple[Review, ...]:
        return self.reviews.get(isbn, ())

    def citations_of(self, isbn: str) -> tuple[CitingLiterature, ...]:
        return self.citing_literatures.get(isbn, ())


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ValidationIssue:
    locator: str
    message: str

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return f"{self.locator}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    errors: tuple[ValidationIssue, ...]
    warnings: tuple[ValidationIssue, ...]

    @property
    def ok(self) -> bool:
        return not self.errors


def validate_dataset(dataset: Dataset) -> ValidationReport:
    """Check every record invariant; report rather than raise.

    Errors are invariant violations (bad values, unresolved references).
    Warnings enumerate books missing an entire evidence source, which the
    missing-data scoring policy consumes downstream.
    """
    errors: list[ValidationIssue] = []
    warnings: list[ValidationIssue] = []

    def err(locator: str, message: str) -> None:
        errors.append(ValidationIssue(locator, message))

    known = set(dataset.books)

    for isbn, book in dataset.books.items():
        loc = f"book {isbn}"
        if not book.isbn:
            err(loc, "empty isbn")
        if book.page_count < 1:
            err(loc, f"page_count must be >= 1, got {book.page_count}")

    for isbn, revs in dataset.reviews.items():
        if isbn not in known:
            err(f"reviews {isbn}", f"unresolved isbn {isbn}")
        seen_ids: set[str] = set()
        for rev in revs:
            loc = f"review {isbn}:{rev.review_id}"
            if not 1 <= rev.star <= 5:
                err(loc, f"star must be in 1..5, got {rev.star}")
            if rev.polarity_label is not None and rev.polarity_label not in POLARITIES:
                err(loc, f"unknown polarity label {rev.polarity_label!r}")
            if rev.aspect_labels:
                for aspect_id, pol in rev.aspect_labels:
                    if pol not in (1, -1):
                        err(loc, f"aspect polarity for {aspect_id!r} must be +1/-1")
            if rev.review_id in seen_ids:
                err(loc, "duplicate review_id")
            seen_ids.add(rev.review_id)

    for isbn, lits in dataset.citing_literatures.items():
        if isbn not in known:
            err(f"citations {isbn}", f"unresolved isbn {isbn}")
        for lit in lits:
            loc = f"citing literature {isbn}:{lit.lit_id}"
            if lit.intensity < 1:
                err(loc, f"intensity must be >= 1, got {lit.intensity}")
            for k, ctx in enumerate(lit.contexts):
                cloc = f"citation context {isbn}:{lit.lit_id}#{k}"
                if not ctx.window_text.strip():
                    err(cloc, "empty window_text")
                if ctx.function_label is not None and ctx.function_label not in FUNCTION_LABELS:
                    err(cloc, f"unknown function label {ctx.function_label!r}")

    for isbn, hold in dataset.holdings.items():
        loc = f"holdings {isbn}"
        if isbn not in known:
            err(loc, f"unresolved isbn {isbn}")
        if not hold.per_region:
            err(loc, "holdings record with no regions")
        for region, count in hold.per_region.items():
            if count < 1:
                err(loc, f"holding count for region {region!r} must be >= 1, got {count}")

    for isbn, sale in dataset.sales.items():
        loc = f"sale {isbn}"
        if isbn not in known:
            err(loc, f"unresolved isbn {isbn}")
        if sale.sale_rank < 1:
            err(loc, f"sale_rank must be >= 1, got {sale.sale_rank}")

    valid_rating_ids = set(METRIC_IDS) | set(GROUP_IDS)
    for rating in dataset.expert_metric_ratings:
        loc = f"metric questionnaire {rating.respondent_id}"
        for metric_id, value in rating.ratings.items():
            if metric_id not in valid_rating_ids:
                err(loc, f"unknown metric id {metric_id!r}")
            elif not 1 <= value <= 5:
                err(loc, f"rating for {metric_id} must be in 1..5, got {value}")

    for score in dataset.expert_book_scores:
        loc = f"book questionnaire {score.respondent_id}:{score.isbn}"
        if score.isbn not in known:
            err(loc, f"unresolved isbn {score.isbn}")
        if not 1 <= score.impact <= 5:
            err(loc, f"impact must be in 1..5, got {score.impact}")

    # Missing-source warnings, one per absent source per book.
    for isbn in sorted(known):
        if not dataset.reviews.get(isbn):
            warnings.append(ValidationIssue(f"book {isbn}", "no reviews"))
        if not dataset.citing_literatures.get(isbn):
            warnings.append(ValidationIssue(f"book {isbn}", "no citations"))
        if isbn not in dataset.holdings:
            warnings.append(ValidationIssue(f"book {isbn}", "no holdings"))
        if isbn not in dataset.sales:
            warnings.append(ValidationIssue(f"book {isbn}", "no sale"))

    return ValidationReport(tuple(errors), tuple(warnings))


# ---------------------------------------------------------------------------
# Coverage profile
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoverageRow:
    books: int = 0
    reviews: int = 0
    citations: int = 0
    contexts: int = 0
    holdings: int = 0


def coverage_profile(dataset: Dataset) -> dict[str, CoverageRow]:
    """Per-discipline counts of books, reviews, citations, contexts and
    holding entries (one entry per book-region pair)."""
    rows: dict[str, list[int]] = {}

    def row(discipline: str) -> list[int]:
        return rows.setdefault(discipline, [0, 0, 0, 0, 0])

    for isbn, book in dataset.books.items():
        r = row(book.discipline)
        r[0] += 1
        r[1] += len(dataset.reviews.get(isbn, ()))
        lits = dataset.citing_literatures.get(isbn, ())
        r[2] += len(lits)
        r[3] += sum(len(lit.contexts) for lit in lits)
        if isbn in dataset.holdings:
            r[4] += len(dataset.holdings[isbn].per_region)

    return {
        discipline: CoverageRow(*values)
        for discipline, values in sorted(rows.items())
    }


def coverage_totals(profile: dict[str, CoverageRow]) -> CoverageRow:
    return CoverageRow(
        books=sum(r.books for r in profile.values()),
        reviews=sum(r.reviews for r in profile.values()),
        citations=sum(r.citations for r in profile.values()),
        contexts=sum(r.contexts for r in profile.values()),
        holdings=sum(r.holdings for r in profile.values()),
    )
