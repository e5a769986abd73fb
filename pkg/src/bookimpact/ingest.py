"""File-based ingestion and snapshot persistence.

Evidence arrives as JSON-lines files (one record per line); the two
questionnaires are additionally accepted as delimited tables with one
respondent per row.  All files are UTF-8.  Loading is deterministic and
order-independent: collections are keyed and canonically ordered, so the
same records produce byte-identical snapshots regardless of input order.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .datamodel import (
    AspectLexicon,
    BookRecord,
    CitationContext,
    CitingLiterature,
    Dataset,
    ExpertBookScore,
    ExpertMetricRating,
    HoldingsRecord,
    Review,
    SaleRecord,
    normalize_discipline,
    normalize_region,
)
from .errors import (
    DuplicateKey,
    IoFailure,
    MalformedRecord,
    MissingMandatoryFile,
    VersionMismatch,
)

log = logging.getLogger(__name__)

SNAPSHOT_FORMAT_VERSION = 1

_DELIMITED_SUFFIXES = {".csv", ".tsv"}


@dataclass(frozen=True)
class IngestManifest:
    """Paths of the input files; only the books file is mandatory.

    Relative paths resolve against the manifest's own directory.
    """

    books: Path
    reviews: Path | None = None
    citations: Path | None = None
    holdings: Path | None = None
    sales: Path | None = None
    metric_questionnaire: Path | None = None
    book_score_questionnaire: Path | None = None
    aspect_lexicon: Path | None = None
    tokenizer_profile: str = "whitespace-punct"
    encoding: str = "utf-8"


def load_manifest(path) -> IngestManifest:
    path = Path(path)
    try:
        payload = json.loads(path.read_text("utf-8"))
    except OSError as exc:
        raise IoFailure(f"cannot read manifest {path}: {exc}") from exc
    except ValueError as exc:
        raise MalformedRecord(str(path), 1, f"invalid JSON: {exc}")
    if "books" not in payload or not payload["books"]:
        raise MissingMandatoryFile(f"manifest {path} does not name a books file")
    base = path.parent

    def resolve(key: str) -> Path | None:
        value = payload.get(key)
        return (base / value) if value else None

    encoding = payload.get("encoding", "utf-8")
    if encoding.lower().replace("-", "") != "utf8":
        raise MalformedRecord(str(path), 1, f"unsupported encoding {encoding!r}")
    return IngestManifest(
        books=base / payload["books"],
        reviews=resolve("reviews"),
        citations=resolve("citations"),
        holdings=resolve("holdings"),
        sales=resolve("sales"),
        metric_questionnaire=resolve("metric_questionnaire"),
        book_score_questionnaire=resolve("book_score_questionnaire"),
        aspect_lexicon=resolve("aspect_lexicon"),
        tokenizer_profile=payload.get("tokenizer_profile", "whitespace-punct"),
        encoding="utf-8",
    )


# ---------------------------------------------------------------------------
# Field extraction helpers
# ---------------------------------------------------------------------------


def _record_fields(obj: dict, known: set[str], path: str, line: int) -> None:
    unknown = sorted(set(obj) - known)
    if unknown:
        log.warning("%s:%d: ignoring unknown field(s) %s", path, line, unknown)


def _need(obj: dict, field: str, path: str, line: int):
    if field not in obj or obj[field] is None:
        raise MalformedRecord(path, line, f"missing field {field!r}")
    return obj[field]


def _need_str(obj: dict, field: str, path: str, line: int) -> str:
    value = _need(obj, field, path, line)
    if not isinstance(value, str) or not value.strip():
        raise MalformedRecord(path, line, f"field {field!r} must be a non-empty string")
    return value.strip()


def _need_int(obj: dict, field: str, path: str, line: int) -> int:
    value = _need(obj, field, path, line)
    if isinstance(value, bool) or not isinstance(value, int):
        raise MalformedRecord(path, line, f"field {field!r} must be an integer, got {value!r}")
    return value


def _opt_int(obj: dict, field: str, path: str, line: int) -> int | None:
    if obj.get(field) is None:
        return None
    return _need_int(obj, field, path, line)


def _opt_str(obj: dict, field: str, path: str, line: int) -> str | None:
    if obj.get(field) is None:
        return None
    value = obj[field]
    if not isinstance(value, str):
        raise MalformedRecord(path, line, f"field {field!r} must be a string")
    return value


def _jsonl_records(path: Path):
    try:
        text = path.read_text("utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise MalformedRecord(str(path), 0, f"not valid UTF-8: {exc}")
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except ValueError as exc:
            raise MalformedRecord(str(path), line_no, f"invalid JSON: {exc}")
        if not isinstance(obj, dict):
            raise MalformedRecord(str(path), line_no, "record must be a JSON object")
        yield line_no, obj


# ---------------------------------------------------------------------------
# Per-file loaders
# ---------------------------------------------------------------------------

_BOOK_FIELDS = {"isbn", "title", "discipline", "page_count", "toc_text", "publication_year"}
_REVIEW_FIELDS = {"isbn", "review_id", "star", "text", "polarity_label", "aspect_labels"}
_LIT_FIELDS = {"isbn", "lit_id", "title", "year", "body_text", "intensity", "contexts"}
_CONTEXT_FIELDS = {"window_text", "function_label"}
_HOLDING_FIELDS = {"isbn", "per_region"}
_SALE_FIELDS = {"isbn", "sale_rank"}


def load_books(path: Path) -> dict[str, BookRecord]:
    books: dict[str, BookRecord] = {}
    for line_no, obj in _jsonl_records(path):
        _record_fields(obj, _BOOK_FIELDS, str(path), line_no)
        isbn = _need_str(obj, "isbn", str(path), line_no)
        if isbn in books:
            raise DuplicateKey(f"{path}:{line_no}: duplicate isbn {isbn}")
        books[isbn] = BookRecord(
            isbn=isbn,
            title=_need_str(obj, "title", str(path), line_no),
            discipline=normalize_discipline(_need_str(obj, "discipline", str(path), line_no)),
            page_count=_need_int(obj, "page_count", str(path), line_no),
            toc_text=_opt_str(obj, "toc_text", str(path), line_no) or "",
            publication_year=_opt_int(obj, "publication_year", str(path), line_no),
        )
    return dict(sorted(books.items()))


def load_reviews(path: Path) -> dict[str, tuple[Review, ...]]:
    per_book: dict[str, dict[str, Review]] = {}
    for line_no, obj in _jsonl_records(path):
        _record_fields(obj, _REVIEW_FIELDS, str(path), line_no)
        isbn = _need_str(obj, "isbn", str(path), line_no)
        review_id = _need_str(obj, "review_id", str(path), line_no)
        aspect_labels = None
        if obj.get("aspect_labels") is not None:
            raw = obj["aspect_labels"]
            if not isinstance(raw, list):
                raise MalformedRecord(str(path), line_no, "aspect_labels must be a list")
            pairs = []
            for pair in raw:
                if (
                    not isinstance(pair, list)
                    or len(pair) != 2
                    or not isinstance(pair[0], str)
                    or not isinstance(pair[1], int)
                ):
                    raise MalformedRecord(
                        str(path), line_no, "aspect_labels entries must be [aspect_id, +1/-1]"
                    )
                pairs.append((pair[0], pair[1]))
            aspect_labels = tuple(pairs)
        review = Review(
            isbn=isbn,
            review_id=review_id,
            star=_need_int(obj, "star", str(path), line_no),
            text=_opt_str(obj, "text", str(path), line_no) or "",
            polarity_label=_opt_str(obj, "polarity_label", str(path), line_no),
            aspect_labels=aspect_labels,
        )
        bucket = per_book.setdefault(isbn, {})
        if review_id in bucket:
            raise DuplicateKey(f"{path}:{line_no}: duplicate review {isbn}/{review_id}")
        bucket[review_id] = review
    return {
        isbn: tuple(bucket[rid] for rid in sorted(bucket))
        for isbn, bucket in sorted(per_book.items())
    }


def load_citations(path: Path) -> dict[str, tuple[CitingLiterature, ...]]:
    per_book: dict[str, dict[str, CitingLiterature]] = {}
    for line_no, obj in _jsonl_records(path):
        _record_fields(obj, _LIT_FIELDS, str(path), line_no)
        isbn = _need_str(obj, "isbn", str(path), line_no)
        lit_id = _need_str(obj, "lit_id", str(path), line_no)
        contexts = []
        raw_contexts = obj.get("contexts") or []
        if not isinstance(raw_contexts, list):
            raise MalformedRecord(str(path), line_no, "contexts must be a list")
        for ctx in raw_contexts:
            if not isinstance(ctx, dict):
                raise MalformedRecord(str(path), line_no, "context must be a JSON object")
            _record_fields(ctx, _CONTEXT_FIELDS, str(path), line_no)
            contexts.append(
                CitationContext(
                    lit_id=lit_id,
                    isbn=isbn,
                    window_text=_need_str(ctx, "window_text", str(path), line_no),
                    function_label=_opt_str(ctx, "function_label", str(path), line_no),
                )
            )
        lit = CitingLiterature(
            isbn=isbn,
            lit_id=lit_id,
            title=_opt_str(obj, "title", str(path), line_no) or "",
            year=_need_int(obj, "year", str(path), line_no),
            body_text=_opt_str(obj, "body_text", str(path), line_no) or "",
            intensity=_need_int(obj, "intensity", str(path), line_no),
            contexts=tuple(contexts),
        )
        bucket = per_book.setdefault(isbn, {})
        if lit_id in bucket:
            raise DuplicateKey(f"{path}:{line_no}: duplicate literature {isbn}/{lit_id}")
        bucket[lit_id] = lit
    return {
        isbn: tuple(bucket[lid] for lid in sorted(bucket))
        for isbn, bucket in sorted(per_book.items())
    }


def load_holdings(path: Path) -> dict[str, HoldingsRecord]:
    holdings: dict[str, HoldingsRecord] = {}
    for line_no, obj in _jsonl_records(path):
        _record_fields(obj, _HOLDING_FIELDS, str(path), line_no)
        isbn = _need_str(obj, "isbn", str(path), line_no)
        if isbn in holdings:
            raise DuplicateKey(f"{path}:{line_no}: duplicate holdings record for {isbn}")
        raw = _need(obj, "per_region", str(path), line_no)
        if not isinstance(raw, dict) or not raw:
            raise MalformedRecord(str(path), line_no, "per_region must be a non-empty object")
        per_region: dict[str, int] = {}
        for region, count in raw.items():
            if isinstance(count, bool) or not isinstance(count, int):
                raise MalformedRecord(
                    str(path), line_no, f"holding count for {region!r} must be an integer"
                )
            key = normalize_region(region)
            per_region[key] = per_region.get(key, 0) + count
        holdings[isbn] = HoldingsRecord(isbn=isbn, per_region=dict(sorted(per_region.items())))
    return dict(sorted(holdings.items()))


def load_sales(path: Path) -> dict[str, SaleRecord]:
    sales: dict[str, SaleRecord] = {}
    for line_no, obj in _jsonl_records(path):
        _record_fields(obj, _SALE_FIELDS, str(path), line_no)
        isbn = _need_str(obj, "isbn", str(path), line_no)
        if isbn in sales:
            raise DuplicateKey(f"{path}:{line_no}: duplicate sale record for {isbn}")
        sales[isbn] = SaleRecord(isbn=isbn, sale_rank=_need_int(obj, "sale_rank", str(path), line_no))
    return dict(sorted(sales.items()))


# ---------------------------------------------------------------------------
# Questionnaires (JSON-lines or delimited tables)
# ---------------------------------------------------------------------------


def _delimited_rows(path: Path):
    delimiter = "\t" if path.suffix == ".tsv" else ","
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            yield from enumerate(csv.reader(fh, delimiter=delimiter), start=1)
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc


def _parse_cell_int(cell: str, path: Path, line_no: int, what: str) -> int:
    try:
        return int(cell.strip())
    except ValueError:
        raise MalformedRecord(str(path), line_no, f"{what} must be an integer, got {cell!r}")


def load_metric_questionnaire(path: Path) -> tuple[ExpertMetricRating, ...]:
    """One respondent per record; ratings keyed by metric/group id.

    The delimited layout has metric ids as columns; blank cells mean the
    respondent skipped that item.
    """
    ratings: dict[str, ExpertMetricRating] = {}
    if path.suffix in _DELIMITED_SUFFIXES:
        header: list[str] | None = None
        for line_no, row in _delimited_rows(path):
            if not row or not any(cell.strip() for cell in row):
                continue
            if header is None:
                header = [cell.strip() for cell in row]
                if not header or header[0] != "respondent_id":
                    raise MalformedRecord(
                        str(path), line_no, "first column must be respondent_id"
                    )
                continue
            respondent = row[0].strip()
            if not respondent:
                raise MalformedRecord(str(path), line_no, "empty respondent_id")
            if respondent in ratings:
                raise DuplicateKey(f"{path}:{line_no}: duplicate respondent {respondent}")
            values: dict[str, int] = {}
            for column, cell in zip(header[1:], row[1:]):
                if cell.strip():
                    values[column] = _parse_cell_int(cell, path, line_no, f"rating {column}")
            ratings[respondent] = ExpertMetricRating(respondent, values)
    else:
        for line_no, obj in _jsonl_records(path):
            _record_fields(obj, {"respondent_id", "ratings"}, str(path), line_no)
            respondent = _need_str(obj, "respondent_id", str(path), line_no)
            raw = _need(obj, "ratings", str(path), line_no)
            if not isinstance(raw, dict):
                raise MalformedRecord(str(path), line_no, "ratings must be an object")
            values = {}
            for metric_id, value in raw.items():
                if isinstance(value, bool) or not isinstance(value, int):
                    raise MalformedRecord(
                        str(path), line_no, f"rating for {metric_id!r} must be an integer"
                    )
                values[metric_id] = value
            if respondent in ratings:
                raise DuplicateKey(f"{path}:{line_no}: duplicate respondent {respondent}")
            ratings[respondent] = ExpertMetricRating(respondent, dict(sorted(values.items())))
    return tuple(ratings[r] for r in sorted(ratings))


def load_book_score_questionnaire(path: Path) -> tuple[ExpertBookScore, ...]:
    """Expert 1..5 impact judgements, one (respondent, book) pair per record.

    The delimited layout has isbns as columns, one respondent per row.
    """
    scores: dict[tuple[str, str], ExpertBookScore] = {}

    def add(respondent: str, isbn: str, impact: int, line_no: int) -> None:
        key = (respondent, isbn)
        if key in scores:
            raise DuplicateKey(
                f"{path}:{line_no}: duplicate book score {respondent}/{isbn}"
            )
        scores[key] = ExpertBookScore(respondent, isbn, impact)

    if path.suffix in _DELIMITED_SUFFIXES:
        header: list[str] | None = None
        for line_no, row in _delimited_rows(path):
            if not row or not any(cell.strip() for cell in row):
                continue
            if header is None:
                header = [cell.strip() for cell in row]
                if not header or header[0] != "respondent_id":
                    raise MalformedRecord(
                        str(path), line_no, "first column must be respondent_id"
                    )
                continue
            respondent = row[0].strip()
            if not respondent:
                raise MalformedRecord(str(path), line_no, "empty respondent_id")
            for isbn, cell in zip(header[1:], row[1:]):
                if cell.strip():
                    add(
                        respondent,
                        isbn,
                        _parse_cell_int(cell, path, line_no, f"impact for {isbn}"),
                        line_no,
                    )
    else:
        for line_no, obj in _jsonl_records(path):
            _record_fields(obj, {"respondent_id", "isbn", "impact"}, str(path), line_no)
            add(
                _need_str(obj, "respondent_id", str(path), line_no),
                _need_str(obj, "isbn", str(path), line_no),
                _need_int(obj, "impact", str(path), line_no),
                line_no,
            )
    return tuple(scores[key] for key in sorted(scores))


# ---------------------------------------------------------------------------
# Aspect lexicon
# ---------------------------------------------------------------------------


def parse_aspect_lexicon(text: str, path: str = "<lexicon>") -> AspectLexicon:
    """Parse the line-based lexicon format.

    ``aspect <Id>: term, term`` declares an aspect's trigger terms;
    ``positive:`` / ``negative:`` / ``negator:`` lines accumulate cue terms.
    """
    aspects: dict[str, set[str]] = {}
    positive: set[str] = set()
    negative: set[str] = set()
    negators: set[str] = set()
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        head, sep, tail = line.partition(":")
        if not sep:
            raise MalformedRecord(path, line_no, "expected '<kind>: terms'")
        terms = {t.strip().lower() for t in tail.split(",") if t.strip()}
        head = head.strip()
        if head.lower() in ("positive", "negative", "negator", "negators"):
            if not terms:
                raise MalformedRecord(path, line_no, "cue line with no terms")
            if head.lower() == "positive":
                positive |= terms
            elif head.lower() == "negative":
                negative |= terms
            else:
                negators |= terms
        elif head.lower().startswith("aspect"):
            aspect_id = head[len("aspect"):].strip()
            if not aspect_id:
                raise MalformedRecord(path, line_no, "aspect line with no id")
            if aspect_id in aspects:
                raise MalformedRecord(path, line_no, f"duplicate aspect id {aspect_id!r}")
            if not terms:
                raise MalformedRecord(path, line_no, f"aspect {aspect_id!r} has no trigger terms")
            aspects[aspect_id] = terms
        else:
            raise MalformedRecord(path, line_no, f"unknown lexicon line kind {head!r}")
    if not aspects:
        raise MalformedRecord(path, 0, "lexicon declares no aspects")
    return AspectLexicon(
        aspects={a: frozenset(t) for a, t in sorted(aspects.items())},
        positive_cues=frozenset(positive),
        negative_cues=frozenset(negative),
        negators=frozenset(negators),
    )


def load_aspect_lexicon(path: Path) -> AspectLexicon:
    try:
        return parse_aspect_lexicon(path.read_text("utf-8"), str(path))
    except OSError as exc:
        raise IoFailure(f"cannot read lexicon {path}: {exc}") from exc


def default_aspect_lexicon() -> AspectLexicon:
    text = resources.files("bookimpact").joinpath("data/default_aspect_lexicon.txt").read_text("utf-8")
    return parse_aspect_lexicon(text, "<default lexicon>")


# ---------------------------------------------------------------------------
# Dataset assembly and snapshots
# ---------------------------------------------------------------------------


def load_dataset(manifest: IngestManifest) -> Dataset:
    """Assemble a Dataset from the files named by the manifest."""
    if not manifest.books.exists():
        raise MissingMandatoryFile(f"books file {manifest.books} does not exist")
    books = load_books(manifest.books)
    return Dataset(
        books=books,
        reviews=load_reviews(manifest.reviews) if manifest.reviews else {},
        citing_literatures=load_citations(manifest.citations) if manifest.citations else {},
        holdings=load_holdings(manifest.holdings) if manifest.holdings else {},
        sales=load_sales(manifest.sales) if manifest.sales else {},
        expert_metric_ratings=(
            load_metric_questionnaire(manifest.metric_questionnaire)
            if manifest.metric_questionnaire
            else ()
        ),
        expert_book_scores=(
            load_book_score_questionnaire(manifest.book_score_questionnaire)
            if manifest.book_score_questionnaire
            else ()
        ),
        aspect_lexicon=(
            load_aspect_lexicon(manifest.aspect_lexicon)
            if manifest.aspect_lexicon
            else default_aspect_lexicon()
        ),
    )


def _dataset_payload(dataset: Dataset) -> dict:
    return {
        "format_version": SNAPSHOT_FORMAT_VERSION,
        "books": [
            {
                "isbn": b.isbn,
                "title": b.title,
                "discipline": b.discipline,
                "page_count": b.page_count,
                "toc_text": b.toc_text,
                "publication_year": b.publication_year,
            }
            for _, b in sorted(dataset.books.items())
        ],
        "reviews": [
            {
                "isbn": r.isbn,
                "review_id": r.review_id,
                "star": r.star,
                "text": r.text,
                "polarity_label": r.polarity_label,
                "aspect_labels": (
                    [list(pair) for pair in r.aspect_labels]
                    if r.aspect_labels is not None
                    else None
                ),
            }
            for isbn in sorted(dataset.reviews)
            for r in dataset.reviews[isbn]
        ],
        "citing_literatures": [
            {
                "isbn": lit.isbn,
                "lit_id": lit.lit_id,
                "title": lit.title,
                "year": lit.year,
                "body_text": lit.body_text,
                "intensity": lit.intensity,
                "contexts": [
                    {"window_text": c.window_text, "function_label": c.function_label}
                    for c in lit.contexts
                ],
            }
            for isbn in sorted(dataset.citing_literatures)
            for lit in dataset.citing_literatures[isbn]
        ],
        "holdings": [
            {"isbn": h.isbn, "per_region": dict(sorted(h.per_region.items()))}
            for _, h in sorted(dataset.holdings.items())
        ],
        "sales": [
            {"isbn": s.isbn, "sale_rank": s.sale_rank}
            for _, s in sorted(dataset.sales.items())
        ],
        "expert_metric_ratings": [
            {"respondent_id": r.respondent_id, "ratings": dict(sorted(r.ratings.items()))}
            for r in dataset.expert_metric_ratings
        ],
        "expert_book_scores": [
            {"respondent_id": s.respondent_id, "isbn": s.isbn, "impact": s.impact}
            for s in dataset.expert_book_scores
        ],
        "aspect_lexicon": {
            "aspects": {a: sorted(t) for a, t in sorted(dataset.aspect_lexicon.aspects.items())},
            "positive_cues": sorted(dataset.aspect_lexicon.positive_cues),
            "negative_cues": sorted(dataset.aspect_lexicon.negative_cues),
            "negators": sorted(dataset.aspect_lexicon.negators),
        },
    }


def save_snapshot(dataset: Dataset, path) -> None:
    """Write a canonical, versioned snapshot (byte-identical per dataset)."""
    payload = _dataset_payload(dataset)
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, ensure_ascii=False, sort_keys=True, indent=1)
            fh.write("\n")
    except OSError as exc:
        raise IoFailure(f"cannot write snapshot {path}: {exc}") from exc


def load_snapshot(path) -> Dataset:
    try:
        payload = json.loads(Path(path).read_text("utf-8"))
    except OSError as exc:
        raise IoFailure(f"cannot read snapshot {path}: {exc}") from exc
    except ValueError as exc:
        raise MalformedRecord(str(path), 1, f"invalid JSON: {exc}")
    version = payload.get("format_version")
    if version != SNAPSHOT_FORMAT_VERSION:
        raise VersionMismatch(
            f"snapshot version {version!r}, expected {SNAPSHOT_FORMAT_VERSION}"
        )

    books = {
        b["isbn"]: BookRecord(
            isbn=b["isbn"],
            title=b["title"],
            discipline=b["discipline"],
            page_count=b["page_count"],
            toc_text=b["toc_text"],
            publication_year=b.get("publication_year"),
        )
        for b in payload["books"]
    }
    reviews: dict[str, list[Review]] = {}
    for r in payload["reviews"]:
        reviews.setdefault(r["isbn"], []).append(
            Review(
                isbn=r["isbn"],
                review_id=r["review_id"],
                star=r["star"],
                text=r["text"],
                polarity_label=r.get("polarity_label"),
                aspect_labels=(
                    tuple((a, p) for a, p in r["aspect_labels"])
                    if r.get("aspect_labels") is not None
                    else None
                ),
            )
        )
    citing: dict[str, list[CitingLiterature]] = {}
    for entry in payload["citing_literatures"]:
        citing.setdefault(entry["isbn"], []).append(
            CitingLiterature(
                isbn=entry["isbn"],
                lit_id=entry["lit_id"],
                title=entry["title"],
                year=entry["year"],
                body_text=entry["body_text"],
                intensity=entry["intensity"],
                contexts=tuple(
                    CitationContext(
                        lit_id=entry["lit_id"],
                        isbn=entry["isbn"],
                        window_text=c["window_text"],
                        function_label=c.get("function_label"),
                    )
                    for c in entry["contexts"]
                ),
            )
        )
    lex = payload["aspect_lexicon"]
    return Dataset(
        books=dict(sorted(books.items())),
        reviews={isbn: tuple(rs) for isbn, rs in sorted(reviews.items())},
        citing_literatures={isbn: tuple(ls) for isbn, ls in sorted(citing.items())},
        holdings={
            h["isbn"]: HoldingsRecord(h["isbn"], dict(sorted(h["per_region"].items())))
            for h in payload["holdings"]
        },
        sales={s["isbn"]: SaleRecord(s["isbn"], s["sale_rank"]) for s in payload["sales"]},
        expert_metric_ratings=tuple(
            ExpertMetricRating(r["respondent_id"], r["ratings"])
            for r in payload["expert_metric_ratings"]
        ),
        expert_book_scores=tuple(
            ExpertBookScore(s["respondent_id"], s["isbn"], s["impact"])
            for s in payload["expert_book_scores"]
        ),
        aspect_lexicon=AspectLexicon(
            aspects={a: frozenset(t) for a, t in lex["aspects"].items()},
            positive_cues=frozenset(lex["positive_cues"]),
            negative_cues=frozenset(lex["negative_cues"]),
            negators=frozenset(lex["negators"]),
        ),
    )
