"""Model training, vector/score assembly, and the published engine state.

All randomness lives in :func:`train_models`; everything downstream is a
deterministic function of the dataset snapshot, the model snapshot and the
weight hierarchy, which is what makes CLI runs and HTTP responses exactly
reproducible.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, replace
from pathlib import Path

from . import metrics, scoring, textmine
from .ahp import WeightHierarchy
from .config import EngineConfig
from .datamodel import Dataset, FUNCTION_LABELS
from .errors import IoFailure, MalformedRecord, MissingClass, VersionMismatch
from .metrics import MetricVector
from .scoring import ImpactScore
from .textmine import NaiveBayesModel, TokenStream, TopicModel

log = logging.getLogger(__name__)

MODELS_FORMAT_VERSION = 1


@dataclass(frozen=True)
class EngineModels:
    """Fitted text models plus the corpus row index for each topic model."""

    toc_model: TopicModel | None
    toc_index: dict[str, int]
    citlit_model: TopicModel | None
    citlit_index: dict[tuple[str, str], int]
    sentiment: NaiveBayesModel | None
    function: NaiveBayesModel | None


def train_models(dataset: Dataset, config: EngineConfig) -> EngineModels:
    """Fit both topic models and both classifiers on the dataset.

    The sentiment model trains on star-bootstrapped labels (gold labels
    winning); the citation-function model trains on gold-labeled contexts.
    Either classifier is skipped with a warning when a class has no training
    examples, in which case the affected metrics fall back as documented in
    the metrics layer.
    """
    if config.per_discipline_topics:
        raise NotImplementedError(
            "per-discipline topic models are reserved config; fit is global per corpus role"
        )
    profile = config.tokenizer_profile

    toc_streams: list[TokenStream] = []
    toc_ids: list[str] = []
    for isbn in sorted(dataset.books):
        stream = textmine.tokenize(dataset.books[isbn].toc_text, profile)
        if len(stream):
            toc_ids.append(isbn)
            toc_streams.append(stream)
    toc_model = None
    if toc_streams:
        toc_model = textmine.fit_topic_model(
            toc_streams,
            topic_count=config.toc_topic_count,
            seed=config.seed,
            iterations=config.iterations,
            alpha=config.alpha,
            beta=config.beta,
            tau=config.tau,
        )

    lit_streams: list[TokenStream] = []
    lit_ids: list[tuple[str, str]] = []
    for isbn in sorted(dataset.citing_literatures):
        for lit in dataset.citing_literatures[isbn]:
            stream = textmine.tokenize(lit.body_text, profile)
            if len(stream):
                lit_ids.append((isbn, lit.lit_id))
                lit_streams.append(stream)
    citlit_model = None
    if lit_streams:
        citlit_model = textmine.fit_topic_model(
            lit_streams,
            topic_count=config.citlit_topic_count,
            seed=config.seed,
            iterations=config.iterations,
            alpha=config.alpha,
            beta=config.beta,
            tau=config.tau,
        )

    all_reviews = [
        review
        for isbn in sorted(dataset.reviews)
        for review in dataset.reviews[isbn]
    ]
    labeled = [
        (textmine.tokenize(review.text, profile), label)
        for review, label in textmine.bootstrap_polarity_labels(all_reviews)
    ]
    sentiment = None
    if labeled:
        try:
            sentiment = textmine.train_sentiment(labeled)
        except MissingClass as exc:
            log.warning("sentiment model not trained (%s); star fallback in effect", exc)

    gold_contexts = [
        (textmine.tokenize(ctx.window_text, profile), ctx.function_label)
        for isbn in sorted(dataset.citing_literatures)
        for lit in dataset.citing_literatures[isbn]
        for ctx in lit.contexts
        if ctx.function_label in FUNCTION_LABELS
    ]
    function = None
    if gold_contexts:
        try:
            function = textmine.train_function_classifier(gold_contexts)
        except MissingClass as exc:
            log.warning(
                "function classifier not trained (%s); only gold contexts scored", exc
            )

    return EngineModels(
        toc_model=toc_model,
        toc_index={isbn: i for i, isbn in enumerate(toc_ids)},
        citlit_model=citlit_model,
        citlit_index={key: i for i, key in enumerate(lit_ids)},
        sentiment=sentiment,
        function=function,
    )


def compute_vectors(
    dataset: Dataset, models: EngineModels, config: EngineConfig
) -> dict[str, MetricVector]:
    positions = metrics.sale_positions(
        {isbn: record.sale_rank for isbn, record in dataset.sales.items()}
    )
    return {
        isbn: metrics.metric_vector(
            isbn,
            dataset,
            models.toc_model,
            models.toc_index,
            models.citlit_model,
            models.citlit_index,
            models.sentiment,
            models.function,
            positions,
            window=config.aspect_window,
            profile=config.tokenizer_profile,
            tau=config.tau,
        )
        for isbn in sorted(dataset.books)
    }


def score_vectors(
    vectors: dict[str, MetricVector],
    weights: WeightHierarchy,
    policy: str,
    config: EngineConfig,
) -> list[ImpactScore]:
    scores = [
        scoring.impact_score(vectors[isbn], weights, policy, config.metric_divisors)
        for isbn in sorted(vectors)
    ]
    return scoring.with_total_ranks(scores)


def function_label_map(
    dataset: Dataset, models: EngineModels, config: EngineConfig
) -> dict[tuple[str, str, int], str]:
    """Classifier labels for unlabeled citation contexts (report shares)."""
    labels: dict[tuple[str, str, int], str] = {}
    for isbn in sorted(dataset.citing_literatures):
        for lit in dataset.citing_literatures[isbn]:
            for pos, ctx in enumerate(lit.contexts):
                if ctx.function_label is None and models.function is not None:
                    labels[(isbn, lit.lit_id, pos)] = textmine.classify_citation_function(
                        models.function, ctx, config.tokenizer_profile
                    )
    return labels


@dataclass(frozen=True)
class EngineState:
    """Everything the CLI and the service serve from: one consistent unit.

    The score table is always consistent with (dataset, models, weights);
    weight changes go through :func:`rescore`, which rebuilds the scores
    before the new state is published.
    """

    dataset: Dataset
    models: EngineModels
    weights: WeightHierarchy
    config: EngineConfig
    vectors: dict[str, MetricVector]
    scores: list[ImpactScore]
    function_labels: dict[tuple[str, str, int], str]

    def score_of(self, isbn: str) -> ImpactScore | None:
        return next((s for s in self.scores if s.isbn == isbn), None)


def build_state(
    dataset: Dataset,
    models: EngineModels,
    weights: WeightHierarchy,
    config: EngineConfig,
    policy: str | None = None,
) -> EngineState:
    vectors = compute_vectors(dataset, models, config)
    scores = score_vectors(vectors, weights, policy or config.policy, config)
    return EngineState(
        dataset=dataset,
        models=models,
        weights=weights,
        config=config,
        vectors=vectors,
        scores=scores,
        function_labels=function_label_map(dataset, models, config),
    )


def rescore(state: EngineState, weights: WeightHierarchy, policy: str | None = None) -> EngineState:
    """New state under different weights; dataset, models and vectors are shared."""
    scores = score_vectors(
        state.vectors, weights, policy or state.config.policy, state.config
    )
    return replace(state, weights=weights, scores=scores)


# ---------------------------------------------------------------------------
# Model snapshot serialization
# ---------------------------------------------------------------------------


def _topic_payload(model: TopicModel | None, doc_ids: list) -> dict | None:
    if model is None:
        return None
    return {
        "topic_count": model.topic_count,
        "seed": model.seed,
        "alpha": model.alpha,
        "beta": model.beta,
        "iterations": model.iterations,
        "tau": model.tau,
        "vocabulary": list(model.vocabulary),
        "topic_word": [list(row) for row in model.topic_word],
        "doc_topic": [list(row) for row in model.doc_topic],
        "doc_ids": doc_ids,
    }


def _topic_from_payload(payload: dict | None) -> tuple[TopicModel | None, list]:
    if payload is None:
        return None, []
    model = TopicModel(
        topic_count=payload["topic_count"],
        seed=payload["seed"],
        alpha=payload["alpha"],
        beta=payload["beta"],
        iterations=payload["iterations"],
        tau=payload["tau"],
        vocabulary=tuple(payload["vocabulary"]),
        topic_word=tuple(tuple(row) for row in payload["topic_word"]),
        doc_topic=tuple(tuple(row) for row in payload["doc_topic"]),
    )
    return model, payload["doc_ids"]


def _bayes_payload(model: NaiveBayesModel | None) -> dict | None:
    if model is None:
        return None
    return {
        "classes": list(model.classes),
        "vocabulary": list(model.vocabulary),
        "doc_counts": model.doc_counts,
        "token_counts": {cls: list(row) for cls, row in model.token_counts.items()},
        "smoothing": model.smoothing,
    }


def _bayes_from_payload(payload: dict | None) -> NaiveBayesModel | None:
    if payload is None:
        return None
    return NaiveBayesModel(
        classes=tuple(payload["classes"]),
        vocabulary=tuple(payload["vocabulary"]),
        doc_counts={cls: int(n) for cls, n in payload["doc_counts"].items()},
        token_counts={
            cls: tuple(row) for cls, row in payload["token_counts"].items()
        },
        smoothing=payload["smoothing"],
    )


def save_models(models: EngineModels, path) -> None:
    toc_ids = [isbn for isbn, _ in sorted(models.toc_index.items(), key=lambda kv: kv[1])]
    lit_ids = [
        list(key) for key, _ in sorted(models.citlit_index.items(), key=lambda kv: kv[1])
    ]
    payload = {
        "format_version": MODELS_FORMAT_VERSION,
        "toc": _topic_payload(models.toc_model, toc_ids),
        "citlit": _topic_payload(models.citlit_model, lit_ids),
        "sentiment": _bayes_payload(models.sentiment),
        "function": _bayes_payload(models.function),
    }
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, ensure_ascii=False, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise IoFailure(f"cannot write model snapshot {path}: {exc}") from exc


def load_models(path) -> EngineModels:
    try:
        payload = json.loads(Path(path).read_text("utf-8"))
    except OSError as exc:
        raise IoFailure(f"cannot read model snapshot {path}: {exc}") from exc
    except ValueError as exc:
        raise MalformedRecord(str(path), 1, f"invalid JSON: {exc}")
    version = payload.get("format_version")
    if version != MODELS_FORMAT_VERSION:
        raise VersionMismatch(
            f"model snapshot version {version!r}, expected {MODELS_FORMAT_VERSION}"
        )
    toc_model, toc_ids = _topic_from_payload(payload["toc"])
    citlit_model, lit_ids = _topic_from_payload(payload["citlit"])
    return EngineModels(
        toc_model=toc_model,
        toc_index={isbn: i for i, isbn in enumerate(toc_ids)},
        citlit_model=citlit_model,
        citlit_index={(isbn, lit_id): i for i, (isbn, lit_id) in enumerate(lit_ids)},
        sentiment=_bayes_from_payload(payload["sentiment"]),
        function=_bayes_from_payload(payload["function"]),
    )
