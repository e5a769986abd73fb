"""Text-analysis models feeding the metric formulas.

Four building blocks live here:

* tokenizer profiles (plain whitespace/punctuation splitting, plus a CJK
  bigram profile for Chinese text),
* a topic model fit by collapsed Gibbs sampling, used for content depth and
  breadth,
* a multinomial naive-Bayes classifier used for review polarity and for the
  three-way citation-function decision,
* lexicon-driven aspect polarity detection in review token windows.

Everything is deterministic: sampling is driven by a seeded ``random.Random``
and document mixtures are re-estimated against the final topic-word state, so
identical documents always receive identical mixtures.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .datamodel import (
    AspectLexicon,
    BACKGROUND,
    CitationContext,
    COMPARISON,
    FUNCTION_LABELS,
    NEGATIVE,
    POSITIVE,
    Review,
    USE,
)
from .errors import (
    DegenerateCorpus,
    EmptyDocument,
    MissingClass,
    NotADistribution,
    UnknownProfile,
)

# ---------------------------------------------------------------------------
# Tokenization
# ---------------------------------------------------------------------------

TOKENIZER_PROFILES = ("whitespace-punct", "cjk-bigram")


@dataclass(frozen=True)
class TokenStream:
    """Ordered tokens with their source offsets (strictly increasing)."""

    tokens: tuple[str, ...]
    offsets: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.tokens)


def _is_cjk(ch: str) -> bool:
    cp = ord(ch)
    return (
        0x4E00 <= cp <= 0x9FFF
        or 0x3400 <= cp <= 0x4DBF
        or 0xF900 <= cp <= 0xFAFF
    )


def _word_runs(text: str):
    """Yield (start, run) for maximal runs of word characters."""
    start = None
    for i, ch in enumerate(text):
        if ch.isalnum() or ch == "_":
            if start is None:
                start = i
        elif start is not None:
            yield start, text[start:i]
            start = None
    if start is not None:
        yield start, text[start:]


def tokenize(text: str, profile: str = "whitespace-punct") -> TokenStream:
    """Split ``text`` into a deterministic token stream.

    ``whitespace-punct`` emits lower-cased alphanumeric runs.  ``cjk-bigram``
    emits overlapping character bigrams for CJK runs (a lone CJK character is
    kept as a unigram) and lower-cased ASCII word runs for everything else.
    """
    if profile == "whitespace-punct":
        tokens: list[str] = []
        offsets: list[int] = []
        for start, run in _word_runs(text):
            tokens.append(run.lower())
            offsets.append(start)
        return TokenStream(tuple(tokens), tuple(offsets))

    if profile == "cjk-bigram":
        tokens = []
        offsets = []
        i, n = 0, len(text)
        while i < n:
            ch = text[i]
            if _is_cjk(ch):
                j = i
                while j < n and _is_cjk(text[j]):
                    j += 1
                if j - i == 1:
                    tokens.append(text[i])
                    offsets.append(i)
                else:
                    for k in range(i, j - 1):
                        tokens.append(text[k : k + 2])
                        offsets.append(k)
                i = j
            elif ch.isalnum() or ch == "_":
                j = i
                while j < n and not _is_cjk(text[j]) and (text[j].isalnum() or text[j] == "_"):
                    j += 1
                tokens.append(text[i:j].lower())
                offsets.append(i)
                i = j
            else:
                i += 1
        return TokenStream(tuple(tokens), tuple(offsets))

    raise UnknownProfile(f"unknown tokenizer profile {profile!r}")


# ---------------------------------------------------------------------------
# Topic model (collapsed Gibbs sampling)
# ---------------------------------------------------------------------------

# Fixed-point passes used to re-estimate document mixtures after sampling.
_FOLD_IN_PASSES = 50


@dataclass(frozen=True)
class TopicModel:
    """A fitted topic model.

    ``doc_topic`` rows are probability vectors (one per corpus document, in
    corpus order); ``topic_word`` rows are the smoothed per-topic word
    distributions over ``vocabulary``.
    """

    topic_count: int
    seed: int
    alpha: float
    beta: float
    iterations: int
    tau: float
    vocabulary: tuple[str, ...]
    topic_word: tuple[tuple[float, ...], ...]
    doc_topic: tuple[tuple[float, ...], ...]

    def infer(self, stream: TokenStream) -> tuple[float, ...]:
        """Deterministic mixture estimate for an arbitrary token stream."""
        index = {w: i for i, w in enumerate(self.vocabulary)}
        counts: dict[int, int] = {}
        for tok in stream.tokens:
            wid = index.get(tok)
            if wid is not None:
                counts[wid] = counts.get(wid, 0) + 1
        phi_wk = [
            [row[w] for row in self.topic_word] for w in range(len(self.vocabulary))
        ]
        return tuple(_fold_in(phi_wk, counts, self.topic_count, self.alpha))


def _fold_in(phi_wk, counts: dict[int, int], k: int, alpha: float) -> list[float]:
    """Fixed-point re-estimation of one document's topic mixture.

    Runs a fixed number of passes from the uniform mixture, so the result is
    a pure function of the token multiset and the topic-word state.
    """
    theta = [1.0 / k] * k
    length = sum(counts.values())
    if length == 0:
        return theta
    denom = length + k * alpha
    for _ in range(_FOLD_IN_PASSES):
        acc = [alpha] * k
        for wid, c in counts.items():
            row = phi_wk[wid]
            weights = [row[t] * theta[t] for t in range(k)]
            s = sum(weights)
            if s <= 0.0:
                continue
            scale = c / s
            for t in range(k):
                acc[t] += weights[t] * scale
        theta = [a / denom for a in acc]
    total = sum(theta)
    return [t / total for t in theta]


def fit_topic_model(
    corpus: list[TokenStream],
    topic_count: int,
    seed: int,
    iterations: int,
    alpha: float | None = None,
    beta: float = 0.01,
    tau: float | None = None,
) -> TopicModel:
    """Fit a topic model on ``corpus`` by collapsed Gibbs sampling.

    ``alpha`` defaults to ``50 / topic_count`` and ``tau`` (the activity
    threshold used downstream) to ``1 / topic_count``.  The same corpus,
    parameters and seed always produce bitwise-identical distributions.
    """
    if topic_count < 2:
        raise ValueError(f"topic_count must be >= 2, got {topic_count}")
    if iterations < 1:
        raise ValueError(f"iterations must be >= 1, got {iterations}")
    if not corpus:
        raise DegenerateCorpus("empty corpus")
    for idx, stream in enumerate(corpus):
        if len(stream) == 0:
            raise EmptyDocument(idx)

    if alpha is None:
        alpha = 50.0 / topic_count
    if tau is None:
        tau = 1.0 / topic_count

    vocabulary = tuple(sorted({tok for stream in corpus for tok in stream.tokens}))
    n_words = len(vocabulary)
    if n_words < 2:
        raise DegenerateCorpus(f"vocabulary has {n_words} distinct token(s), need >= 2")
    word_id = {w: i for i, w in enumerate(vocabulary)}
    docs = [[word_id[tok] for tok in stream.tokens] for stream in corpus]

    k = topic_count
    rng = random.Random(seed)
    n_wk = [[0] * k for _ in range(n_words)]
    n_dk = [[0] * k for _ in range(len(docs))]
    n_k = [0] * k
    assignments: list[list[int]] = []
    for d, doc in enumerate(docs):
        row_d = n_dk[d]
        z_doc = []
        for w in doc:
            t = rng.randrange(k)
            z_doc.append(t)
            n_wk[w][t] += 1
            row_d[t] += 1
            n_k[t] += 1
        assignments.append(z_doc)

    v_beta = n_words * beta
    cum = [0.0] * k
    for _ in range(iterations):
        for d, doc in enumerate(docs):
            row_d = n_dk[d]
            z_doc = assignments[d]
            for pos, w in enumerate(doc):
                t = z_doc[pos]
                row_w = n_wk[w]
                row_w[t] -= 1
                row_d[t] -= 1
                n_k[t] -= 1
                total = 0.0
                for j in range(k):
                    total += (row_w[j] + beta) / (n_k[j] + v_beta) * (row_d[j] + alpha)
                    cum[j] = total
                r = rng.random() * total
                t = 0
                while cum[t] < r and t < k - 1:
                    t += 1
                z_doc[pos] = t
                row_w[t] += 1
                row_d[t] += 1
                n_k[t] += 1

    topic_word = []
    for t in range(k):
        denom = n_k[t] + v_beta
        topic_word.append(tuple((n_wk[w][t] + beta) / denom for w in range(n_words)))

    phi_wk = [[topic_word[t][w] for t in range(k)] for w in range(n_words)]
    doc_topic = []
    for doc in docs:
        counts: dict[int, int] = {}
        for w in doc:
            counts[w] = counts.get(w, 0) + 1
        doc_topic.append(tuple(_fold_in(phi_wk, counts, k, alpha)))

    return TopicModel(
        topic_count=k,
        seed=seed,
        alpha=alpha,
        beta=beta,
        iterations=iterations,
        tau=tau,
        vocabulary=vocabulary,
        topic_word=tuple(topic_word),
        doc_topic=tuple(doc_topic),
    )


def _check_distribution(distribution) -> list[float]:
    values = [float(p) for p in distribution]
    if not values:
        raise NotADistribution("empty vector")
    if any(p < 0.0 for p in values):
        raise NotADistribution("negative entry")
    if abs(math.fsum(values) - 1.0) > 1e-9:
        raise NotADistribution(f"entries sum to {math.fsum(values)!r}, not 1")
    return values


def active_topic_count(distribution, tau: float) -> int:
    """Number of entries at or above the activity threshold, never below 1."""
    if not 0.0 < tau <= 1.0:
        raise ValueError(f"tau must be in (0, 1], got {tau}")
    values = _check_distribution(distribution)
    return max(1, sum(1 for p in values if p >= tau))


def restricted_distribution(distribution, tau: float) -> list[float]:
    """Active entries renormalized to sum 1.

    When no entry clears ``tau`` the single largest entry is kept with mass 1,
    matching the clamp in :func:`active_topic_count`.
    """
    if not 0.0 < tau <= 1.0:
        raise ValueError(f"tau must be in (0, 1], got {tau}")
    values = _check_distribution(distribution)
    active = [p for p in values if p >= tau]
    if not active:
        return [1.0]
    total = math.fsum(active)
    return [p / total for p in active]


# ---------------------------------------------------------------------------
# Naive Bayes (review polarity, citation function)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NaiveBayesModel:
    """Multinomial naive Bayes with additive smoothing.

    ``classes`` fixes the tie-break order: on an exact posterior tie the
    earliest listed class wins.  Out-of-vocabulary tokens are skipped at
    prediction time.
    """

    classes: tuple[str, ...]
    vocabulary: tuple[str, ...]
    doc_counts: dict[str, int]
    token_counts: dict[str, tuple[int, ...]]
    smoothing: float = 1.0

    def log_posterior(self, tokens) -> dict[str, float]:
        total_docs = sum(self.doc_counts.values())
        vocab_index = {w: i for i, w in enumerate(self.vocabulary)}
        n_vocab = len(self.vocabulary)
        scores = {}
        for cls in self.classes:
            counts = self.token_counts[cls]
            class_total = sum(counts)
            score = math.log(self.doc_counts[cls] / total_docs)
            denom = class_total + self.smoothing * n_vocab
            for tok in tokens:
                idx = vocab_index.get(tok)
                if idx is None:
                    continue
                score += math.log((counts[idx] + self.smoothing) / denom)
            scores[cls] = score
        return scores

    def classify(self, stream: TokenStream) -> str:
        scores = self.log_posterior(stream.tokens)
        best = self.classes[0]
        for cls in self.classes[1:]:
            if scores[cls] > scores[best] + 1e-12:
                best = cls
        return best


SentimentModel = NaiveBayesModel
FunctionClassifier = NaiveBayesModel


def _train_naive_bayes(
    examples: list[tuple[TokenStream, str]], classes: tuple[str, ...]
) -> NaiveBayesModel:
    present = {label for _, label in examples}
    for cls in classes:
        if cls not in present:
            raise MissingClass(cls)
    vocabulary = tuple(sorted({tok for stream, _ in examples for tok in stream.tokens}))
    vocab_index = {w: i for i, w in enumerate(vocabulary)}
    doc_counts = {cls: 0 for cls in classes}
    token_counts = {cls: [0] * len(vocabulary) for cls in classes}
    for stream, label in examples:
        doc_counts[label] += 1
        row = token_counts[label]
        for tok in stream.tokens:
            row[vocab_index[tok]] += 1
    return NaiveBayesModel(
        classes=classes,
        vocabulary=vocabulary,
        doc_counts=doc_counts,
        token_counts={cls: tuple(row) for cls, row in token_counts.items()},
    )


def train_sentiment(labeled: list[tuple[TokenStream, str]]) -> SentimentModel:
    """Train the review polarity model; ties resolve to Positive."""
    return _train_naive_bayes(labeled, (POSITIVE, NEGATIVE))


def classify_sentiment(model: SentimentModel, review: TokenStream) -> str:
    return model.classify(review)


def train_function_classifier(
    labeled: list[tuple[TokenStream, str]]
) -> FunctionClassifier:
    """Train the three-way citation-function model.

    Tie-break order is Background, Comparison, Use (lexicographic).
    """
    return _train_naive_bayes(labeled, (BACKGROUND, COMPARISON, USE))


def classify_citation_function(
    classifier: FunctionClassifier | None,
    context: CitationContext,
    profile: str = "whitespace-punct",
) -> str | None:
    """Function label for one citation context.

    Contexts carrying a gold label bypass the classifier; without either a
    gold label or a trained classifier the context cannot be scored and None
    is returned.
    """
    if context.function_label in FUNCTION_LABELS:
        return context.function_label
    if classifier is None:
        return None
    return classifier.classify(tokenize(context.window_text, profile))


def bootstrap_polarity_labels(reviews) -> list[tuple[Review, str]]:
    """Derive polarity training labels from star ratings.

    Stars 4-5 map to Positive, 1-2 to Negative, 3 is excluded.  An explicit
    gold label always wins, including for 3-star reviews.
    """
    labeled = []
    for review in reviews:
        if review.polarity_label is not None:
            labeled.append((review, review.polarity_label))
        elif review.star >= 4:
            labeled.append((review, POSITIVE))
        elif review.star <= 2:
            labeled.append((review, NEGATIVE))
    return labeled


# ---------------------------------------------------------------------------
# Aspect polarity detection
# ---------------------------------------------------------------------------


def trigger_index(lexicon: AspectLexicon) -> dict[str, str]:
    """Map each trigger term to its aspect (first aspect id wins on overlap)."""
    index: dict[str, str] = {}
    for aspect_id in sorted(lexicon.aspects):
        for term in lexicon.aspects[aspect_id]:
            index.setdefault(term, aspect_id)
    return index


def detect_aspect_polarities(
    review: TokenStream, lexicon: AspectLexicon, window: int
) -> list[tuple[str, int]]:
    """Aspect mentions with their polarity sign, one per trigger occurrence.

    For each trigger occurrence the polarity is the sign of positive minus
    negative cue counts within ``window`` tokens on either side; a cue's sign
    flips when a negator sits immediately before it.  A zero net drops the
    mention.  Repeated mentions of one aspect are each emitted, since the
    per-aspect score averages over occurrences.
    """
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    triggers = trigger_index(lexicon)
    tokens = review.tokens
    mentions: list[tuple[str, int]] = []
    for i, tok in enumerate(tokens):
        aspect_id = triggers.get(tok)
        if aspect_id is None:
            continue
        net = 0
        lo = max(0, i - window)
        hi = min(len(tokens), i + window + 1)
        for j in range(lo, hi):
            if j == i:
                continue
            cue = tokens[j]
            if cue in lexicon.positive_cues:
                sign = 1
            elif cue in lexicon.negative_cues:
                sign = -1
            else:
                continue
            # An adjacent negator travels with its cue, even at the window edge.
            if j > 0 and j - 1 != i and tokens[j - 1] in lexicon.negators:
                sign = -sign
            net += sign
        if net != 0:
            mentions.append((aspect_id, 1 if net > 0 else -1))
    return mentions
