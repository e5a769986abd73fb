"""Score fusion: normalize raw metrics, weight them, decompose and rank.

Raw metric values are squashed into [0, 1) with a scaled arctangent; the book
score is the weighted sum of the normalized values and decomposes exactly
into the four per-source subscores.  Two missing-data policies are offered:
``zero`` scores absent metrics as zero under full weights, ``renorm`` drops
their weights and rescales the remainder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .ahp import WeightHierarchy
from .datamodel import GROUP_IDS, GROUP_OF_METRIC, METRIC_IDS
from .errors import NegativeInput, NoPresentMetrics
from .metrics import MetricVector

ZERO_FILL = "zero"
RENORMALIZE = "renorm"
POLICIES = (ZERO_FILL, RENORMALIZE)

# CLI/HTTP ranking keys onto score fields.
RANK_KEYS = ("total", "content", "review", "citation", "usage")
KEY_TO_GROUP = {
    "content": "contents",
    "review": "reviews",
    "citation": "citations",
    "usage": "usages",
}


def normalize(raw: float) -> float:
    """Squash a nonnegative raw metric value into [0, 1) via 2*atan(x)/pi.

    Bipolar metrics must be shifted into nonnegative range before this point;
    a negative input signals a missed shift upstream.
    """
    if raw < 0:
        raise NegativeInput(f"normalize() needs a nonnegative value, got {raw}")
    return 2.0 * math.atan(raw) / math.pi


def shifted_raw(metric_id: str, value: float, divisors: dict[str, float] | None = None) -> float:
    """Raw value ready for normalization.

    Aspect satisfaction lives in [-1, 1] and is shifted affinely to [0, 1]
    (monotone, so rankings by the metric are unchanged); everything else is
    already nonnegative.  Optional per-metric divisors rescale raw values
    whose counts would saturate the arctangent.
    """
    raw = (value + 1.0) / 2.0 if metric_id == "aspect_satisfaction" else value
    if divisors:
        raw = raw / divisors.get(metric_id, 1.0)
    return raw


@dataclass(frozen=True)
class ImpactScore:
    """Normalized metric scores, per-source subscores, total and rank."""

    isbn: str
    normalized: dict[str, float]            # present metrics only
    subscores: dict[str, float]             # one per source group
    total: float
    policy: str
    weights_provenance: str
    rank: int | None = None
    effective_weights: dict[str, float] = field(default_factory=dict)

    def subscore(self, group: str) -> float:
        return self.subscores[group]


def impact_score(
    vector: MetricVector,
    weights: WeightHierarchy,
    policy: str = ZERO_FILL,
    divisors: dict[str, float] | None = None,
) -> ImpactScore:
    """Fuse one metric vector into an impact score under ``weights``.

    Under the zero-fill policy absent metrics contribute nothing while the
    weights stay whole; under renormalization absent metrics lose their
    weights and the remaining weights are rescaled to sum 1.
    """
    if policy not in POLICIES:
        raise ValueError(f"unknown policy {policy!r}")
    present = vector.present_metrics()
    if policy == RENORMALIZE and not present:
        raise NoPresentMetrics(f"book {vector.isbn} has no usable evidence")

    if policy == ZERO_FILL:
        effective = {m: weights.global_weights[m] for m in METRIC_IDS}
    else:
        kept = math.fsum(weights.global_weights[m] for m in present)
        effective = {m: weights.global_weights[m] / kept for m in present}

    normalized: dict[str, float] = {}
    contributions: dict[str, float] = {g: 0.0 for g in GROUP_IDS}
    for metric_id in present:
        nors = normalize(shifted_raw(metric_id, vector.value(metric_id), divisors))
        normalized[metric_id] = nors
        contributions[GROUP_OF_METRIC[metric_id]] += nors * effective[metric_id]

    total = math.fsum(contributions.values())
    return ImpactScore(
        isbn=vector.isbn,
        normalized=normalized,
        subscores=contributions,
        total=total,
        policy=policy,
        weights_provenance=weights.provenance,
        effective_weights=effective,
    )


def source_subscore(score: ImpactScore, group: str) -> float:
    """The group's partial weighted sum (basis for per-source rankings)."""
    if group not in GROUP_IDS:
        raise ValueError(f"unknown source group {group!r}")
    return score.subscores[group]


def rank_value(score: ImpactScore, key: str) -> float:
    if key == "total":
        return score.total
    if key in KEY_TO_GROUP:
        return score.subscores[KEY_TO_GROUP[key]]
    if key in GROUP_IDS:
        return score.subscores[key]
    raise ValueError(f"unknown ranking key {key!r}")


def rank_books(scores: list[ImpactScore], key: str = "total") -> list[tuple[int, ImpactScore]]:
    """Scores ordered best-first with dense ranks.

    Exact ties share the smaller rank; within a tie books are ordered by isbn
    so output is reproducible.
    """
    if not scores:
        raise ValueError("nothing to rank")
    ordered = sorted(scores, key=lambda s: (-rank_value(s, key), s.isbn))
    ranked: list[tuple[int, ImpactScore]] = []
    rank = 0
    previous: float | None = None
    for score in ordered:
        value = rank_value(score, key)
        if previous is None or value != previous:
            rank += 1
            previous = value
        ranked.append((rank, score))
    return ranked


def with_total_ranks(scores: list[ImpactScore]) -> list[ImpactScore]:
    """Copies of ``scores`` with the dense total-score rank filled in."""
    from dataclasses import replace

    by_isbn = {s.isbn: rank for rank, s in rank_books(scores, "total")}
    return [replace(s, rank=by_isbn[s.isbn]) for s in scores]


def export_header() -> list[str]:
    """Column order of the score table export (fixed across runs)."""
    return (
        ["isbn"]
        + [f"nors_{m}" for m in METRIC_IDS]
        + [f"subscore_{g}" for g in GROUP_IDS]
        + ["total", "rank"]
    )


def export_rows(scores: list[ImpactScore]) -> list[list[str]]:
    rows = []
    for score in sorted(scores, key=lambda s: s.isbn):
        row = [score.isbn]
        row += [
            repr(score.normalized[m]) if m in score.normalized else ""
            for m in METRIC_IDS
        ]
        row += [repr(score.subscores[g]) for g in GROUP_IDS]
        row.append(repr(score.total))
        row.append("" if score.rank is None else str(score.rank))
        rows.append(row)
    return rows
