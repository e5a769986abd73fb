"""Hierarchical metric weights from expert questionnaires.

Each questionnaire level (the four source groups, and the metrics within
each group) is turned into reciprocal pairwise-comparison matrices, one per
respondent, via a Likert-difference mapping onto the 1/3/5/7/9 scale.
Respondent matrices are combined by element-wise geometric mean and the
combined matrix's principal eigenvector gives the level's weights, with the
usual consistency diagnostics attached.

A fixed reference weight configuration ships alongside and can be loaded
instead of deriving weights from a questionnaire.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .datamodel import ExpertMetricRating, GROUP_IDS, METRIC_GROUPS, METRIC_IDS
from .errors import (
    DimensionMismatch,
    IoFailure,
    MissingRating,
    NonConvergence,
    VersionMismatch,
)

# Likert-difference to comparison-scale map: equal ratings mean indifference,
# each extra point of difference steps up two scale grades.
_SAATY_STEP = {0: 1.0, 1: 3.0, 2: 5.0, 3: 7.0, 4: 9.0}

# Random consistency index per matrix size (Saaty's simulation constants).
DEFAULT_RANDOM_INDEX = {3: 0.58, 4: 0.90, 5: 1.12, 6: 1.24, 7: 1.32}

CR_WARNING_THRESHOLD = 0.1

POWER_ITERATION_CAP = 10_000
POWER_ITERATION_TOL = 1e-12

WEIGHTS_FORMAT_VERSION = 1

# Questionnaire levels: the primary group comparison plus one level per group.
LEVELS: tuple[tuple[str, tuple[str, ...]], ...] = (
    ("primary", GROUP_IDS),
) + tuple((group, METRIC_GROUPS[group]) for group in GROUP_IDS)


@dataclass(frozen=True)
class PairwiseMatrix:
    """A reciprocal positive comparison matrix for one questionnaire level."""

    values: np.ndarray
    level: str

    @property
    def size(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class ConsistencyDiagnostics:
    level: str
    size: int
    lambda_max: float
    ci: float
    cr: float

    @property
    def consistent(self) -> bool:
        return self.cr <= CR_WARNING_THRESHOLD


@dataclass(frozen=True)
class WeightHierarchy:
    """Primary, within-group and global metric weights plus diagnostics.

    Every level sums to 1 and each global weight is the product of its
    group's primary weight and its within-group weight.
    """

    primary_weights: dict[str, float]
    within_group_weights: dict[str, dict[str, float]]
    global_weights: dict[str, float]
    consistency: dict[str, ConsistencyDiagnostics]
    provenance: str

    def global_vector(self) -> list[float]:
        return [self.global_weights[m] for m in METRIC_IDS]


# ---------------------------------------------------------------------------
# Matrix construction
# ---------------------------------------------------------------------------


def rating_to_matrix(
    ratings: dict[str, int], items: tuple[str, ...], level: str
) -> PairwiseMatrix:
    """Pairwise matrix from one respondent's 1..5 ratings of ``items``.

    Entry (i, j) compares item i against item j using the rating difference;
    the matrix is reciprocal by construction.
    """
    missing = [item for item in items if item not in ratings]
    if missing:
        raise MissingRating(f"level {level!r}: unrated item(s) {missing}")
    n = len(items)
    values = np.ones((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            d = ratings[items[i]] - ratings[items[j]]
            step = _SAATY_STEP[abs(d)]
            a_ij = step if d >= 0 else 1.0 / step
            values[i, j] = a_ij
            values[j, i] = 1.0 / a_ij
    return PairwiseMatrix(values, level)


def aggregate_matrices(matrices: list[PairwiseMatrix]) -> PairwiseMatrix:
    """Element-wise geometric mean across respondents.

    Reciprocity survives aggregation exactly (the lower triangle is rebuilt
    from the aggregated upper triangle) and entries are clipped back to the
    [1/9, 9] comparison range.
    """
    if not matrices:
        raise DimensionMismatch("no matrices to aggregate")
    first = matrices[0]
    n = first.size
    for m in matrices[1:]:
        if m.size != n or m.level != first.level:
            raise DimensionMismatch(
                f"cannot aggregate {m.level!r} ({m.size}x{m.size}) "
                f"with {first.level!r} ({n}x{n})"
            )
    log_sum = np.zeros((n, n))
    for m in matrices:
        log_sum += np.log(m.values)
    mean = np.exp(log_sum / len(matrices))
    mean = np.clip(mean, 1.0 / 9.0, 9.0)
    values = np.ones((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            values[i, j] = mean[i, j]
            values[j, i] = 1.0 / mean[i, j]
    return PairwiseMatrix(values, first.level)


# ---------------------------------------------------------------------------
# Principal eigenvector and consistency
# ---------------------------------------------------------------------------


def principal_weights(matrix: PairwiseMatrix) -> tuple[np.ndarray, float]:
    """Weights from the principal right eigenvector, by power iteration.

    Iteration starts from the uniform vector and stops when successive
    eigenvalue estimates agree to 1e-12; the eigenvalue is the Rayleigh
    quotient at convergence.
    """
    a = matrix.values
    n = a.shape[0]
    v = np.full(n, 1.0 / n)
    lam_prev = None
    lam = float("nan")
    for _ in range(POWER_ITERATION_CAP):
        av = a @ v
        lam = float(v @ av) / float(v @ v)
        v = av / av.sum()
        if lam_prev is not None and abs(lam - lam_prev) < POWER_ITERATION_TOL:
            return v, lam
        lam_prev = lam
    raise NonConvergence(abs(lam - (lam_prev or 0.0)), POWER_ITERATION_CAP)


def consistency_ratio(
    lambda_max: float, n: int, random_index: dict[int, float] | None = None
) -> tuple[float, float]:
    """(CI, CR) for an n-item comparison.

    Matrices of size 1 and 2 are consistent by construction, so both indices
    are 0 there.  A CR above 0.1 is conventionally flagged as inconsistent;
    the flag is a warning, never a hard failure.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if n <= 2:
        return 0.0, 0.0
    table = DEFAULT_RANDOM_INDEX if random_index is None else random_index
    if n not in table:
        raise ValueError(f"no random consistency index configured for n={n}")
    ci = (lambda_max - n) / (n - 1)
    return ci, ci / table[n]


# ---------------------------------------------------------------------------
# Hierarchy derivation
# ---------------------------------------------------------------------------


def derive_weights(
    questionnaire: list[ExpertMetricRating],
    random_index: dict[int, float] | None = None,
) -> WeightHierarchy:
    """Full weight hierarchy from questionnaire responses.

    Each level uses every respondent who rated all of its items; a level with
    no complete respondent cannot be weighted.
    """
    level_weights: dict[str, dict[str, float]] = {}
    diagnostics: dict[str, ConsistencyDiagnostics] = {}
    for level, items in LEVELS:
        matrices = []
        for rating in questionnaire:
            if all(item in rating.ratings for item in items):
                matrices.append(rating_to_matrix(rating.ratings, items, level))
        if not matrices:
            raise MissingRating(f"no complete respondent for level {level!r}")
        combined = aggregate_matrices(matrices)
        weights, lam = principal_weights(combined)
        ci, cr = consistency_ratio(lam, len(items), random_index)
        level_weights[level] = {item: float(w) for item, w in zip(items, weights)}
        diagnostics[level] = ConsistencyDiagnostics(level, len(items), lam, ci, cr)

    primary = {g: level_weights["primary"][g] for g in GROUP_IDS}
    within = {g: level_weights[g] for g in GROUP_IDS}
    global_weights = {
        m: primary[g] * within[g][m]
        for g in GROUP_IDS
        for m in METRIC_GROUPS[g]
    }
    return WeightHierarchy(
        primary_weights=primary,
        within_group_weights=within,
        global_weights={m: global_weights[m] for m in METRIC_IDS},
        consistency=diagnostics,
        provenance="derived",
    )


def hierarchy_from_global(
    global_weights: dict[str, float],
    provenance: str,
    consistency: dict[str, ConsistencyDiagnostics] | None = None,
    normalize: bool = True,
) -> WeightHierarchy:
    """Rebuild the full hierarchy from fifteen global weights.

    Primary weights are the group sums and within-group weights the global
    weights rescaled inside each group.
    """
    missing = [m for m in METRIC_IDS if m not in global_weights]
    if missing:
        raise MissingRating(f"weight vector missing metric(s) {missing}")
    values = {m: float(global_weights[m]) for m in METRIC_IDS}
    if any(v <= 0 for v in values.values()):
        raise ValueError("all weights must be positive")
    if normalize:
        total = math.fsum(values.values())
        values = {m: v / total for m, v in values.items()}
    primary = {
        g: math.fsum(values[m] for m in METRIC_GROUPS[g]) for g in GROUP_IDS
    }
    within = {
        g: {m: values[m] / primary[g] for m in METRIC_GROUPS[g]} for g in GROUP_IDS
    }
    return WeightHierarchy(
        primary_weights=primary,
        within_group_weights=within,
        global_weights=values,
        consistency=consistency or {},
        provenance=provenance,
    )


def reference_weights() -> WeightHierarchy:
    """The published reference weight configuration shipped with the package."""
    text = resources.files("bookimpact").joinpath("data/reference_weights.json").read_text("utf-8")
    return parse_weights(text)


# ---------------------------------------------------------------------------
# Weight file serialization
# ---------------------------------------------------------------------------


def weights_to_payload(hierarchy: WeightHierarchy) -> dict:
    payload = {
        "format_version": WEIGHTS_FORMAT_VERSION,
        "provenance": hierarchy.provenance,
        "global_weights": {m: hierarchy.global_weights[m] for m in METRIC_IDS},
        "primary_weights": {g: hierarchy.primary_weights[g] for g in GROUP_IDS},
        "within_group_weights": {
            g: {m: hierarchy.within_group_weights[g][m] for m in METRIC_GROUPS[g]}
            for g in GROUP_IDS
        },
    }
    if hierarchy.consistency:
        payload["consistency"] = {
            level: {
                "size": d.size,
                "lambda_max": d.lambda_max,
                "ci": d.ci,
                "cr": d.cr,
                "consistent": d.consistent,
            }
            for level, d in hierarchy.consistency.items()
        }
    return payload


def parse_weights(text: str) -> WeightHierarchy:
    payload = json.loads(text)
    version = payload.get("format_version")
    if version != WEIGHTS_FORMAT_VERSION:
        raise VersionMismatch(
            f"weights file version {version!r}, expected {WEIGHTS_FORMAT_VERSION}"
        )
    consistency = {}
    for level, d in payload.get("consistency", {}).items():
        consistency[level] = ConsistencyDiagnostics(
            level=level,
            size=int(d["size"]),
            lambda_max=float(d["lambda_max"]),
            ci=float(d["ci"]),
            cr=float(d["cr"]),
        )
    return hierarchy_from_global(
        payload["global_weights"],
        provenance=payload.get("provenance", "custom"),
        consistency=consistency,
        normalize=True,
    )


def save_weights(hierarchy: WeightHierarchy, path) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(weights_to_payload(hierarchy), fh, indent=2, ensure_ascii=False)
            fh.write("\n")
    except OSError as exc:
        raise IoFailure(f"cannot write weights file {path}: {exc}") from exc


def load_weights(path) -> WeightHierarchy:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_weights(fh.read())
    except OSError as exc:
        raise IoFailure(f"cannot read weights file {path}: {exc}") from exc
