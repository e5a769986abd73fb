"""Engine configuration with JSON file loading."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

from .ahp import DEFAULT_RANDOM_INDEX
from .errors import IoFailure, MalformedRecord

DEFAULT_SCORE_EDGES = (0.3, 0.4, 0.5, 0.6, 0.7)


@dataclass(frozen=True)
class EngineConfig:
    """Tunables shared by the CLI and the HTTP service.

    ``alpha`` and ``tau`` default to 50/K and 1/K when left unset.  Metric
    divisors pre-scale raw values whose magnitudes would saturate the
    arctangent normalization (default 1, i.e. faithful raw values).
    """

    toc_topic_count: int = 20
    citlit_topic_count: int = 20
    iterations: int = 500
    seed: int = 7
    alpha: float | None = None
    beta: float = 0.01
    tau: float | None = None
    tokenizer_profile: str = "whitespace-punct"
    aspect_window: int = 5
    policy: str = "zero"
    score_edges: tuple[float, ...] = DEFAULT_SCORE_EDGES
    random_index: dict[int, float] = field(
        default_factory=lambda: dict(DEFAULT_RANDOM_INDEX)
    )
    metric_divisors: dict[str, float] = field(default_factory=dict)
    per_discipline_topics: bool = False


_CONFIG_KEYS = {
    "toc_topic_count",
    "citlit_topic_count",
    "iterations",
    "seed",
    "alpha",
    "beta",
    "tau",
    "tokenizer_profile",
    "aspect_window",
    "policy",
    "score_edges",
    "random_index",
    "metric_divisors",
    "per_discipline_topics",
}


def load_config(path) -> EngineConfig:
    path = Path(path)
    try:
        payload = json.loads(path.read_text("utf-8"))
    except OSError as exc:
        raise IoFailure(f"cannot read config {path}: {exc}") from exc
    except ValueError as exc:
        raise MalformedRecord(str(path), 1, f"invalid JSON: {exc}")
    unknown = sorted(set(payload) - _CONFIG_KEYS)
    if unknown:
        raise MalformedRecord(str(path), 1, f"unknown config key(s) {unknown}")
    config = EngineConfig()
    updates: dict = {}
    for key, value in payload.items():
        if key == "score_edges":
            value = tuple(float(v) for v in value)
        elif key == "random_index":
            value = {int(k): float(v) for k, v in value.items()}
        elif key == "metric_divisors":
            value = {str(k): float(v) for k, v in value.items()}
        updates[key] = value
    return replace(config, **updates)
