"""HTTP service over a published engine state.

The service exposes read endpoints for books, rankings, reports, weights and
discipline summaries, plus two write-ish endpoints: ``POST /whatif`` rescores
under user-supplied weights on the fly without touching the published state,
and ``POST /weights`` replaces the published state (full rescore, then an
atomic swap).  What-if requests are pure: identical requests against the same
state return identical bodies.
"""

from __future__ import annotations

import threading

from fastapi import FastAPI, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import HTMLResponse, JSONResponse

from . import analysis, engine, scoring
from .ahp import WeightHierarchy, hierarchy_from_global, weights_to_payload
from .datamodel import GROUP_IDS, METRIC_GROUPS, METRIC_IDS, METRIC_LABELS
from .errors import UnknownBook


def weights_payload(weights: WeightHierarchy) -> dict:
    payload = weights_to_payload(weights)
    payload["groups"] = {g: list(METRIC_GROUPS[g]) for g in GROUP_IDS}
    payload["metric_labels"] = {m: METRIC_LABELS[m] for m in METRIC_IDS}
    return payload


def _score_entry(state: engine.EngineState, score) -> dict:
    book = state.dataset.books[score.isbn]
    return {
        "isbn": score.isbn,
        "title": book.title,
        "discipline": book.discipline,
        "total": score.total,
        "rank": score.rank,
        "subscores": {g: score.subscores[g] for g in GROUP_IDS},
        "normalized": {m: score.normalized.get(m) for m in METRIC_IDS},
    }


def ranking_payload(state: engine.EngineState, key: str) -> list[dict]:
    return [
        {
            "rank": rank,
            "isbn": score.isbn,
            "title": state.dataset.books[score.isbn].title,
            "discipline": state.dataset.books[score.isbn].discipline,
            "score": scoring.rank_value(score, key),
            "total": score.total,
        }
        for rank, score in scoring.rank_books(state.scores, key)
    ]


def parse_weight_body(body) -> dict[str, float]:
    """Validate a what-if weight payload into a metric->weight map.

    Accepts either a map keyed by metric id or a flat list in the canonical
    metric order; all fifteen values must be present and positive.
    """
    if not isinstance(body, dict) or "weights" not in body:
        raise ValueError("body must be an object with a 'weights' field")
    raw = body["weights"]
    if isinstance(raw, list):
        if len(raw) != len(METRIC_IDS):
            raise ValueError(f"expected {len(METRIC_IDS)} weights, got {len(raw)}")
        raw = dict(zip(METRIC_IDS, raw))
    if not isinstance(raw, dict):
        raise ValueError("'weights' must be a list or an object")
    unknown = sorted(set(raw) - set(METRIC_IDS))
    if unknown:
        raise ValueError(f"unknown metric id(s) {unknown}")
    missing = [m for m in METRIC_IDS if m not in raw]
    if missing:
        raise ValueError(f"missing metric id(s) {missing}")
    values = {}
    for metric_id in METRIC_IDS:
        value = raw[metric_id]
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ValueError(f"weight for {metric_id} must be a number")
        if value <= 0:
            raise ValueError(f"weight for {metric_id} must be positive")
        values[metric_id] = float(value)
    return values


def create_app(state: engine.EngineState) -> FastAPI:
    app = FastAPI(title="bookimpact", version="0.1.0")
    # The console may be statically hosted on another origin (?api=...).
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.engine = state
    swap_lock = threading.Lock()

    def current() -> engine.EngineState:
        return app.state.engine

    @app.get("/books")
    def books(page: int = 1, page_size: int = 50):
        st = current()
        if page < 1 or page_size < 1:
            raise HTTPException(400, "page and page_size must be >= 1")
        ordered = sorted(st.scores, key=lambda s: (s.rank, s.isbn))
        start = (page - 1) * page_size
        chunk = ordered[start : start + page_size]
        return {
            "total": len(ordered),
            "page": page,
            "page_size": page_size,
            "policy": st.scores[0].policy if st.scores else st.config.policy,
            "weights_provenance": st.weights.provenance,
            "books": [_score_entry(st, s) for s in chunk],
        }

    @app.get("/books/{isbn}/report")
    def book_report(isbn: str):
        st = current()
        try:
            report = analysis.book_report(
                isbn,
                st.dataset,
                st.scores,
                st.vectors,
                window=st.config.aspect_window,
                profile=st.config.tokenizer_profile,
                function_labels=st.function_labels,
            )
        except UnknownBook:
            raise HTTPException(404, f"unknown isbn {isbn}")
        return analysis.report_to_payload(report)

    @app.get("/weights")
    def get_weights():
        return weights_payload(current().weights)

    @app.get("/rankings")
    def rankings(key: str = "total"):
        if key not in scoring.RANK_KEYS:
            raise HTTPException(400, f"key must be one of {list(scoring.RANK_KEYS)}")
        st = current()
        return {"key": key, "ranking": ranking_payload(st, key)}

    @app.get("/disciplines/summary")
    def disciplines_summary():
        st = current()
        summary = analysis.discipline_summary(st.scores, st.dataset, st.config.score_edges)
        return {
            "edges": list(summary.edges),
            "labels": summary.labels(),
            "rows": [
                {
                    "discipline": row.discipline,
                    "counts": list(row.counts),
                    "proportions": list(row.proportions),
                    "total": row.total,
                }
                for row in summary.rows
            ],
            "clamped": list(summary.clamped),
        }

    async def _weights_from_request(request: Request) -> WeightHierarchy:
        try:
            body = await request.json()
        except Exception:
            raise HTTPException(400, "body must be JSON")
        try:
            values = parse_weight_body(body)
        except ValueError as exc:
            raise HTTPException(400, str(exc))
        return hierarchy_from_global(values, provenance="custom", normalize=True)

    @app.post("/whatif")
    async def whatif(request: Request):
        hierarchy = await _weights_from_request(request)
        st = current()
        preview = engine.rescore(st, hierarchy)
        return JSONResponse(
            {
                "weights": {m: hierarchy.global_weights[m] for m in METRIC_IDS},
                "ranking": ranking_payload(preview, "total"),
                "books": [
                    _score_entry(preview, s)
                    for s in sorted(preview.scores, key=lambda s: (s.rank, s.isbn))
                ],
            }
        )

    @app.post("/weights")
    async def post_weights(request: Request):
        hierarchy = await _weights_from_request(request)
        if not swap_lock.acquire(blocking=False):
            raise HTTPException(409, "state is being replaced; retry")
        try:
            app.state.engine = engine.rescore(current(), hierarchy)
        finally:
            swap_lock.release()
        return weights_payload(current().weights)

    @app.get("/", response_class=HTMLResponse)
    def index():
        return (
            "<!doctype html><title>bookimpact</title>"
            "<h1>bookimpact service</h1>"
            "<p>Endpoints: /books, /books/{isbn}/report, /weights, /rankings, "
            "/disciplines/summary, POST /whatif, POST /weights</p>"
        )

    return app
