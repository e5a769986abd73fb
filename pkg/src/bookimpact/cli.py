"""Command-line pipeline driver.

Subcommands mirror the pipeline stages: ``ingest`` builds a dataset snapshot,
``train`` fits the text models, ``weights`` derives or emits a weight file,
``score``/``rank``/``report``/``validate`` are deterministic given snapshots,
and ``serve`` starts the HTTP service.

Exit codes: 0 success, 2 usage errors, 3 data/file errors, 4 unknown
resources, 5 computation errors, 1 anything unexpected.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import ahp, analysis, engine, ingest, metrics, scoring
from .config import EngineConfig, load_config
from .datamodel import GROUP_IDS, coverage_profile, validate_dataset
from .errors import (
    BookImpactError,
    DuplicateKey,
    InsufficientData,
    InsufficientOverlap,
    IoFailure,
    MalformedRecord,
    MissingMandatoryFile,
    UnknownBook,
    UnknownProfile,
    VersionMismatch,
    ZeroVariance,
)

log = logging.getLogger("bookimpact")

_DATA_ERRORS = (MalformedRecord, DuplicateKey, MissingMandatoryFile, IoFailure, VersionMismatch)
_NOT_FOUND_ERRORS = (UnknownBook, UnknownProfile)


def _write_csv(path: str | None, header: list[str], rows: list[list[str]]) -> None:
    if path is None or path == "-":
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _config_from_args(args) -> EngineConfig:
    config = load_config(args.config) if getattr(args, "config", None) else EngineConfig()
    updates = {}
    if getattr(args, "k", None) is not None:
        updates["toc_topic_count"] = args.k
        updates["citlit_topic_count"] = args.k
    if getattr(args, "seed", None) is not None:
        updates["seed"] = args.seed
    if getattr(args, "iters", None) is not None:
        updates["iterations"] = args.iters
    if getattr(args, "tau", None) is not None:
        updates["tau"] = args.tau
    if getattr(args, "policy", None) is not None:
        updates["policy"] = {"zero": "zero", "renorm": "renorm"}[args.policy]
    return replace(config, **updates)


def _load_weights(spec: str | None) -> ahp.WeightHierarchy:
    if spec is None or spec == "reference":
        return ahp.reference_weights()
    return ahp.load_weights(spec)


def _build_state(args) -> engine.EngineState:
    config = _config_from_args(args)
    dataset = ingest.load_snapshot(args.snapshot)
    models = engine.load_models(args.models)
    weights = _load_weights(getattr(args, "weights", None))
    return engine.build_state(dataset, models, weights, config)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_ingest(args) -> int:
    manifest = ingest.load_manifest(args.manifest)
    dataset = ingest.load_dataset(manifest)
    report = validate_dataset(dataset)
    for issue in report.warnings:
        log.warning("%s", issue)
    if report.errors:
        for issue in report.errors:
            log.error("%s", issue)
        print(f"ingest: {len(report.errors)} validation error(s)", file=sys.stderr)
        return 3
    ingest.save_snapshot(dataset, args.out)
    profile = coverage_profile(dataset)
    for discipline, row in profile.items():
        print(
            f"{discipline}: books={row.books} reviews={row.reviews} "
            f"citations={row.citations} contexts={row.contexts} holdings={row.holdings}"
        )
    print(f"snapshot written to {args.out}")
    return 0


def cmd_train(args) -> int:
    config = _config_from_args(args)
    dataset = ingest.load_snapshot(args.snapshot)
    models = engine.train_models(dataset, config)
    engine.save_models(models, args.out)
    parts = []
    if models.toc_model:
        parts.append(f"toc topics K={models.toc_model.topic_count}")
    if models.citlit_model:
        parts.append(f"citation topics K={models.citlit_model.topic_count}")
    parts.append("sentiment " + ("trained" if models.sentiment else "skipped"))
    parts.append("function " + ("trained" if models.function else "skipped"))
    print("models written to {} ({})".format(args.out, ", ".join(parts)))
    return 0


def cmd_weights(args) -> int:
    config = _config_from_args(args)
    if args.reference:
        hierarchy = ahp.reference_weights()
    else:
        dataset = ingest.load_snapshot(args.snapshot)
        hierarchy = ahp.derive_weights(
            list(dataset.expert_metric_ratings), config.random_index
        )
    ahp.save_weights(hierarchy, args.out)
    for level, diag in hierarchy.consistency.items():
        flag = "" if diag.consistent else "  ** CR above 0.1 **"
        print(
            f"{level}: lambda_max={diag.lambda_max:.4f} CI={diag.ci:.4f} "
            f"CR={diag.cr:.4f}{flag}"
        )
    print(f"weights ({hierarchy.provenance}) written to {args.out}")
    return 0


def cmd_score(args) -> int:
    state = _build_state(args)
    _write_csv(args.out, scoring.export_header(), scoring.export_rows(state.scores))
    if args.metrics_out:
        _write_csv(
            args.metrics_out, metrics.export_header(), metrics.export_rows(state.vectors)
        )
    return 0


def cmd_rank(args) -> int:
    state = _build_state(args)
    ranked = scoring.rank_books(state.scores, args.key)
    rows = [
        [
            str(rank),
            score.isbn,
            state.dataset.books[score.isbn].title,
            state.dataset.books[score.isbn].discipline,
            repr(scoring.rank_value(score, args.key)),
        ]
        for rank, score in ranked
    ]
    _write_csv(args.out, ["rank", "isbn", "title", "discipline", "score"], rows)
    return 0


def cmd_report(args) -> int:
    state = _build_state(args)
    report = analysis.book_report(
        args.isbn,
        state.dataset,
        state.scores,
        state.vectors,
        window=state.config.aspect_window,
        profile=state.config.tokenizer_profile,
        function_labels=state.function_labels,
    )
    if args.format == "json":
        _write_text(
            args.out,
            json.dumps(analysis.report_to_payload(report), ensure_ascii=False,
                       sort_keys=True, indent=1) + "\n",
        )
    else:
        _write_text(args.out, analysis.render_report(report))
    return 0


def cmd_validate(args) -> int:
    state = _build_state(args)
    disciplines = sorted(
        {
            state.dataset.books[s.isbn].discipline
            for s in state.scores
            if any(e.isbn == s.isbn for e in state.dataset.expert_book_scores)
        }
    )
    rows: list[list[str]] = []
    scopes: list[str | None] = [None] + disciplines
    for scope in scopes:
        label = scope if scope is not None else "all"
        for key in ("total",) + GROUP_IDS:
            try:
                if key == "total":
                    result = analysis.validate_against_experts(
                        state.scores, state.dataset, scope
                    )
                else:
                    result = analysis.per_source_validation(
                        state.scores, state.dataset, key, scope
                    )
            except (InsufficientOverlap, ZeroVariance, InsufficientData) as exc:
                log.warning("validate %s/%s skipped: %s", label, key, exc)
                continue
            rows.append(
                [
                    label,
                    key,
                    result.method,
                    repr(result.coefficient),
                    str(result.n),
                    "" if result.p_value is None else repr(result.p_value),
                    "" if result.significance is None else f"p<={result.significance}",
                ]
            )
    _write_csv(
        args.out,
        ["scope", "basis", "method", "coefficient", "n", "p_value", "significance"],
        rows,
    )
    try:
        conversion = analysis.depth_breadth_conversion(state.vectors)
        print(
            f"depth/breadth conversion: k={conversion.k:.4f} "
            f"pearson={conversion.pearson_r:.4f} spearman={conversion.spearman_rho:.4f} "
            f"n={conversion.n}",
            file=sys.stderr,
        )
    except (InsufficientData, ZeroVariance) as exc:
        log.warning("depth/breadth conversion skipped: %s", exc)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    state = _build_state(args)
    app = create_app(state)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _add_state_args(sub, weights_default=None):
    sub.add_argument("--snapshot", required=True, help="dataset snapshot file")
    sub.add_argument("--models", required=True, help="model snapshot file")
    sub.add_argument(
        "--weights",
        default=weights_default,
        help="weights file, or 'reference' for the shipped configuration",
    )
    sub.add_argument("--policy", choices=["zero", "renorm"], default=None,
                     help="missing-data policy (default from config)")
    sub.add_argument("--config", help="engine config JSON")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bookimpact",
        description="Multi-source book impact scoring engine",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="load input files into a dataset snapshot")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("train", help="fit topic models and classifiers")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--k", type=int, help="topic count for both topic models")
    p.add_argument("--seed", type=int)
    p.add_argument("--iters", type=int)
    p.add_argument("--tau", type=float)
    p.add_argument("--config")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("weights", help="derive weights from the questionnaire, or emit the reference weights")
    p.add_argument("--snapshot", help="dataset snapshot holding the questionnaire")
    p.add_argument("--reference", action="store_true", help="emit the shipped reference weights")
    p.add_argument("--out", required=True)
    p.add_argument("--config")
    p.set_defaults(func=cmd_weights)

    p = sub.add_parser("score", help="compute the score table")
    _add_state_args(p)
    p.add_argument("--out", help="CSV output path (default stdout)")
    p.add_argument("--metrics-out", help="also write the raw metric table here")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("rank", help="ranking by total or per-source score")
    _add_state_args(p)
    p.add_argument("--key", choices=list(scoring.RANK_KEYS), default="total")
    p.add_argument("--out")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("report", help="fine-grained per-book report")
    _add_state_args(p)
    p.add_argument("--isbn", required=True)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("validate", help="correlation tables against expert scores")
    _add_state_args(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("serve", help="start the HTTP service")
    _add_state_args(p)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8040)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "weights" and not args.reference and not args.snapshot:
        parser.error("weights needs --snapshot or --reference")
    try:
        return args.func(args)
    except _DATA_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except _NOT_FOUND_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except BookImpactError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 5
    except Exception as exc:  # pragma: no cover - last resort
        log.exception("unexpected failure")
        print(f"unexpected error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
