"""Command line entry point.

Verbs mirror the pipeline stages plus corpus utilities:

    morphgen ingest   --in items.csv --out corpus.jsonl
    morphgen split    --in corpus.jsonl --out-dir splits/
    morphgen stats    --in corpus.jsonl [--correlation]
    morphgen generate --run runs/demo [--config run.json]
    morphgen parse    --run runs/demo
    morphgen score    --run runs/demo
    morphgen judge    --run runs/demo
    morphgen report   --run runs/demo

Run-stage verbs reload the config echoed into the run directory, so a
run can be resumed stage by stage. Exit status is nonzero only when the
batch itself fails (bad config, unreadable corpus, missing artifacts),
not when individual items fail to parse or score.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

from .corpus import (
    SPLIT_NAMES,
    SplitSpec,
    difficulty_correlation,
    load_corpus,
    save_corpus,
    stratified_split,
    summarize,
)
from .errors import CorpusFormatError, MorphgenError, UndefinedCorrelationError
from .pipeline import (
    RunConfig,
    generate_stage,
    judge_stage,
    load_run_config,
    parse_stage,
    report_stage,
    score_stage,
)


def _add_run_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--run", required=True, help="run directory")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="morphgen",
        description="Generate, parse, score, and judge morphology items.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("ingest", help="read a corpus file, validate, write canonical JSONL")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", dest="outfile", required=True)
    p.add_argument("--format", choices=["csv", "jsonl"], default=None,
                   help="override extension-based detection")

    p = sub.add_parser("split", help="stratified train/val/test split")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out-dir", dest="outdir", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ratios", default="0.8,0.1,0.1",
                   help="three comma-separated fractions summing to 1")
    p.add_argument("--strata", default="qt,task_diff",
                   help="comma-separated stratification axes")

    p = sub.add_parser("stats", help="corpus summary tables")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--correlation", action="store_true",
                   help="also report the word/task difficulty rank correlation")

    p = sub.add_parser("generate", help="render prompts and collect model output")
    _add_run_argument(p)
    p.add_argument("--config", help="run config JSON; defaults to the demo setup")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--strategies", help="comma-separated strategy subset")
    p.add_argument("--question-types", dest="question_types",
                   help="comma-separated question type subset")
    p.add_argument("--per-qt-count", dest="per_qt_count", type=int,
                   help="items per strategy and question type")
    p.add_argument("--endpoint", help="chat endpoint URL; switches the backend to http")
    p.add_argument("--model", help="override the backend model name")
    p.add_argument("--temperature", type=float, help="override sampling temperature")

    for verb, help_text in (
        ("parse", "parse transcripts into validated items"),
        ("score", "automated metrics for validated items"),
        ("judge", "rubric verdicts for validated items"),
        ("report", "aggregate tables from metrics and verdicts"),
    ):
        p = sub.add_parser(verb, help=help_text)
        _add_run_argument(p)

    return parser


def _cmd_ingest(args) -> int:
    corpus = load_corpus(args.infile, fmt=args.format)
    save_corpus(corpus, args.outfile)
    print(f"ingested {len(corpus)} items -> {args.outfile}")
    return 0


def _parse_ratios(text: str) -> tuple[float, float, float]:
    parts = [float(p) for p in text.split(",")]
    if len(parts) != 3:
        raise MorphgenError(f"--ratios needs three values, got {text!r}")
    return (parts[0], parts[1], parts[2])


def _cmd_split(args) -> int:
    corpus = load_corpus(args.infile)
    spec = SplitSpec(
        ratios=_parse_ratios(args.ratios),
        seed=args.seed,
        strata_keys=tuple(k.strip() for k in args.strata.split(",") if k.strip()),
    )
    result = stratified_split(corpus, spec)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for name, part in zip(SPLIT_NAMES, result.parts):
        path = outdir / f"{name}.jsonl"
        save_corpus(part, path)
        print(f"{name}: {len(part)} items -> {path}")
    for warning in result.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    return 0


def _cmd_stats(args) -> int:
    corpus = load_corpus(args.infile)
    summary = asdict(summarize(corpus))
    if args.correlation:
        try:
            summary["difficulty_spearman"] = difficulty_correlation(corpus)
        except UndefinedCorrelationError as exc:
            summary["difficulty_spearman"] = None
            summary["difficulty_spearman_note"] = str(exc)
    print(json.dumps(summary, indent=2, sort_keys=True, ensure_ascii=False))
    return 0


def _cmd_generate(args) -> int:
    if args.config:
        config = RunConfig.from_file(args.config)
    else:
        config = RunConfig()
    if args.seed is not None:
        config.seed = args.seed
    if args.strategies:
        config.strategies = [s.strip() for s in args.strategies.split(",")]
    if args.question_types:
        config.question_types = [q.strip() for q in args.question_types.split(",")]
    if args.per_qt_count is not None:
        config.per_qt_count = args.per_qt_count
    if args.endpoint:
        config.backend = {**config.backend, "kind": "http", "endpoint": args.endpoint}
    if args.model:
        config.backend = {**config.backend, "model_name": args.model}
    if args.temperature is not None:
        config.backend = {**config.backend, "temperature": args.temperature}
    config.validate()
    manifest = generate_stage(config, args.run)
    print(f"run {manifest.run_id}: {manifest.counts['requested']} requests -> {args.run}")
    for warning in manifest.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    return 0


def _cmd_parse(args) -> int:
    manifest = parse_stage(args.run, load_run_config(args.run))
    counts = manifest.counts
    print(
        f"parsed {counts['parsed']}/{counts['requested']}, "
        f"validated {counts['validated']}"
    )
    return 0


def _cmd_score(args) -> int:
    manifest = score_stage(args.run, load_run_config(args.run))
    print(f"scored {manifest.counts['scored']}/{manifest.counts['validated']}")
    return 0


def _cmd_judge(args) -> int:
    manifest = judge_stage(args.run, load_run_config(args.run))
    print(f"judged {manifest.counts['judged']}/{manifest.counts['validated']}")
    return 0


def _cmd_report(args) -> int:
    written = report_stage(args.run)
    for name in sorted(written):
        print(f"wrote {written[name]}")
    return 0


_COMMANDS = {
    "ingest": _cmd_ingest,
    "split": _cmd_split,
    "stats": _cmd_stats,
    "generate": _cmd_generate,
    "parse": _cmd_parse,
    "score": _cmd_score,
    "judge": _cmd_judge,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.verb](args)
    except CorpusFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for problem in exc.problems:
            print(f"  - {problem}", file=sys.stderr)
        return 1
    except (MorphgenError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
