"""Batch orchestration: a declarative run config, file-based stages, and
a manifest tying the artifacts together.

A run lives in one directory:

    config.json        the run config, echoed verbatim
    manifest.json      run id, counts, backend identity, warnings
    transcripts.jsonl  one record per planned request (ok or aborted)
    diagnostics.jsonl  parse and validation outcomes per request
    items.jsonl        parsed items that passed validation
    morph.jsonl        structural morphology check reports
    metrics.jsonl      automated scores per item
    rubric.jsonl       judge verdicts per item (scored or unscored)
    tables/            aggregate tables, CSV and markdown

Every stage reads its inputs from the run directory and rewrites the
manifest counts, so the CLI verbs can be run one at a time or all at
once via run_batch. Artifacts are deterministic for a fixed config and
scripted backend; the manifest's created_at timestamp is the only field
that varies between identical runs.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Optional, Sequence

from . import demo
from .corpus import Corpus, load_corpus
from .errors import ConfigurationError
from .gateway import (
    BackendConfig,
    DEFAULT_JUDGE_TEMPERATURE,
    HttpChatBackend,
    MockBackend,
    Transcript,
    load_mock_script,
    run_plans,
)
from .items import Item, QuestionType, TaskBand, validate_item
from .judge import judge_exemplars, judge_item, load_expert_labels
from .metrics import (
    HttpGrammarBackend,
    HttpParseBackend,
    MetricBackends,
    D_MAX_DEFAULT,
    score_item,
)
from .parsing import load_wordlist, morph_checks, parse_item
from .prompts import (
    GenerationSpec,
    StrategyId,
    TEMPLATE_VERSION,
    render,
    select_exemplars,
)
from .reports import (
    export_csv,
    export_markdown,
    per_qt_metric_tables,
    rubric_table,
    strategy_metric_table,
)

MANIFEST_NAME = "manifest.json"
CONFIG_NAME = "config.json"

_CONFIG_KEYS = {
    "strategies",
    "question_types",
    "per_qt_count",
    "seed",
    "grade_band",
    "word_difficulty",
    "task_difficulty",
    "affix_focus",
    "exemplar_count",
    "option_count",
    "d_max",
    "concurrency",
    "wordlist_file",
    "exemplar_corpus",
    "backend",
    "judge",
    "metrics",
}


@dataclass
class RunConfig:
    """Everything a batch run needs, loadable from one JSON document."""

    strategies: list[str] = field(
        default_factory=lambda: [s.value for s in StrategyId]
    )
    question_types: list[str] = field(
        default_factory=lambda: [q.value for q in QuestionType]
    )
    per_qt_count: int = 2
    seed: int = 7
    grade_band: str = "grades 3 to 5"
    word_difficulty: int = 3
    task_difficulty: str = TaskBand.MEDIUM.value
    affix_focus: Optional[str] = None
    exemplar_count: int = 3
    option_count: int = 3
    d_max: int = D_MAX_DEFAULT
    concurrency: int = 4
    #: plain-text lexicon for the QT8 spelling check, one word per line
    wordlist_file: Optional[str] = None
    #: path to a corpus file for exemplars; None uses the built-in demo set
    exemplar_corpus: Optional[str] = None
    #: {"kind": "demo"} | {"kind": "script", "path": ...} | {"kind": "http", ...}
    backend: dict = field(default_factory=lambda: {"kind": "demo"})
    judge: dict = field(
        default_factory=lambda: {
            "enabled": True,
            "backend": {"kind": "demo"},
            "exemplars_per_qt": 1,
        }
    )
    #: optional endpoints: grammar, parse; fluency uses the generation
    #: backend's logprobs when it offers them
    metrics: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        unknown = set(data) - _CONFIG_KEYS
        if unknown:
            raise ConfigurationError(
                f"unknown config keys: {', '.join(sorted(unknown))}"
            )
        config = cls(**data)
        config.validate()
        return config

    @classmethod
    def from_file(cls, path: str | Path) -> "RunConfig":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"config {path} is not valid JSON: {exc}")
        if not isinstance(data, dict):
            raise ConfigurationError(f"config {path} must be a JSON object")
        return cls.from_dict(data)

    def validate(self) -> None:
        for s in self.strategies:
            try:
                StrategyId(s)
            except ValueError:
                raise ConfigurationError(f"unknown strategy {s!r}")
        for q in self.question_types:
            try:
                QuestionType(q)
            except ValueError:
                raise ConfigurationError(f"unknown question type {q!r}")
        if not self.strategies or not self.question_types:
            raise ConfigurationError("strategies and question_types must be non-empty")
        if self.per_qt_count < 1:
            raise ConfigurationError("per_qt_count must be >= 1")
        try:
            TaskBand(self.task_difficulty)
        except ValueError:
            raise ConfigurationError(
                f"unknown task difficulty {self.task_difficulty!r}"
            )
        if self.backend.get("kind") not in {"demo", "script", "http"}:
            raise ConfigurationError("backend.kind must be demo, script, or http")

    def to_record(self) -> dict:
        return {
            "strategies": list(self.strategies),
            "question_types": list(self.question_types),
            "per_qt_count": self.per_qt_count,
            "seed": self.seed,
            "grade_band": self.grade_band,
            "word_difficulty": self.word_difficulty,
            "task_difficulty": self.task_difficulty,
            "affix_focus": self.affix_focus,
            "exemplar_count": self.exemplar_count,
            "option_count": self.option_count,
            "d_max": self.d_max,
            "concurrency": self.concurrency,
            "wordlist_file": self.wordlist_file,
            "exemplar_corpus": self.exemplar_corpus,
            "backend": self.backend,
            "judge": self.judge,
            "metrics": self.metrics,
        }

    def run_id(self) -> str:
        """Content digest of the run-defining fields; stable across
        reruns of the same configuration."""
        basis = json.dumps(
            {"config": self.to_record(), "template_version": TEMPLATE_VERSION},
            sort_keys=True,
        )
        return hashlib.sha256(basis.encode("utf-8")).hexdigest()[:12]


# ---------------------------------------------------------------------------
# Backends


def build_backend(spec: dict, role: str = "generate"):
    """Instantiate a chat backend from its config block."""
    kind = spec.get("kind")
    if kind == "demo":
        if role == "judge":
            return MockBackend(demo.judge_rules(), name="mock-judge")
        return MockBackend(demo.generation_rules(), name="mock-demo")
    if kind == "script":
        if "path" not in spec:
            raise ConfigurationError("script backend needs a 'path'")
        return load_mock_script(spec["path"])
    if kind == "http":
        temperature = spec.get(
            "temperature",
            DEFAULT_JUDGE_TEMPERATURE if role == "judge" else None,
        )
        kwargs = {
            k: spec[k]
            for k in (
                "endpoint",
                "model_name",
                "max_tokens",
                "timeout",
                "max_retries",
                "auth_env",
                "concurrency",
                "backoff_base",
            )
            if k in spec
        }
        if temperature is not None:
            kwargs["temperature"] = temperature
        return HttpChatBackend(BackendConfig(**kwargs))
    raise ConfigurationError(f"unknown backend kind {kind!r}")


def backend_record(backend) -> dict:
    if isinstance(backend, HttpChatBackend):
        return {"kind": "http", **backend.config.to_record()}
    return {"kind": "mock", "model_name": backend.name}


def build_metric_backends(config: RunConfig, gen_backend) -> MetricBackends:
    grammar = None
    if config.metrics.get("grammar_endpoint"):
        grammar = HttpGrammarBackend(config.metrics["grammar_endpoint"])
    parse = None
    if config.metrics.get("parse_endpoint"):
        parse = HttpParseBackend(config.metrics["parse_endpoint"])
    logprobs = None
    if hasattr(gen_backend, "logprobs"):
        logprobs = lambda text: gen_backend.logprobs(text).logprobs  # noqa: E731
    return MetricBackends(grammar=grammar, logprobs=logprobs, parse=parse)


def _exemplar_pool(config: RunConfig) -> Corpus:
    if config.exemplar_corpus:
        return load_corpus(config.exemplar_corpus)
    return demo.demo_corpus()


# ---------------------------------------------------------------------------
# Manifest


_COUNT_CHAIN = ("requested", "parsed", "validated", "scored", "judged")


@dataclass
class RunManifest:
    run_id: str
    created_at: str
    template_version: str
    seed: int
    backend: dict
    judge_backend: Optional[dict]
    config: dict
    corpus_digest: str = ""
    counts: dict = field(
        default_factory=lambda: {name: 0 for name in _COUNT_CHAIN}
    )
    warnings: list[str] = field(default_factory=list)

    def validate(self) -> None:
        values = [self.counts.get(name, 0) for name in _COUNT_CHAIN]
        if any(v < 0 for v in values):
            raise ConfigurationError("manifest counts must be non-negative")
        for earlier, later, a, b in zip(
            _COUNT_CHAIN, _COUNT_CHAIN[1:], values, values[1:]
        ):
            if b > a:
                raise ConfigurationError(
                    f"count {later} ({b}) exceeds {earlier} ({a})"
                )

    def to_json(self) -> str:
        self.validate()
        return json.dumps(
            {
                "run_id": self.run_id,
                "created_at": self.created_at,
                "template_version": self.template_version,
                "seed": self.seed,
                "backend": self.backend,
                "judge_backend": self.judge_backend,
                "config": self.config,
                "corpus_digest": self.corpus_digest,
                "counts": self.counts,
                "warnings": self.warnings,
            },
            indent=2,
            sort_keys=True,
            ensure_ascii=False,
        ) + "\n"

    @classmethod
    def from_file(cls, path: str | Path) -> "RunManifest":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        manifest = cls(**data)
        manifest.validate()
        return manifest

    def save(self, run_dir: str | Path) -> None:
        (Path(run_dir) / MANIFEST_NAME).write_text(
            self.to_json(), encoding="utf-8"
        )


def _load_manifest(run_dir: Path) -> RunManifest:
    path = run_dir / MANIFEST_NAME
    if not path.exists():
        raise ConfigurationError(f"{run_dir} has no {MANIFEST_NAME}; generate first")
    return RunManifest.from_file(path)


def load_run_config(run_dir: str | Path) -> RunConfig:
    path = Path(run_dir) / CONFIG_NAME
    if not path.exists():
        raise ConfigurationError(f"{run_dir} has no {CONFIG_NAME}; generate first")
    return RunConfig.from_file(path)


# ---------------------------------------------------------------------------
# Artifact I/O


def _write_jsonl(path: Path, records: Sequence[dict]) -> None:
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True, ensure_ascii=False))
            fh.write("\n")


def _read_jsonl(path: Path) -> list[dict]:
    if not path.exists():
        raise ConfigurationError(f"missing artifact {path.name}; run earlier stages")
    with path.open("r", encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


# ---------------------------------------------------------------------------
# Stages


@dataclass(frozen=True)
class PlannedRequest:
    key: str
    spec: GenerationSpec


def plan_requests(config: RunConfig) -> list[PlannedRequest]:
    """Enumerate the request grid in a fixed order: strategy, then
    question type, then item index. The per-request seed is the config
    seed plus the enumeration ordinal."""
    planned: list[PlannedRequest] = []
    ordinal = 0
    for strategy_name in config.strategies:
        strategy = StrategyId(strategy_name)
        for qt_name in config.question_types:
            qt = QuestionType(qt_name)
            for index in range(config.per_qt_count):
                spec = GenerationSpec(
                    qt=qt,
                    strategy=strategy,
                    grade_band=config.grade_band,
                    word_difficulty=config.word_difficulty,
                    task_difficulty=TaskBand(config.task_difficulty),
                    affix_focus=config.affix_focus,
                    exemplar_count=config.exemplar_count,
                    option_count=config.option_count,
                    seed=config.seed + ordinal,
                )
                key = f"{strategy.value}-{qt.value.lower()}-{index + 1:02d}"
                planned.append(PlannedRequest(key=key, spec=spec))
                ordinal += 1
    return planned


def generate_stage(config: RunConfig, run_dir: str | Path, backend=None) -> RunManifest:
    """Render all prompts, run them, and write transcripts plus the
    initial manifest."""
    run_dir = Path(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    backend = backend or build_backend(config.backend, role="generate")

    pool = _exemplar_pool(config)
    planned = plan_requests(config)
    plans = []
    for req in planned:
        exemplars = None
        if req.spec.strategy is StrategyId.FEW_SHOT:
            exemplars = select_exemplars(pool.items, req.spec)
        plans.append(render(req.spec, exemplars))

    transcripts = run_plans(plans, backend, concurrency=config.concurrency)

    records = []
    for req, transcript in zip(planned, transcripts):
        records.append(
            {"key": req.key, "seed": req.spec.seed, **transcript.to_record()}
        )
    _write_jsonl(run_dir / "transcripts.jsonl", records)

    (run_dir / CONFIG_NAME).write_text(
        json.dumps(config.to_record(), indent=2, sort_keys=True, ensure_ascii=False)
        + "\n",
        encoding="utf-8",
    )

    manifest = RunManifest(
        run_id=config.run_id(),
        created_at=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        template_version=TEMPLATE_VERSION,
        seed=config.seed,
        backend=backend_record(backend),
        judge_backend=None,
        config=config.to_record(),
        corpus_digest=pool.digest(),
    )
    manifest.counts["requested"] = len(planned)
    aborted = sum(1 for t in transcripts if t.status != "complete")
    if aborted:
        manifest.warnings.append(f"{aborted} request(s) aborted mid-plan")
    manifest.save(run_dir)
    return manifest


def parse_stage(run_dir: str | Path, config: Optional[RunConfig] = None) -> RunManifest:
    """Parse transcripts into items, validate, and run morphology checks."""
    run_dir = Path(run_dir)
    config = config or load_run_config(run_dir)
    manifest = _load_manifest(run_dir)
    if config.wordlist_file:
        wordlist = load_wordlist(config.wordlist_file)
    elif config.backend.get("kind") == "demo":
        wordlist = set(demo.DEMO_WORDLIST)
    else:
        wordlist = None

    diagnostics: list[dict] = []
    item_records: list[dict] = []
    morph_records: list[dict] = []
    parsed = validated = 0

    for rec in _read_jsonl(run_dir / "transcripts.jsonl"):
        key = rec["key"]
        qt = QuestionType(rec["qt"])
        entry: dict[str, Any] = {
            "key": key,
            "strategy": rec["strategy"],
            "qt": rec["qt"],
            "status": rec["status"],
            "codes": [],
            "problems": [],
            "parsed": False,
            "valid": False,
        }
        if rec["status"] != "complete":
            entry["problems"] = [rec.get("error") or "request aborted"]
            diagnostics.append(entry)
            continue

        raw = rec["replies"][-1]["text"]
        result = parse_item(
            raw, qt, item_id=key, expected_options=config.option_count
        )
        entry["codes"] = result.codes
        if result.item is None:
            diagnostics.append(entry)
            continue
        parsed += 1
        entry["parsed"] = True

        item = result.item
        item.word_diff_raw = float(config.word_difficulty)
        problems = validate_item(item)
        entry["problems"] = problems
        if problems:
            diagnostics.append(entry)
            continue
        validated += 1
        entry["valid"] = True
        diagnostics.append(entry)

        item_records.append(
            {
                "strategy": rec["strategy"],
                "model": manifest.backend.get("model_name", "unknown"),
                "seed": rec["seed"],
                **item.to_record(),
            }
        )
        report = morph_checks(item, wordlist=wordlist)
        morph_records.append(
            {"strategy": rec["strategy"], "qt": rec["qt"], **report.to_record()}
        )

    _write_jsonl(run_dir / "diagnostics.jsonl", diagnostics)
    _write_jsonl(run_dir / "items.jsonl", item_records)
    _write_jsonl(run_dir / "morph.jsonl", morph_records)

    manifest.counts["parsed"] = parsed
    manifest.counts["validated"] = validated
    manifest.save(run_dir)
    return manifest


def _load_items(run_dir: Path) -> list[tuple[dict, Item]]:
    out = []
    for rec in _read_jsonl(run_dir / "items.jsonl"):
        payload = {
            k: v for k, v in rec.items() if k not in {"strategy", "model", "seed"}
        }
        out.append((rec, Item.from_record(payload)))
    return out


def score_stage(
    run_dir: str | Path,
    config: Optional[RunConfig] = None,
    backends: Optional[MetricBackends] = None,
) -> RunManifest:
    """Automated metrics for every validated item."""
    run_dir = Path(run_dir)
    config = config or load_run_config(run_dir)
    manifest = _load_manifest(run_dir)
    if backends is None:
        gen_backend = build_backend(config.backend, role="generate")
        backends = build_metric_backends(config, gen_backend)

    records = []
    scored = 0
    for rec, item in _load_items(run_dir):
        base = {
            "item_id": item.id,
            "strategy": rec["strategy"],
            "qt": item.qt.value,
            "model": rec["model"],
        }
        try:
            report = score_item(item, backends, d_max=config.d_max)
        except Exception as exc:  # per-item failures must not kill the batch
            records.append({**base, "error": str(exc), "scores": {}})
            continue
        scored += 1
        payload = report.to_record()
        payload.pop("item_id")
        records.append({**base, **payload})

    _write_jsonl(run_dir / "metrics.jsonl", records)
    manifest.counts["scored"] = scored
    manifest.save(run_dir)
    return manifest


def judge_stage(
    run_dir: str | Path,
    config: Optional[RunConfig] = None,
    backend=None,
) -> RunManifest:
    """Rubric verdicts for every validated item."""
    run_dir = Path(run_dir)
    config = config or load_run_config(run_dir)
    manifest = _load_manifest(run_dir)
    judge_cfg = config.judge or {}
    if not judge_cfg.get("enabled", True):
        manifest.counts["judged"] = 0
        manifest.save(run_dir)
        return manifest
    backend = backend or build_backend(
        judge_cfg.get("backend", {"kind": "demo"}), role="judge"
    )
    if judge_cfg.get("exemplar_labels"):
        labels = load_expert_labels(judge_cfg["exemplar_labels"]).dims_for()
    else:
        labels = demo.reference_labels()
    exemplars = judge_exemplars(
        _exemplar_pool(config).items,
        labels,
        per_qt=judge_cfg.get("exemplars_per_qt", 1),
    )

    records = []
    judged = 0
    for rec, item in _load_items(run_dir):
        base = {
            "item_id": item.id,
            "strategy": rec["strategy"],
            "qt": item.qt.value,
            "model": rec["model"],
        }
        score, error = judge_item(item, backend, exemplars)
        if score is None:
            records.append(
                {**base, "scores": None, "total": None, "error": error}
            )
            continue
        judged += 1
        records.append(
            {
                **base,
                "scores": score.dims.as_dict(),
                "total": score.total,
                "error": None,
            }
        )

    _write_jsonl(run_dir / "rubric.jsonl", records)
    manifest.counts["judged"] = judged
    manifest.judge_backend = backend_record(backend)
    manifest.save(run_dir)
    return manifest


def report_stage(run_dir: str | Path) -> dict[str, Path]:
    """Aggregate metrics and rubric records into exported tables."""
    run_dir = Path(run_dir)
    tables_dir = run_dir / "tables"
    tables_dir.mkdir(exist_ok=True)

    metric_records = [
        rec for rec in _read_jsonl(run_dir / "metrics.jsonl") if "scores" in rec and rec["scores"]
    ]
    written: dict[str, Path] = {}

    def emit(name: str, table) -> None:
        csv_path = tables_dir / f"{name}.csv"
        md_path = tables_dir / f"{name}.md"
        csv_path.write_text(export_csv(table), encoding="utf-8")
        md_path.write_text(export_markdown(table), encoding="utf-8")
        written[f"{name}.csv"] = csv_path
        written[f"{name}.md"] = md_path

    emit("strategy_scores", strategy_metric_table(metric_records))
    for qt, table in per_qt_metric_tables(metric_records).items():
        emit(f"scores_{qt.lower()}", table)

    rubric_path = run_dir / "rubric.jsonl"
    if rubric_path.exists():
        rubric_records = _read_jsonl(rubric_path)
        if any(rec.get("scores") for rec in rubric_records):
            emit("rubric", rubric_table(rubric_records))

    return written


def run_batch(config: RunConfig, run_dir: str | Path, backend=None, judge_backend=None) -> RunManifest:
    """Run every stage in order and return the final manifest."""
    generate_stage(config, run_dir, backend=backend)
    parse_stage(run_dir, config)
    score_stage(run_dir, config)
    judge_stage(run_dir, config, backend=judge_backend)
    report_stage(run_dir)
    return _load_manifest(Path(run_dir))
