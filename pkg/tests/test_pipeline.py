from __future__ import annotations

import json
import re
from pathlib import Path

import pytest

from morphgen import demo
from morphgen.errors import ConfigurationError
from morphgen.gateway import MockBackend
from morphgen.items import QuestionType
from morphgen.parsing import serialize_item
from morphgen.pipeline import (
    RunConfig,
    RunManifest,
    build_backend,
    generate_stage,
    judge_stage,
    parse_stage,
    plan_requests,
    report_stage,
    run_batch,
    score_stage,
)

ARTIFACTS = (
    "config.json",
    "transcripts.jsonl",
    "diagnostics.jsonl",
    "items.jsonl",
    "morph.jsonl",
    "metrics.jsonl",
    "rubric.jsonl",
)


def _config(**overrides) -> RunConfig:
    fields = dict(per_qt_count=1, seed=5)
    fields.update(overrides)
    return RunConfig(**fields)


def _read_jsonl(path: Path) -> list[dict]:
    return [json.loads(line) for line in path.read_text().splitlines() if line]


# ---------------------------------------------------------------------------
# config


def test_config_rejects_unknown_keys() -> None:
    with pytest.raises(ConfigurationError):
        RunConfig.from_dict({"per_qt_cout": 1})


def test_config_validates_members() -> None:
    with pytest.raises(ConfigurationError):
        _config(strategies=["warp_drive"]).validate()
    with pytest.raises(ConfigurationError):
        _config(question_types=["QT99"]).validate()
    with pytest.raises(ConfigurationError):
        _config(per_qt_count=0).validate()


def test_run_id_depends_on_config_not_time() -> None:
    assert _config().run_id() == _config().run_id()
    assert _config().run_id() != _config(seed=6).run_id()


def test_config_round_trips_through_file(tmp_path: Path) -> None:
    config = _config(wordlist_file="words.txt")
    path = tmp_path / "run.json"
    path.write_text(json.dumps(config.to_record()), encoding="utf-8")
    assert RunConfig.from_file(path) == config


def test_plan_requests_orders_grid_and_staggers_seeds() -> None:
    config = _config(
        strategies=["zero_shot", "cot"], question_types=["QT1", "QT2"], per_qt_count=2
    )
    planned = plan_requests(config)
    assert len(planned) == 8
    assert planned[0].key == "zero_shot-qt1-01"
    assert planned[1].key == "zero_shot-qt1-02"
    assert planned[4].key == "cot-qt1-01"
    assert [p.spec.seed for p in planned] == list(range(5, 13))


def test_build_backend_kinds(tmp_path: Path) -> None:
    assert build_backend({"kind": "demo"}).name == "mock-demo"
    assert build_backend({"kind": "demo"}, role="judge").name == "mock-judge"
    script = tmp_path / "mock.json"
    script.write_text(json.dumps([{"match": ".", "reply": "x"}]), encoding="utf-8")
    assert build_backend({"kind": "script", "path": str(script)}).name == "mock:mock"
    with pytest.raises(ConfigurationError):
        build_backend({"kind": "carrier-pigeon"})
    with pytest.raises(ConfigurationError):
        build_backend({"kind": "script"})


# ---------------------------------------------------------------------------
# manifest


def _manifest(**counts) -> RunManifest:
    manifest = RunManifest(
        run_id="abc",
        created_at="2024-01-01T00:00:00+00:00",
        template_version="v1",
        seed=0,
        backend={"kind": "mock", "model_name": "m"},
        judge_backend=None,
        config={},
    )
    manifest.counts.update(counts)
    return manifest


def test_manifest_enforces_monotone_counts() -> None:
    good = _manifest(requested=10, parsed=8, validated=8, scored=8, judged=7)
    good.validate()
    with pytest.raises(ConfigurationError):
        _manifest(requested=5, parsed=6).validate()
    with pytest.raises(ConfigurationError):
        _manifest(requested=-1).validate()


def test_manifest_round_trips(tmp_path: Path) -> None:
    manifest = _manifest(requested=3, parsed=3)
    manifest.save(tmp_path)
    loaded = RunManifest.from_file(tmp_path / "manifest.json")
    assert loaded == manifest


# ---------------------------------------------------------------------------
# staged demo runs


def test_demo_batch_all_counts_and_artifacts(tmp_path: Path) -> None:
    config = _config()
    manifest = run_batch(config, tmp_path)
    expected = len(config.strategies) * len(config.question_types)
    assert manifest.counts == {
        "requested": expected,
        "parsed": expected,
        "validated": expected,
        "scored": expected,
        "judged": expected,
    }
    assert manifest.corpus_digest == demo.demo_corpus().digest()
    for name in ARTIFACTS:
        assert (tmp_path / name).exists(), name
    assert (tmp_path / "tables" / "strategy_scores.csv").exists()
    assert (tmp_path / "tables" / "rubric.md").exists()


def test_rerun_is_byte_identical(tmp_path: Path) -> None:
    for sub in ("one", "two"):
        run_batch(_config(), tmp_path / sub)
    for name in ARTIFACTS:
        assert (tmp_path / "one" / name).read_bytes() == (
            tmp_path / "two" / name
        ).read_bytes(), name


def test_stages_resume_from_run_directory(tmp_path: Path) -> None:
    config = _config(strategies=["zero_shot"], question_types=["QT1", "QT3"])
    generate_stage(config, tmp_path)
    parse_stage(tmp_path)  # config reloaded from the run directory
    score_stage(tmp_path)
    judge_stage(tmp_path)
    report_stage(tmp_path)
    manifest = RunManifest.from_file(tmp_path / "manifest.json")
    assert manifest.counts["judged"] == 2


def test_parse_stage_requires_generate_first(tmp_path: Path) -> None:
    with pytest.raises(ConfigurationError):
        parse_stage(tmp_path, _config())


def test_malformed_replies_reduce_parsed_count(tmp_path: Path) -> None:
    config = _config(strategies=["zero_shot"])
    rules = [
        (re.escape("Question type QT2:"), "no options in this reply at all"),
        (re.escape("Question type QT7:"), "A. one\nB. two\nC. three\nAnswer: A"),
        (re.escape("Question type QT11:"), "Answer: Q"),
    ]
    backend = MockBackend(rules + demo.generation_rules(), name="mock-demo")
    generate_stage(config, tmp_path, backend=backend)
    manifest = parse_stage(tmp_path, config)
    assert manifest.counts["requested"] == 13
    assert manifest.counts["parsed"] == 10  # three injected malformed replies
    diagnostics = _read_jsonl(tmp_path / "diagnostics.jsonl")
    bad = {d["key"]: d["codes"] for d in diagnostics if not d["parsed"]}
    assert set(bad) == {"zero_shot-qt2-01", "zero_shot-qt7-01", "zero_shot-qt11-01"}
    assert all(codes for codes in bad.values())


def test_aborted_transcripts_surface_in_warnings_and_diagnostics(tmp_path: Path) -> None:
    config = _config(strategies=["cot_seq_multistep"], question_types=["QT1"])
    backend = MockBackend([(re.escape("step 1 of 3"), "no usable pick 123")])
    manifest = generate_stage(config, tmp_path, backend=backend)
    assert manifest.warnings
    manifest = parse_stage(tmp_path, config)
    assert manifest.counts["parsed"] == 0
    diagnostics = _read_jsonl(tmp_path / "diagnostics.jsonl")
    assert diagnostics[0]["status"] == "aborted"


def test_wordlist_file_feeds_spelling_check(tmp_path: Path) -> None:
    words = tmp_path / "words.txt"
    words.write_text("prepublication\nbeautiful\ndisagreement\n", encoding="utf-8")
    config = _config(
        strategies=["zero_shot"], question_types=["QT8"], wordlist_file=str(words)
    )
    generate_stage(config, tmp_path / "run")
    parse_stage(tmp_path / "run", config)
    morph = _read_jsonl(tmp_path / "run" / "morph.jsonl")
    assert morph[0]["checks_run"] == ["spelling_in_wordlist"]
    assert morph[0]["violations"] == []


def test_demo_backend_defaults_wordlist_for_qt8(tmp_path: Path) -> None:
    config = _config(strategies=["zero_shot"], question_types=["QT8"])
    generate_stage(config, tmp_path)
    parse_stage(tmp_path, config)
    morph = _read_jsonl(tmp_path / "morph.jsonl")
    assert morph[0]["checks_run"] == ["spelling_in_wordlist"]


def test_judge_disabled_skips_stage(tmp_path: Path) -> None:
    config = _config(
        strategies=["zero_shot"], question_types=["QT1"], judge={"enabled": False}
    )
    generate_stage(config, tmp_path)
    parse_stage(tmp_path, config)
    score_stage(tmp_path, config)
    manifest = judge_stage(tmp_path, config)
    assert manifest.counts["judged"] == 0
    assert not (tmp_path / "rubric.jsonl").exists()


def test_metrics_records_carry_scores_and_gaps(tmp_path: Path) -> None:
    config = _config(strategies=["few_shot"], question_types=["QT1"])
    run_batch(config, tmp_path)
    metrics = _read_jsonl(tmp_path / "metrics.jsonl")
    assert len(metrics) == 1
    record = metrics[0]
    assert set(record["scores"]) == {"complexity", "fluency", "grammar", "readability"}
    assert record["scores"]["grammar"] is None  # no grammar backend in demo runs
    assert "grammar" in record["gaps"]
    assert record["scores"]["fluency"] is not None  # mock supplies logprobs


def test_transcript_keys_align_with_item_ids(tmp_path: Path) -> None:
    config = _config(strategies=["cot_role"], question_types=["QT4"])
    run_batch(config, tmp_path)
    transcripts = _read_jsonl(tmp_path / "transcripts.jsonl")
    items = _read_jsonl(tmp_path / "items.jsonl")
    assert transcripts[0]["key"] == items[0]["id"] == "cot_role-qt4-01"
    parsed_from_reply = transcripts[0]["replies"][-1]["text"]
    assert serialize_item(demo.reference_item(QuestionType.QT4)) in parsed_from_reply
