"""Acceptance suite: one test (or lettered part) per shipping criterion.

Where a criterion is about a computation, the expected values here come
from hand arithmetic or a test-side reimplementation, never from the
library helpers under test. Tolerances and time budgets are pinned in
the asserts. The terminal summary hook in conftest prints one line per
criterion.
"""

from __future__ import annotations

import csv
import json
import math
import os
import random
import re
import statistics
import time
from pathlib import Path

import pytest

from morphgen import demo
from morphgen.corpus import (
    Corpus,
    SplitSpec,
    difficulty_correlation,
    load_corpus,
    save_corpus,
    stratified_split,
)
from morphgen.errors import UndefinedCorrelationError
from morphgen.gateway import MockBackend, run_plan
from morphgen.items import Item, QuestionType, recode_word_difficulty
from morphgen.judge import (
    ExpertLabel,
    ExpertLabelSet,
    RubricDimensions,
    RubricScore,
    agreement,
)
from morphgen.metrics import (
    complexity_score,
    fluency_score,
    grammar_score,
    perplexity_from_logprobs,
    readability,
)
from morphgen.parsing import morph_checks, parse_item, serialize_item
from morphgen.pipeline import RunConfig, run_batch
from morphgen.prompts import GenerationSpec, StrategyId, extract_chosen_word, render
from morphgen.stats import spearman_rho

RUBRIC_DIMS = (
    "clarity",
    "answer_accuracy",
    "distractor_quality",
    "word_difficulty_fit",
    "task_difficulty_fit",
)


def _timer():
    start = time.perf_counter()
    return lambda: time.perf_counter() - start


# ---------------------------------------------------------------------------
# criterion 1: the four metric formulas on hand-computed examples


def test_c1_formula_golden_suite() -> None:
    elapsed = _timer()

    # readability = 206.835 - 1.015*(W/S) - 84.6*(Syl/W), score clamped to [0, 100]
    flat = readability("The cat sat on the mat.")  # W=6 S=1 Syl=6
    assert abs(flat.raw - 116.145) <= 1e-9
    assert flat.score == 100.0

    hammer = readability(" ".join(["hammer"] * 20) + ".")  # W=20 S=1 Syl=40
    assert abs(hammer.raw - 17.335) <= 1e-9
    assert f"{hammer.score:.2f}" == f"{17.335:.2f}" == "17.34"

    two = readability("The cat sat. The dog slept.")  # W=6 S=2 Syl=6
    assert abs(two.raw - 119.19) <= 1e-9
    assert two.score == 100.0

    dense = readability("Incomprehensibility.")  # W=1 S=1 Syl=8
    assert abs(dense.raw - (206.835 - 1.015 - 84.6 * 8)) <= 1e-9
    assert dense.score == 0.0

    # grammar: d errors per 100 words, score 100*(1 - d/10) clamped
    assert grammar_score(0, 37) == (0.0, 100.0)
    assert grammar_score(1, 50) == (2.0, 80.0)
    raw, score = grammar_score(3, 80)
    assert abs(raw - 3.75) <= 1e-9
    assert abs(score - 62.5) <= 1e-9
    assert grammar_score(10, 100) == (10.0, 0.0)
    assert grammar_score(25, 100) == (25.0, 0.0)

    # fluency: 100*(1 - (ppl - 20)/100) clamped; ppl = exp(-mean logprob)
    assert fluency_score(20.0) == 100.0
    assert fluency_score(1.0) == 100.0
    assert fluency_score(70.0) == 50.0
    assert fluency_score(120.0) == 0.0
    assert fluency_score(500.0) == 0.0
    assert abs(perplexity_from_logprobs([-1.0]) - math.e) <= 1e-9
    assert abs(perplexity_from_logprobs([-math.log(30.0)] * 3) - 30.0) <= 1e-9
    assert abs(fluency_score(perplexity_from_logprobs([-math.log(30.0)] * 2)) - 90.0) <= 1e-9

    # complexity: 100*depth/d_max clamped
    assert complexity_score(2) == 20.0
    assert complexity_score(10) == 100.0
    assert complexity_score(15) == 100.0
    assert complexity_score(3, d_max=6) == 50.0

    assert elapsed() < 1.0


# ---------------------------------------------------------------------------
# criterion 2: five-point recoding across every half step


def test_c2_difficulty_recoding_grid() -> None:
    elapsed = _timer()
    grid = [
        (1.0, 1), (1.5, 1),
        (2.0, 2), (2.5, 2),
        (3.0, 3), (3.5, 3),
        (4.0, 4), (4.5, 4),
        (5.0, 5),
    ]
    assert len(grid) == 9
    for raw, expected in grid:
        assert recode_word_difficulty(raw) == expected, raw
    assert elapsed() < 1.0


# ---------------------------------------------------------------------------
# criterion 3: rank correlation against a brute-force oracle


def _oracle_ranks(values: list[float]) -> list[float]:
    ordered = sorted(values)
    ranks = []
    for v in values:
        positions = [i + 1 for i, s in enumerate(ordered) if s == v]
        ranks.append(sum(positions) / len(positions))
    return ranks


def test_c3a_rank_correlation_matches_oracle() -> None:
    rng = random.Random(0xC3)
    compared = 0
    attempts = 0
    while compared < 1000:
        attempts += 1
        assert attempts < 20000
        n = rng.randint(2, 8)
        xs = [rng.choice((0.0, 1.0, 2.0, 3.0)) for _ in range(n)]
        ys = [rng.choice((0.0, 1.0, 2.0, 3.0)) for _ in range(n)]
        if len(set(xs)) < 2 or len(set(ys)) < 2:
            with pytest.raises(UndefinedCorrelationError):
                spearman_rho(xs, ys)
            continue
        expected = statistics.correlation(_oracle_ranks(xs), _oracle_ranks(ys))
        assert abs(spearman_rho(xs, ys) - expected) <= 1e-9
        compared += 1


def test_c3b_rated_corpus_correlation() -> None:
    # Runs only when the externally released difficulty-rated item set
    # is available; point MORPHGEN_RATED_CORPUS at it or drop it into
    # data/rated_corpus.jsonl.
    candidates = []
    env = os.environ.get("MORPHGEN_RATED_CORPUS")
    if env:
        candidates.append(Path(env))
    candidates.append(Path(__file__).resolve().parents[1] / "data" / "rated_corpus.jsonl")
    path = next((p for p in candidates if p.exists()), None)
    if path is None:
        pytest.skip("difficulty-rated corpus file not supplied")
    rho = difficulty_correlation(load_corpus(path))
    assert abs(rho - 0.469) <= 0.02


# ---------------------------------------------------------------------------
# criterion 4: stratified split properties on random corpora


def _random_item(trial: int, i: int, rng: random.Random) -> Item:
    return Item(
        id=f"r{trial}-{i:03d}",
        stem="Pick the right part.",
        options=("alpha", "beta", "gamma"),
        answer_index=rng.randint(0, 2),
        qt=rng.choice(list(QuestionType)),
        task_diff_raw=rng.choice(
            (None, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0)
        ),
    )


def _oracle_apportion(total: int, ratios) -> list[int]:
    quotas = [total * r for r in ratios]
    base = [math.floor(q) for q in quotas]
    order = sorted(range(len(ratios)), key=lambda i: (-(quotas[i] - base[i]), i))
    for i in order[: total - sum(base)]:
        base[i] += 1
    return base


def _oracle_stratum(item: Item, axes) -> tuple:
    parts = []
    for axis in axes:
        if axis == "qt":
            parts.append(item.qt.value)
        else:  # task_diff, default cuts (2, 3): halves merge down, then
            # strict less-than against each cut
            if item.task_diff_raw is None:
                parts.append("unknown")
            else:
                level = int(item.task_diff_raw)
                parts.append("easy" if level < 2 else "medium" if level < 3 else "hard")
    return tuple(parts)


def test_c4_stratified_split_properties(tmp_path: Path) -> None:
    elapsed = _timer()
    rng = random.Random(0xC4)
    ratio_choices = ((0.8, 0.1, 0.1), (0.6, 0.2, 0.2), (0.5, 0.3, 0.2))
    axis_choices = (("qt",), ("task_diff",), ("qt", "task_diff"))
    for trial in range(200):
        items = [_random_item(trial, i, rng) for i in range(rng.randint(1, 60))]
        corpus = Corpus(items=items)
        spec = SplitSpec(
            ratios=rng.choice(ratio_choices),
            seed=rng.randint(0, 10**6),
            strata_keys=rng.choice(axis_choices),
        )
        first = stratified_split(corpus, spec)
        again = stratified_split(corpus, spec)

        # exact partition, pairwise disjoint
        split_ids = [[item.id for item in part] for part in first.parts]
        assert sorted(sum(split_ids, [])) == sorted(item.id for item in items)
        sets = [set(ids) for ids in split_ids]
        assert not (sets[0] & sets[1] or sets[0] & sets[2] or sets[1] & sets[2])

        # per-stratum sizes equal the largest-remainder apportionment
        strata: dict[tuple, set[str]] = {}
        for item in items:
            key = _oracle_stratum(item, spec.strata_keys)
            strata.setdefault(key, set()).add(item.id)
        for members in strata.values():
            expected = _oracle_apportion(len(members), spec.ratios)
            assert [len(members & s) for s in sets] == expected

        # same seed, byte-identical saved splits
        for run, result in (("a", first), ("b", again)):
            for name, part in zip(("train", "val", "test"), result.parts):
                save_corpus(part, tmp_path / f"{run}-{name}.jsonl")
        for name in ("train", "val", "test"):
            assert (tmp_path / f"a-{name}.jsonl").read_bytes() == (
                tmp_path / f"b-{name}.jsonl"
            ).read_bytes()
    assert elapsed() < 10.0


# ---------------------------------------------------------------------------
# criterion 5: the reference items parse clean; malformed output is coded


def test_c5a_reference_items_parse_clean(refs) -> None:
    elapsed = _timer()
    assert len(refs) == 13
    for qt_value, ref in sorted(refs.items()):
        result = parse_item(
            serialize_item(ref),
            ref.qt,
            item_id=ref.id,
            expected_options=len(ref.options),
        )
        assert not result.fatal, (qt_value, result.codes)
        parsed = result.item
        assert parsed.stem == ref.stem
        assert parsed.options == ref.options
        assert parsed.answer_index == ref.answer_index
        assert parsed.qt == ref.qt
        if ref.target_word:
            assert parsed.target_word == ref.target_word
        report = morph_checks(parsed, wordlist=set(demo.DEMO_WORDLIST))
        assert report.violations == [], (
            qt_value,
            [v.to_record() for v in report.violations],
        )
    assert elapsed() < 1.0


DOCUMENTED_CODES = frozenset({
    "NO_STEM",
    "OPTION_COUNT",
    "OPTION_ORDER",
    "OPTION_EMPTY",
    "ANSWER_MISSING",
    "ANSWER_RANGE",
    "ANSWER_MULTIPLE",
})

#: ten crafted malformed replies and the diagnostic each must trigger
MALFORMED = {
    "no_stem": (
        "A. mis\nB. misw\nC. ote\nAnswer: A",
        "NO_STEM",
    ),
    "two_options": (
        "What is the prefix in the word miswrote?\nA. mis\nB. misw\nAnswer: A",
        "OPTION_COUNT",
    ),
    "four_options": (
        "What is the prefix in the word miswrote?\n"
        "A. mis\nB. misw\nC. ote\nD. wrote\nAnswer: A",
        "OPTION_COUNT",
    ),
    "run_not_starting_at_a": (
        "What is the prefix in the word miswrote?\nB. mis\nC. misw\nD. ote\nAnswer: B",
        "OPTION_ORDER",
    ),
    "empty_option": (
        "What is the prefix in the word miswrote?\nA. mis\nB.\nC. ote\nAnswer: A",
        "OPTION_EMPTY",
    ),
    "no_answer_line": (
        "What is the prefix in the word miswrote?\nA. mis\nB. misw\nC. ote",
        "ANSWER_MISSING",
    ),
    "answer_out_of_range": (
        "What is the prefix in the word miswrote?\nA. mis\nB. misw\nC. ote\nAnswer: D",
        "ANSWER_RANGE",
    ),
    "two_answer_lines": (
        "What is the prefix in the word miswrote?\n"
        "A. mis\nB. misw\nC. ote\nAnswer: A\nAnswer: B",
        "ANSWER_MULTIPLE",
    ),
    "prose_only": (
        "The word miswrote contains the prefix mis, which signals error.",
        "OPTION_COUNT",
    ),
    "broken_letter_sequence": (
        "What is the prefix in the word miswrote?\nA. mis\nC. misw\nB. ote\nAnswer: A",
        "OPTION_COUNT",
    ),
}


def test_c5b_malformed_outputs_yield_documented_codes() -> None:
    elapsed = _timer()
    assert len(MALFORMED) == 10
    for name, (raw, code) in sorted(MALFORMED.items()):
        result = parse_item(raw, QuestionType.QT1, item_id=name)
        assert code in result.codes, (name, result.codes)
        assert set(result.codes) <= DOCUMENTED_CODES, (name, result.codes)
        if code == "ANSWER_MULTIPLE":  # a note, not fatal: last answer wins
            assert result.item is not None
            assert result.item.answer_index == 1
        else:
            assert result.item is None
    assert elapsed() < 1.0


# ---------------------------------------------------------------------------
# criterion 6: internal consistency of the published summary tables


#: (strategy, model) -> five published dimension means and the published total
REFERENCE_RUBRIC_ROWS = {
    ("zero_shot", "gemma"): ((0.9417, 0.9061, 0.7961, 0.8026, 0.4854), 3.9353),
    ("zero_shot", "gpt35"): ((0.8356, 0.7003, 0.7243, 0.6455, 0.4247), 3.3356),
    ("few_shot", "gemma"): ((0.9421, 0.8994, 0.7927, 0.8049, 0.4451), 3.8933),
    ("few_shot", "gpt35"): ((0.8530, 0.6991, 0.7333, 0.7043, 0.4821), 3.4821),
    ("cot", "gemma"): ((0.8747, 0.8031, 0.6854, 0.8056, 0.4041), 3.5831),
    ("cot", "gpt35"): ((0.8393, 0.7128, 0.7265, 0.6496, 0.4137), 3.3470),
    ("cot_role", "gemma"): ((0.9544, 0.9088, 0.7872, 0.8237, 0.4407), 3.9179),
    ("cot_role", "gpt35"): ((0.8731, 0.7702, 0.7307, 0.6432, 0.4443), 3.4717),
    ("cot_seq_onego", "gemma"): ((0.9745, 0.9209, 0.8163, 0.8444, 0.5204), 4.0816),
    ("cot_seq_onego", "gpt35"): ((0.8638, 0.7500, 0.6845, 0.7276, 0.5103), 3.5483),
    ("cot_seq_multistep", "gemma"): ((0.9454, 0.9156, 0.8015, 0.8263, 0.5037), 4.0074),
    ("cot_seq_multistep", "gpt35"): ((0.6781, 0.5856, 0.6164, 0.6096, 0.3716), 2.8733),
}

#: (metric, model) -> six published per-strategy means in canonical
#: strategy order, and the published across-strategy average
REFERENCE_METRIC_COLUMNS = {
    ("complexity", "gemma"): ((90.67, 91.10, 91.54, 90.03, 90.71, 91.01), 90.87),
    ("complexity", "gpt35"): ((93.23, 93.40, 92.46, 91.03, 91.78, 93.15), 92.51),
    ("fluency", "gemma"): ((31.64, 32.10, 36.28, 29.58, 30.73, 29.83), 31.75),
    ("fluency", "gpt35"): ((33.93, 41.46, 36.97, 34.43, 35.94, 35.43), 35.70),
    ("grammar", "gemma"): ((90.19, 91.76, 91.13, 94.86, 94.62, 95.64), 93.13),
    ("grammar", "gpt35"): ((97.62, 97.76, 94.52, 91.93, 96.29, 93.12), 94.58),
    ("readability", "gemma"): ((74.68, 76.01, 77.65, 76.24, 76.24, 75.45), 76.25),
    ("readability", "gpt35"): ((76.52, 79.68, 78.44, 82.23, 79.58, 75.83), 78.41),
}


def test_c6a_rubric_row_totals_consistent() -> None:
    assert len(REFERENCE_RUBRIC_ROWS) == 12
    for key, (dims, total) in sorted(REFERENCE_RUBRIC_ROWS.items()):
        assert len(dims) == 5
        assert abs(total - sum(dims)) <= 0.02, (key, total, round(sum(dims), 4))


def test_c6b_metric_average_row_consistent() -> None:
    elapsed = _timer()
    off = []
    for (metric, model), (cells, published) in sorted(REFERENCE_METRIC_COLUMNS.items()):
        assert len(cells) == 6
        recomputed = sum(cells) / len(cells)
        if abs(recomputed - published) > 0.01:
            off.append(
                f"{metric}:{model} recomputed {recomputed:.4f} "
                f"vs published {published:.2f}"
            )
    assert elapsed() < 1.0
    assert not off, "published average row off by more than 0.01: " + "; ".join(off)


# ---------------------------------------------------------------------------
# criterion 7: full batch over the scripted backend reproduces its tables


def _csv_rows(path: Path) -> list[list[str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.reader(fh))


def _fmt(value, decimals: int) -> str:
    return "" if value is None else f"{value:.{decimals}f}"


def _brute_rows(records, strategies, names, value_of, summary_label, decimals):
    """Recompute a summary table the long way: per-strategy means over
    item records, then an unweighted mean of the row means."""
    rows = []
    for strategy in strategies:
        cells = []
        for name in names:
            values = [
                value_of(rec, name)
                for rec in records
                if rec["strategy"] == strategy
            ]
            values = [v for v in values if v is not None]
            cells.append(sum(values) / len(values) if values else None)
        rows.append((strategy, cells))
    summary = []
    for idx in range(len(names)):
        present = [cells[idx] for _, cells in rows if cells[idx] is not None]
        summary.append(sum(present) / len(present) if present else None)
    rows.append((summary_label, summary))
    return [[label] + [_fmt(c, decimals) for c in cells] for label, cells in rows]


def test_c7_end_to_end_batch_reproduces_tables(tmp_path: Path) -> None:
    elapsed = _timer()
    config = RunConfig(per_qt_count=2, seed=29)
    first_dir = tmp_path / "first"
    manifest = run_batch(config, first_dir)

    strategies = [s.value for s in StrategyId]
    qts = [q.value for q in QuestionType]
    expected_requests = len(strategies) * len(qts) * 2
    assert expected_requests == 156
    assert manifest.counts["requested"] == expected_requests
    assert manifest.counts["parsed"] == expected_requests  # 100% parse rate
    assert manifest.counts["scored"] == expected_requests
    assert manifest.counts["judged"] == expected_requests

    metrics = [
        json.loads(line)
        for line in (first_dir / "metrics.jsonl").read_text().splitlines()
    ]
    rubric = [
        json.loads(line)
        for line in (first_dir / "rubric.jsonl").read_text().splitlines()
    ]
    model = "mock-demo"
    metric_names = ("complexity", "fluency", "grammar", "readability")

    def metric_value(rec, name):
        return rec["scores"].get(name)

    got = _csv_rows(first_dir / "tables" / "strategy_scores.csv")
    assert got[0] == ["strategy"] + [f"{n}:{model}" for n in metric_names]
    assert got[1:] == _brute_rows(
        metrics, strategies, metric_names, metric_value, "Average", 2
    )

    for qt in qts:
        per_qt = [rec for rec in metrics if rec["qt"] == qt]
        got = _csv_rows(first_dir / "tables" / f"scores_{qt.lower()}.csv")
        assert got[0] == ["strategy"] + [f"{n}:{model}" for n in metric_names]
        assert got[1:] == _brute_rows(
            per_qt, strategies, metric_names, metric_value, "Average", 2
        ), qt

    scored = [rec for rec in rubric if rec.get("scores")]
    assert len(scored) == expected_requests
    rubric_names = RUBRIC_DIMS + ("total",)

    def rubric_value(rec, name):
        return float(rec["total"] if name == "total" else rec["scores"][name])

    got = _csv_rows(first_dir / "tables" / "rubric.csv")
    assert got[0] == ["strategy"] + [f"{n}:{model}" for n in rubric_names]
    assert got[1:] == _brute_rows(
        scored, strategies, rubric_names, rubric_value, "Grand Avg", 4
    )

    # same config into a fresh directory: byte-identical artifacts
    second_dir = tmp_path / "second"
    run_batch(config, second_dir)
    for name in (
        "config.json",
        "transcripts.jsonl",
        "diagnostics.jsonl",
        "items.jsonl",
        "morph.jsonl",
        "metrics.jsonl",
        "rubric.jsonl",
    ):
        assert (first_dir / name).read_bytes() == (second_dir / name).read_bytes(), name
    for path in sorted((first_dir / "tables").iterdir()):
        assert path.read_bytes() == (second_dir / "tables" / path.name).read_bytes(), path.name
    first_manifest = json.loads((first_dir / "manifest.json").read_text())
    second_manifest = json.loads((second_dir / "manifest.json").read_text())
    first_manifest.pop("created_at")
    second_manifest.pop("created_at")
    assert first_manifest == second_manifest

    assert elapsed() < 30.0


# ---------------------------------------------------------------------------
# criterion 8: multi-step sequencing and fault handling


def test_c8_multistep_sequencing_and_fault_abort() -> None:
    spec = GenerationSpec(
        qt=QuestionType.QT1, strategy=StrategyId.COT_SEQ_MULTISTEP, seed=11
    )
    plan = render(spec)
    backend = MockBackend(demo.generation_rules(), name="mock-demo")
    transcript = run_plan(plan, backend)

    assert transcript.status == "complete"
    assert len(transcript.replies) == 3
    assert len(backend.requests) == 3  # exactly one call per step
    for step, request in enumerate(backend.requests, start=1):
        assert f"step {step} of 3" in request

    chosen = extract_chosen_word(transcript.replies[0].text)
    assert chosen
    assert chosen in backend.requests[1]  # step 1's word is bound into step 2
    draft = transcript.replies[1].text.strip()
    assert draft
    assert draft in backend.requests[2]  # step 2's draft is bound into step 3

    # a step-1 reply with nothing to extract aborts before step 2
    faulty = MockBackend([(re.escape("step 1 of 3"), "")])
    aborted = run_plan(plan, faulty)
    assert aborted.status == "aborted"
    assert len(aborted.replies) == 1
    assert len(faulty.requests) == 1
    assert aborted.error


# ---------------------------------------------------------------------------
# criterion 9: rubric bookkeeping and agreement counting


def test_c9a_rubric_totals_follow_dimensions() -> None:
    rng = random.Random(0xC9)
    for _ in range(100):
        bits = [rng.randint(0, 1) for _ in range(5)]
        score = RubricScore(dims=RubricDimensions(*bits))
        assert score.total == sum(bits)
        assert score.to_record()["total"] == sum(bits)


def _label_set(mapping: dict) -> ExpertLabelSet:
    return ExpertLabelSet(
        records=[
            ExpertLabel(item_id=item_id, annotator="expert", dims=dims)
            for item_id, dims in mapping.items()
        ]
    )


def test_c9b_agreement_identical_and_mismatch_counts() -> None:
    rng = random.Random(0xC9B)
    judge = {
        f"it-{i:02d}": RubricDimensions(*[rng.randint(0, 1) for _ in range(5)])
        for i in range(12)
    }
    report = agreement(judge, _label_set(judge))
    assert report.compared == 12
    assert report.coverage == 1.0
    assert all(report.accuracy[name] == 1.0 for name in RUBRIC_DIMS)

    # clarity flipped on one item of four: 3/4 agree
    expert = {f"f1-{i}": RubricDimensions(1, 1, 1, 1, 1) for i in range(4)}
    judged = dict(expert)
    judged["f1-0"] = RubricDimensions(0, 1, 1, 1, 1)
    report = agreement(judged, _label_set(expert))
    assert report.accuracy["clarity"] == 0.75
    assert report.confusion["clarity"] == {"00": 0, "01": 1, "10": 0, "11": 3}
    assert report.accuracy["answer_accuracy"] == 1.0

    # complementary clarity on two items: 0/2 agree
    expert = {
        "f2-0": RubricDimensions(0, 1, 0, 1, 0),
        "f2-1": RubricDimensions(1, 1, 0, 1, 0),
    }
    judged = {
        "f2-0": RubricDimensions(1, 1, 0, 1, 0),
        "f2-1": RubricDimensions(0, 1, 0, 1, 0),
    }
    report = agreement(judged, _label_set(expert))
    assert report.accuracy["clarity"] == 0.0
    assert report.confusion["clarity"] == {"00": 0, "01": 1, "10": 1, "11": 0}

    # five items: distractor quality agrees on 2, task fit on 3
    expert = {f"f3-{i}": RubricDimensions(1, 1, 1, 1, i % 2) for i in range(5)}
    judged = {
        "f3-0": RubricDimensions(1, 1, 1, 1, 0),
        "f3-1": RubricDimensions(1, 1, 0, 1, 1),
        "f3-2": RubricDimensions(1, 1, 0, 1, 1),
        "f3-3": RubricDimensions(1, 1, 0, 1, 1),
        "f3-4": RubricDimensions(1, 1, 1, 1, 1),
    }
    report = agreement(judged, _label_set(expert))
    assert report.accuracy["distractor_quality"] == 0.4
    assert report.confusion["distractor_quality"] == {"00": 0, "01": 3, "10": 0, "11": 2}
    assert report.accuracy["task_difficulty_fit"] == 0.6
    assert report.accuracy["clarity"] == 1.0
    assert report.accuracy["word_difficulty_fit"] == 1.0
