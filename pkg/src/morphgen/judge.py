"""Rubric scoring of items by an LLM judge, plus expert-label agreement.

Five binary dimensions: clarity, answer_accuracy, distractor_quality,
word_difficulty_fit, task_difficulty_fit. The total is always recomputed
locally as the sum of the dimensions; a total stated in a reply is never
trusted. Replies are parsed tolerantly (JSON first, then labeled lines
with 0/1/yes/no/true/false values); an unparseable reply earns exactly
one stricter re-ask, after which the item stays unscored with the error
recorded.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Mapping, Optional, Sequence

from .errors import ValidationError
from .items import Item, QuestionType
from .parsing import serialize_item

DIMENSIONS = (
    "clarity",
    "answer_accuracy",
    "distractor_quality",
    "word_difficulty_fit",
    "task_difficulty_fit",
)

#: Accepted spellings per dimension in judge replies, tried in order.
_DIMENSION_ALIASES: dict[str, tuple[str, ...]] = {
    "clarity": ("clarity",),
    "answer_accuracy": ("answer_accuracy", "answer accuracy", "accuracy", "answer"),
    "distractor_quality": (
        "distractor_quality",
        "distractor quality",
        "distractors",
        "distractor",
    ),
    "word_difficulty_fit": (
        "word_difficulty_fit",
        "word difficulty fit",
        "word difficulty",
        "word",
    ),
    "task_difficulty_fit": (
        "task_difficulty_fit",
        "task difficulty fit",
        "task difficulty",
        "task",
    ),
}

_TRUTHY = {"1", "yes", "true"}
_FALSY = {"0", "no", "false"}


def _normalize_flag(value: Any) -> Optional[int]:
    if isinstance(value, bool):
        return int(value)
    if isinstance(value, (int, float)) and value in (0, 1):
        return int(value)
    if isinstance(value, str):
        folded = value.strip().casefold()
        if folded in _TRUTHY:
            return 1
        if folded in _FALSY:
            return 0
    return None


@dataclass(frozen=True)
class RubricDimensions:
    clarity: int
    answer_accuracy: int
    distractor_quality: int
    word_difficulty_fit: int
    task_difficulty_fit: int

    def __post_init__(self) -> None:
        for name in DIMENSIONS:
            value = getattr(self, name)
            if value not in (0, 1):
                raise ValidationError(f"{name} must be 0 or 1, got {value!r}")

    def as_dict(self) -> dict[str, int]:
        return {name: getattr(self, name) for name in DIMENSIONS}

    @property
    def total(self) -> int:
        return sum(self.as_dict().values())


@dataclass
class RubricScore:
    dims: RubricDimensions
    rationale: str = ""

    @property
    def total(self) -> int:
        # always derived from the dimensions, never parsed from a reply
        return self.dims.total

    def to_record(self) -> dict:
        return {
            "dims": self.dims.as_dict(),
            "total": self.total,
            "rationale": self.rationale,
        }


def dimension_definitions() -> dict[str, str]:
    """The shipped rubric text, one definition per dimension."""
    text = (
        resources.files("morphgen")
        .joinpath("assets", "rubric_dimensions.txt")
        .read_text(encoding="utf-8")
    )
    definitions: dict[str, str] = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        name, _, definition = line.partition(":")
        definitions[name.strip()] = definition.strip()
    missing = set(DIMENSIONS) - set(definitions)
    if missing:
        raise ValidationError(f"rubric asset is missing definitions for {sorted(missing)}")
    return definitions


REPLY_DIRECTIVE = (
    "Score each dimension 0 or 1. Reply with exactly five lines, one per\n"
    "dimension, in this form and order:\n"
    + "\n".join(f"{name}: <0 or 1>" for name in DIMENSIONS)
)

STRICT_REDIRECT = (
    "Your previous reply could not be parsed. Reply again with only the five\n"
    "scoring lines, nothing else:\n"
    + "\n".join(f"{name}: <0 or 1>" for name in DIMENSIONS)
)


#: An exemplar is an item together with its expert verdict.
LabeledExemplar = tuple[Item, "RubricDimensions"]


def judge_exemplars(
    pool: Sequence[Item],
    labels: Mapping[str, "RubricDimensions"],
    per_qt: int = 1,
) -> list[LabeledExemplar]:
    """Conditioning exemplars: per_qt labeled items per question type,
    lowest ids first, in question-type order. Deterministic."""
    chosen: list[LabeledExemplar] = []
    for qt in QuestionType:
        members = sorted(
            (i for i in pool if i.qt is qt and i.id in labels),
            key=lambda i: i.id,
        )
        chosen.extend((i, labels[i.id]) for i in members[:per_qt])
    return chosen


def build_judge_prompt(item: Item, exemplars: Sequence[LabeledExemplar]) -> str:
    """Assemble the full judging prompt for one item.

    At least one labeled exemplar is required; the judge emulates the
    experts, so it must see what their verdicts look like.
    """
    if not exemplars:
        raise ValidationError("judging needs at least one labeled exemplar")
    definitions = dimension_definitions()
    parts = [
        "You are reviewing one multiple-choice morphology item.",
        "",
        "Score it on five binary dimensions:",
    ]
    for name in DIMENSIONS:
        parts.append(f"- {name}: {definitions[name]}")
    parts.append("")
    parts.append("Expert-scored reference items:")
    for ref, dims in exemplars:
        parts.append("")
        parts.append(f"[{ref.qt.value}] {ref.qt.description}")
        parts.append(serialize_item(ref))
        parts.append(
            "Labels: "
            + ", ".join(f"{name}: {getattr(dims, name)}" for name in DIMENSIONS)
        )
    parts.append("")
    parts.append(f"Item under review (question type {item.qt.value}: {item.qt.description})")
    if item.word_diff_raw is not None:
        parts.append(f"Stated word difficulty: {item.word_diff_raw}")
    if item.task_diff_raw is not None:
        parts.append(f"Stated task difficulty: {item.task_diff_raw}")
    parts.append(serialize_item(item))
    parts.append("")
    parts.append(REPLY_DIRECTIVE)
    return "\n".join(parts)


def _parse_json_block(text: str) -> Optional[dict]:
    start = text.find("{")
    if start == -1:
        return None
    depth = 0
    for i in range(start, len(text)):
        if text[i] == "{":
            depth += 1
        elif text[i] == "}":
            depth -= 1
            if depth == 0:
                try:
                    parsed = json.loads(text[start : i + 1])
                except json.JSONDecodeError:
                    return None
                return parsed if isinstance(parsed, dict) else None
    return None


def parse_judge_reply(text: str) -> Optional[RubricDimensions]:
    """Extract the five flags from a judge reply, or None if any are
    missing. The last stated value per dimension wins."""
    values: dict[str, int] = {}

    block = _parse_json_block(text)
    if block:
        lowered = {str(k).strip().casefold(): v for k, v in block.items()}
        for name in DIMENSIONS:
            for alias in _DIMENSION_ALIASES[name]:
                if alias in lowered:
                    flag = _normalize_flag(lowered[alias])
                    if flag is not None:
                        values[name] = flag
                        break

    for name in DIMENSIONS:
        if name in values:
            continue
        for alias in _DIMENSION_ALIASES[name]:
            pattern = re.compile(
                rf"\b{re.escape(alias)}\b\s*[:=\-]\s*\**\s*(\w+)", re.IGNORECASE
            )
            hits = [
                flag
                for raw in pattern.findall(text)
                if (flag := _normalize_flag(raw)) is not None
            ]
            if hits:
                values[name] = hits[-1]
                break

    if set(values) != set(DIMENSIONS):
        return None
    return RubricDimensions(**values)


def judge_item(
    item: Item,
    backend,
    exemplars: Sequence[LabeledExemplar],
) -> tuple[Optional[RubricScore], Optional[str]]:
    """Judge one item. Returns (score, error); exactly one is None.

    One structured re-ask is attempted when the first reply cannot be
    parsed; a second failure leaves the item unscored.
    """
    prompt = build_judge_prompt(item, exemplars)
    reply = backend.complete(prompt)
    dims = parse_judge_reply(reply.text)
    if dims is None:
        retry = backend.complete(prompt + "\n\n" + STRICT_REDIRECT)
        dims = parse_judge_reply(retry.text)
        if dims is None:
            return None, "judge reply unparseable after one re-ask"
        reply = retry
    return RubricScore(dims=dims, rationale=reply.text), None


# ---------------------------------------------------------------------------
# Aggregation


@dataclass
class JudgedItem:
    item_id: str
    strategy: str
    qt: str
    model: str
    score: RubricScore

    def to_record(self) -> dict:
        return {
            "item_id": self.item_id,
            "strategy": self.strategy,
            "qt": self.qt,
            "model": self.model,
            **self.score.to_record(),
        }


@dataclass
class AggregateRow:
    count: int
    dim_means: dict[str, float]
    total_mean: float


def aggregate(
    records: Sequence[JudgedItem], group_by: tuple[str, ...] = ("strategy",)
) -> dict[tuple[str, ...], AggregateRow]:
    """Per-dimension means and mean total, grouped by the named fields.

    group_by fields are attributes of JudgedItem (strategy, qt, model).
    """
    groups: dict[tuple[str, ...], list[JudgedItem]] = {}
    for record in records:
        key = tuple(getattr(record, fieldname) for fieldname in group_by)
        groups.setdefault(key, []).append(record)
    rows: dict[tuple[str, ...], AggregateRow] = {}
    for key in sorted(groups):
        members = groups[key]
        dim_means = {
            name: sum(getattr(m.score.dims, name) for m in members) / len(members)
            for name in DIMENSIONS
        }
        rows[key] = AggregateRow(
            count=len(members),
            dim_means=dim_means,
            total_mean=sum(m.score.total for m in members) / len(members),
        )
    return rows


# ---------------------------------------------------------------------------
# Expert labels and agreement


@dataclass
class ExpertLabel:
    item_id: str
    annotator: str
    dims: RubricDimensions


@dataclass
class ExpertLabelSet:
    """Per-item binary labels plus, optionally, published per-QT means.

    Means-only data (the aggregate form expert results are sometimes
    released in) supports aggregation comparisons but not agreement().
    """

    records: list[ExpertLabel] = field(default_factory=list)
    qt_means: dict[str, dict[str, float]] = field(default_factory=dict)

    @property
    def item_ids(self) -> set[str]:
        return {r.item_id for r in self.records}

    def dims_for(self) -> dict[str, RubricDimensions]:
        """One verdict per item id: the first record wins when several
        annotators labeled the same item."""
        out: dict[str, RubricDimensions] = {}
        for r in self.records:
            out.setdefault(r.item_id, r.dims)
        return out


def load_expert_labels(path: str | Path) -> ExpertLabelSet:
    """Read expert labels from jsonl.

    Two record shapes are accepted: per-item labels ({"item_id",
    optional "annotator", five 0/1 dimension fields}) and per-QT means
    ({"qt", "means": {dimension: fraction}}).
    """
    labels = ExpertLabelSet()
    problems: list[str] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                if "qt" in record:
                    qt = QuestionType(record["qt"]).value
                    means = {
                        name: float(record["means"][name]) for name in DIMENSIONS
                    }
                    if any(not (0.0 <= v <= 1.0) for v in means.values()):
                        raise ValidationError("means must lie in [0, 1]")
                    labels.qt_means[qt] = means
                    continue
                dims = RubricDimensions(
                    **{name: int(record[name]) for name in DIMENSIONS}
                )
                labels.records.append(
                    ExpertLabel(
                        item_id=str(record["item_id"]),
                        annotator=str(record.get("annotator", "expert")),
                        dims=dims,
                    )
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError, ValidationError) as exc:
                problems.append(f"line {lineno}: {exc}")
    if problems:
        raise ValidationError("bad expert label records: " + "; ".join(problems))
    return labels


@dataclass
class AgreementReport:
    compared: int
    coverage: float
    accuracy: dict[str, float]
    confusion: dict[str, dict[str, int]]

    def to_record(self) -> dict:
        return {
            "compared": self.compared,
            "coverage": self.coverage,
            "accuracy": self.accuracy,
            "confusion": self.confusion,
        }


def agreement(
    judge_scores: Mapping[str, RubricDimensions], expert: ExpertLabelSet
) -> AgreementReport:
    """Per-dimension accuracy of judge flags against expert labels.

    Every expert record whose item was judged counts once; confusion
    cells are keyed "<judge><expert>" per dimension. Coverage is the
    share of judged items that had at least one expert record.
    """
    overlapping = [r for r in expert.records if r.item_id in judge_scores]
    if not overlapping:
        raise ValidationError("no overlapping item ids between judge and experts")
    accuracy: dict[str, float] = {}
    confusion: dict[str, dict[str, int]] = {}
    for name in DIMENSIONS:
        cells = {"00": 0, "01": 0, "10": 0, "11": 0}
        hits = 0
        for record in overlapping:
            j = getattr(judge_scores[record.item_id], name)
            e = getattr(record.dims, name)
            cells[f"{j}{e}"] += 1
            hits += int(j == e)
        accuracy[name] = hits / len(overlapping)
        confusion[name] = cells
    covered = len({r.item_id for r in overlapping})
    return AgreementReport(
        compared=len(overlapping),
        coverage=covered / len(judge_scores) if judge_scores else 0.0,
        accuracy=accuracy,
        confusion=confusion,
    )
