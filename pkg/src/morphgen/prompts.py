"""Prompt strategies, template registry, and plan construction.

Six strategies are supported; five render to a single turn and the
multi-step variant renders to three turns (choose a word, draft the
item, refine the distractors) whose later turns are completed from
earlier replies via bind_step_inputs.

Templates are versioned plain-text files under templates/<version>/.
Placeholders use the {{name}} sigil. Lookup tries a question-family
specific file first (<strategy>__<family>.txt) and falls back to the
per-strategy file, so family overrides can be dropped in without code
changes. Two placeholder names, chosen_word and draft_item, are
deferred: they survive initial rendering and are filled when the
earlier reply arrives.
"""

from __future__ import annotations

import enum
import random
import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional, Sequence

from .errors import (
    ConfigurationError,
    InsufficientPoolError,
    StepBindingError,
    TemplateError,
)
from .items import (
    DEFAULT_OPTION_COUNT,
    Item,
    OPTION_COUNT_RANGE,
    QuestionType,
    TaskBand,
)
from .parsing import DELIMITED_TOKEN, serialize_item

TEMPLATE_VERSION = "v1"

PLACEHOLDER = re.compile(r"\{\{([a-z_]+)\}\}")

#: Placeholders filled from earlier replies, not at render time.
DEFERRED_PLACEHOLDERS = frozenset({"chosen_word", "draft_item"})


class StrategyId(enum.Enum):
    ZERO_SHOT = "zero_shot"
    FEW_SHOT = "few_shot"
    COT = "cot"
    COT_ROLE = "cot_role"
    COT_SEQ_ONEGO = "cot_seq_onego"
    COT_SEQ_MULTISTEP = "cot_seq_multistep"


#: Question families used for template lookup (override granularity).
QT_FAMILIES: dict[QuestionType, str] = {
    QuestionType.QT1: "identification",
    QuestionType.QT2: "identification",
    QuestionType.QT3: "identification",
    QuestionType.QT4: "contrast",
    QuestionType.QT5: "contrast",
    QuestionType.QT6: "transformation",
    QuestionType.QT7: "meaning",
    QuestionType.QT8: "spelling",
    QuestionType.QT9: "segmentation",
    QuestionType.QT10: "meaning",
    QuestionType.QT11: "meaning",
    QuestionType.QT12: "meaning",
    QuestionType.QT13: "meaning",
}

_EXEMPLAR_RANGE = (1, 5)


@dataclass(frozen=True)
class GenerationSpec:
    """Everything a generation request depends on."""

    qt: QuestionType
    strategy: StrategyId
    grade_band: str = "grades 3 to 5"
    word_difficulty: int = 3
    task_difficulty: TaskBand = TaskBand.MEDIUM
    affix_focus: Optional[str] = None
    exemplar_count: int = 3
    option_count: int = DEFAULT_OPTION_COUNT
    seed: int = 0

    def validate(self) -> None:
        if not self.grade_band.strip():
            raise ConfigurationError("grade_band must be non-empty")
        if not (1 <= self.word_difficulty <= 5):
            raise ConfigurationError(
                f"word_difficulty must be 1..5, got {self.word_difficulty}"
            )
        lo, hi = _EXEMPLAR_RANGE
        if not (lo <= self.exemplar_count <= hi):
            raise ConfigurationError(
                f"exemplar_count must be {lo}..{hi}, got {self.exemplar_count}"
            )
        clo, chi = OPTION_COUNT_RANGE
        if not (clo <= self.option_count <= chi):
            raise ConfigurationError(
                f"option_count must be {clo}..{chi}, got {self.option_count}"
            )


@dataclass(frozen=True)
class Turn:
    text: str
    expects: str
    #: instruct for plain instruction turns, persona for role-conditioned
    #: ones, step for the multi-step protocol
    label: str = "instruct"


@dataclass(frozen=True)
class PromptPlan:
    strategy: StrategyId
    qt: QuestionType
    turns: tuple[Turn, ...]
    spec: GenerationSpec

    @property
    def is_multistep(self) -> bool:
        return len(self.turns) > 1

    @property
    def expects(self) -> tuple[str, ...]:
        return tuple(t.expects for t in self.turns)


# ---------------------------------------------------------------------------
# Template registry


def _template_root():
    return resources.files("morphgen").joinpath("templates", TEMPLATE_VERSION)


def load_template(strategy: StrategyId, qt: QuestionType, step: Optional[int] = None) -> str:
    """Resolve and read the template for (strategy, question family).

    Candidates, most specific first:
      <strategy>__<family>__step<N>.txt   (multi-step, family override)
      <strategy>__step<N>.txt             (multi-step)
      <strategy>__<family>.txt            (family override)
      <strategy>.txt
    """
    family = QT_FAMILIES[qt]
    names: list[str] = []
    if step is not None:
        names.append(f"{strategy.value}__{family}__step{step}.txt")
        names.append(f"{strategy.value}__step{step}.txt")
    else:
        names.append(f"{strategy.value}__{family}.txt")
        names.append(f"{strategy.value}.txt")
    root = _template_root()
    for name in names:
        candidate = root.joinpath(name)
        if candidate.is_file():
            return candidate.read_text(encoding="utf-8")
    raise TemplateError(
        f"no template for strategy {strategy.value!r} (tried {', '.join(names)})"
    )


def fill_template(
    template: str,
    values: dict[str, str],
    deferred: frozenset[str] = frozenset(),
) -> str:
    """Substitute placeholders, enforcing the fill contract.

    Every provided value must appear exactly once in the template; every
    placeholder in the template must be either provided or explicitly
    deferred. Deferred placeholders pass through untouched.
    """
    counts = Counter(PLACEHOLDER.findall(template))
    for name in values:
        if counts.get(name, 0) != 1:
            raise TemplateError(
                f"placeholder {{{{{name}}}}} must occur exactly once, "
                f"found {counts.get(name, 0)}"
            )
    for name in counts:
        if name not in values and name not in deferred:
            raise TemplateError(f"unresolved placeholder {{{{{name}}}}}")
    return PLACEHOLDER.sub(
        lambda m: values[m.group(1)] if m.group(1) in values else m.group(0),
        template,
    )


def format_contract(option_count: int) -> str:
    letters = [chr(ord("A") + i) for i in range(option_count)]
    lines = ["Write the final item in exactly this format:"]
    lines.append("<stem: one question or instruction line>")
    for letter in letters:
        lines.append(f"{letter}. <option text>")
    lines.append("Answer: <letter>")
    lines.append(
        f"Use exactly {option_count} options labeled "
        f"{', '.join(letters)}, one per line, and nothing after the answer line."
    )
    return "\n".join(lines)


def exemplar_block(exemplars: Sequence[Item]) -> str:
    blocks = []
    for i, item in enumerate(exemplars, start=1):
        blocks.append(f"Example {i}:\n{serialize_item(item)}")
    return "\n\n".join(blocks)


# ---------------------------------------------------------------------------
# Exemplar selection


def select_exemplars(pool: Sequence[Item], spec: GenerationSpec) -> list[Item]:
    """Pick spec.exemplar_count items of the spec's question type.

    Greedy: first the item whose difficulty level sits closest to the
    target, then repeatedly the item maximizing the distance to the
    difficulties already chosen (spreading the examples out). Ties break
    toward the lower difficulty, then the seed-shuffled pool order, so
    the result is deterministic for a given seed.
    """
    spec.validate()
    candidates = [
        item
        for item in pool
        if item.qt is spec.qt and item.word_diff_raw is not None
    ]
    if len(candidates) < spec.exemplar_count:
        raise InsufficientPoolError(
            f"pool has {len(candidates)} usable {spec.qt.value} items, "
            f"need {spec.exemplar_count}"
        )
    ordered = sorted(candidates, key=lambda i: i.id)
    random.Random(spec.seed).shuffle(ordered)
    base_order = {item.id: pos for pos, item in enumerate(ordered)}

    def level(item: Item) -> int:
        level_value = item.word_diff_level()
        assert level_value is not None
        return level_value

    chosen: list[Item] = []
    remaining = list(ordered)
    first = min(
        remaining,
        key=lambda i: (abs(level(i) - spec.word_difficulty), level(i), base_order[i.id]),
    )
    chosen.append(first)
    remaining.remove(first)
    while len(chosen) < spec.exemplar_count:
        picked_levels = [level(c) for c in chosen]
        nxt = max(
            remaining,
            key=lambda i: (
                min(abs(level(i) - p) for p in picked_levels),
                -level(i),
                -base_order[i.id],
            ),
        )
        chosen.append(nxt)
        remaining.remove(nxt)
    return chosen


# ---------------------------------------------------------------------------
# Rendering and step binding


_EXPECTS_SINGLE = "item_block"
_EXPECTS_MULTI = ("word_choice", "draft_item", "refined_item")


def _common_values(spec: GenerationSpec) -> dict[str, str]:
    affix_line = (
        f"Build the item around the affix \"{spec.affix_focus}\"."
        if spec.affix_focus
        else ""
    )
    return {
        "qt_id": spec.qt.value,
        "qt_descriptor": spec.qt.description,
        "grade_band": spec.grade_band,
        "word_difficulty": str(spec.word_difficulty),
        "task_difficulty": spec.task_difficulty.value,
        "affix_focus_line": affix_line,
    }


def render(spec: GenerationSpec, exemplars: Optional[Sequence[Item]] = None) -> PromptPlan:
    """Build the full prompt plan for a generation spec.

    Pure function of (spec, template version, exemplars): no clock, no
    randomness. Few-shot requires exactly spec.exemplar_count exemplars;
    other strategies must not receive any.
    """
    spec.validate()
    values = _common_values(spec)

    if spec.strategy is StrategyId.FEW_SHOT:
        if exemplars is None or len(exemplars) != spec.exemplar_count:
            raise ConfigurationError(
                f"few_shot needs exactly {spec.exemplar_count} exemplars, "
                f"got {0 if exemplars is None else len(exemplars)}"
            )
        values["exemplar_block"] = exemplar_block(exemplars)
    elif exemplars:
        raise ConfigurationError(
            f"{spec.strategy.value} does not take exemplars"
        )

    if spec.strategy is StrategyId.COT_SEQ_MULTISTEP:
        turns = []
        step_values = [
            dict(values),
            {"qt_id": spec.qt.value, "format_contract": format_contract(spec.option_count)},
            {"qt_id": spec.qt.value, "format_contract": format_contract(spec.option_count)},
        ]
        for step, (expects, step_vals) in enumerate(
            zip(_EXPECTS_MULTI, step_values), start=1
        ):
            template = load_template(spec.strategy, spec.qt, step=step)
            text = fill_template(template, step_vals, deferred=DEFERRED_PLACEHOLDERS)
            turns.append(Turn(text=text, expects=expects, label="step"))
        return PromptPlan(
            strategy=spec.strategy, qt=spec.qt, turns=tuple(turns), spec=spec
        )

    values["format_contract"] = format_contract(spec.option_count)
    template = load_template(spec.strategy, spec.qt)
    text = fill_template(template, values)
    label = "persona" if spec.strategy is StrategyId.COT_ROLE else "instruct"
    return PromptPlan(
        strategy=spec.strategy,
        qt=spec.qt,
        turns=(Turn(text=text, expects=_EXPECTS_SINGLE, label=label),),
        spec=spec,
    )


CHOSEN_WORD_PATTERNS = (
    re.compile(r"chosen\s+word\s*[:\-]\s*\**([A-Za-z][A-Za-z'\-]*)", re.IGNORECASE),
    re.compile(r"\bword\s*[:\-]\s*\**([A-Za-z][A-Za-z'\-]*)", re.IGNORECASE),
)


def extract_chosen_word(reply: str) -> str:
    """Pull the chosen target word out of a step-1 reply.

    Tries the mandated "Chosen word: X" line, then a looser "word: X",
    then a bare one-word reply, then the last asterisk/quote-marked
    token. Raises StepBindingError when nothing usable is present.
    """
    for pattern in CHOSEN_WORD_PATTERNS:
        hits = pattern.findall(reply)
        if hits:
            return hits[-1]
    stripped = reply.strip().strip(".*\"'")
    if stripped and re.fullmatch(r"[A-Za-z][A-Za-z'\-]*", stripped):
        return stripped
    delimited = DELIMITED_TOKEN.findall(reply)
    if delimited:
        return delimited[-1]
    raise StepBindingError("step-1 reply contains no extractable word")


def bind_step_inputs(plan: PromptPlan, replies: Sequence[str]) -> Turn:
    """Complete the next turn of a multi-step plan from earlier replies.

    replies holds the replies received so far, in order; the turn at
    index len(replies) is filled and returned. Raises StepBindingError
    when a reply does not contain what the next step needs.
    """
    if not plan.is_multistep:
        raise ConfigurationError("bind_step_inputs only applies to multi-step plans")
    step = len(replies)
    if not (1 <= step < len(plan.turns)):
        raise ConfigurationError(
            f"have {step} replies for a {len(plan.turns)}-turn plan; nothing to bind"
        )
    turn = plan.turns[step]
    if step == 1:
        values = {"chosen_word": extract_chosen_word(replies[0])}
    else:
        draft = replies[1].strip()
        if not draft:
            raise StepBindingError("step-2 reply is empty; no draft item to refine")
        values = {"draft_item": draft}
    return Turn(
        text=fill_template(turn.text, values),
        expects=turn.expects,
        label=turn.label,
    )
