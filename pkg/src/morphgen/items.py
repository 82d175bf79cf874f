"""Item data model: question types, difficulty recoding, validation.

An Item is one multiple-choice question about word structure. The thirteen
question types cover affix identification, odd-one-out contrasts, spelling,
segmentation, and morpheme-meaning tasks; each type carries a fixed
one-line descriptor used by prompt rendering and reporting.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any, Optional

from .errors import ConfigurationError, ValidationError


class QuestionType(enum.Enum):
    """The closed set of supported question types."""

    QT1 = "QT1"
    QT2 = "QT2"
    QT3 = "QT3"
    QT4 = "QT4"
    QT5 = "QT5"
    QT6 = "QT6"
    QT7 = "QT7"
    QT8 = "QT8"
    QT9 = "QT9"
    QT10 = "QT10"
    QT11 = "QT11"
    QT12 = "QT12"
    QT13 = "QT13"

    @property
    def description(self) -> str:
        return QT_DESCRIPTIONS[self]


# One fixed descriptor per question type. Prompt templates and reports rely
# on these strings, so treat them as data, not copy to be reworded casually.
QT_DESCRIPTIONS: dict[QuestionType, str] = {
    QuestionType.QT1: "Pick out the prefix of the given word.",
    QuestionType.QT2: "Pick out the suffix of the given word.",
    QuestionType.QT3: "Pick out the root of the given word.",
    QuestionType.QT4: "Pick the word whose prefix differs from the other choices.",
    QuestionType.QT5: "Pick the word whose suffix differs from the other choices.",
    QuestionType.QT6: "Pick the transformed word that matches a stated change in the base word's meaning.",
    QuestionType.QT7: "Pick the meaning of a word formed with an affix.",
    QuestionType.QT8: "Pick the correct spelling of a word once its suffix is attached.",
    QuestionType.QT9: "Split the given word into its parts (prefix, root, suffix).",
    QuestionType.QT10: "Pick the meaning of the prefix in the given word.",
    QuestionType.QT11: "Pick the meaning of the root in the given word.",
    QuestionType.QT12: "Pick the meaning or function of the suffix in the given word.",
    QuestionType.QT13: "Work out the meaning of a complex word from the meanings of its parts.",
}


class SkillFocus(enum.Enum):
    RECOGNITION = "recognition"
    COMPREHENSION = "comprehension"
    PROBLEM_SOLVING = "problem-solving"


class MorphCategory(enum.Enum):
    DERIVATIONAL = "derivational"
    INFLECTIONAL = "inflectional"
    INFLECTIONAL_AND_DERIVATIONAL = "inflectional_and_derivational"
    DEFINE = "define"
    SYNTACTIC = "syntactic"
    ADDRESS_WORD_PARTS = "address_word_parts"


class TaskBand(enum.Enum):
    EASY = "easy"
    MEDIUM = "medium"
    HARD = "hard"


#: Valid raw word-difficulty values: 1.0 to 5.0 in half steps.
WORD_DIFF_STEPS = tuple(x / 2 for x in range(2, 11))

#: Default cut points for task-difficulty banding, applied to floor(raw).
DEFAULT_TASK_CUTS: tuple[int, int] = (2, 3)

#: Bounds on the number of options an item may carry.
OPTION_COUNT_RANGE: tuple[int, int] = (2, 5)
DEFAULT_OPTION_COUNT = 3


def recode_word_difficulty(raw: float) -> int:
    """Merge half-point word-difficulty ratings down to integer levels.

    Raw ratings land on a 1-to-5 scale in 0.5 steps; a half point is
    treated as the level below it (2.5 -> 2). Anything off that grid is
    rejected rather than silently rounded.
    """
    if not isinstance(raw, (int, float)) or isinstance(raw, bool):
        raise ValidationError(f"word difficulty must be numeric, got {raw!r}")
    if not math.isfinite(raw):
        raise ValidationError(f"word difficulty must be finite, got {raw!r}")
    if raw < 1.0 or raw > 5.0 or (raw * 2) != round(raw * 2):
        raise ValidationError(
            f"word difficulty {raw!r} is not on the 1.0-5.0 half-step scale"
        )
    return int(math.floor(raw))


def recode_task_difficulty(
    raw: float, cuts: tuple[int, int] = DEFAULT_TASK_CUTS
) -> TaskBand:
    """Band a raw task-difficulty rating into easy/medium/hard.

    The raw value is floor-recoded first (half points merge down), then
    compared against the two configured cut points: floor(raw) < cuts[0]
    is easy, floor(raw) < cuts[1] is medium, everything else is hard.
    The source scale of the ratings is not fixed here, which is why the
    cut points are an argument.
    """
    if len(cuts) != 2 or not all(isinstance(c, int) for c in cuts):
        raise ConfigurationError(f"task cuts must be two integers, got {cuts!r}")
    if not cuts[0] < cuts[1]:
        raise ConfigurationError(f"task cuts must be strictly increasing, got {cuts!r}")
    if not isinstance(raw, (int, float)) or isinstance(raw, bool) or not math.isfinite(raw):
        raise ValidationError(f"task difficulty must be a finite number, got {raw!r}")
    floored = math.floor(raw)
    if floored < cuts[0]:
        return TaskBand.EASY
    if floored < cuts[1]:
        return TaskBand.MEDIUM
    return TaskBand.HARD


def normalize_option(text: str) -> str:
    """Normalize an option for distinctness checks: trim, collapse runs of
    whitespace, casefold."""
    return " ".join(text.split()).casefold()


@dataclass
class Item:
    """One multiple-choice item plus whatever metadata is known for it.

    Corpus items carry full metadata; freshly generated items may only
    know their question type and targets, so the descriptive fields are
    optional.
    """

    id: str
    stem: str
    options: tuple[str, ...]
    answer_index: int
    qt: QuestionType
    skill: Optional[SkillFocus] = None
    morph: Optional[MorphCategory] = None
    word_diff_raw: Optional[float] = None
    task_diff_raw: Optional[float] = None
    target_word: Optional[str] = None
    target_morpheme: Optional[str] = None

    def __post_init__(self) -> None:
        self.options = tuple(self.options)

    @property
    def answer_text(self) -> str:
        return self.options[self.answer_index]

    def word_diff_level(self) -> Optional[int]:
        if self.word_diff_raw is None:
            return None
        return recode_word_difficulty(self.word_diff_raw)

    def task_band(self, cuts: tuple[int, int] = DEFAULT_TASK_CUTS) -> Optional[TaskBand]:
        if self.task_diff_raw is None:
            return None
        return recode_task_difficulty(self.task_diff_raw, cuts)

    def to_record(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "stem": self.stem,
            "options": list(self.options),
            "answer_index": self.answer_index,
            "qt": self.qt.value,
            "skill": self.skill.value if self.skill else None,
            "morph": self.morph.value if self.morph else None,
            "word_diff_raw": self.word_diff_raw,
            "task_diff_raw": self.task_diff_raw,
            "target_word": self.target_word,
            "target_morpheme": self.target_morpheme,
        }

    @classmethod
    def from_record(cls, record: dict[str, Any]) -> "Item":
        try:
            qt = QuestionType(record["qt"])
        except (KeyError, ValueError) as exc:
            raise ValidationError(f"bad question type in record: {exc}") from exc
        skill = record.get("skill")
        morph = record.get("morph")
        return cls(
            id=str(record["id"]),
            stem=str(record["stem"]),
            options=tuple(str(o) for o in record["options"]),
            answer_index=int(record["answer_index"]),
            qt=qt,
            skill=SkillFocus(skill) if skill else None,
            morph=MorphCategory(morph) if morph else None,
            word_diff_raw=record.get("word_diff_raw"),
            task_diff_raw=record.get("task_diff_raw"),
            target_word=record.get("target_word"),
            target_morpheme=record.get("target_morpheme"),
        )


def validate_item(
    item: Item, option_range: tuple[int, int] = OPTION_COUNT_RANGE
) -> list[str]:
    """Check structural invariants. Returns a list of violation messages;
    an empty list means the item is well formed."""
    problems: list[str] = []
    lo, hi = option_range
    if not item.stem.split():
        problems.append("stem is empty")
    if not (lo <= len(item.options) <= hi):
        problems.append(
            f"option count {len(item.options)} outside allowed range {lo}-{hi}"
        )
    if not (0 <= item.answer_index < len(item.options)):
        problems.append(
            f"answer index {item.answer_index} out of range for "
            f"{len(item.options)} options"
        )
    normalized = [normalize_option(o) for o in item.options]
    if any(not n for n in normalized):
        problems.append("an option is empty after normalization")
    if len(set(normalized)) != len(normalized):
        problems.append("options are not pairwise distinct after normalization")
    if item.word_diff_raw is not None:
        try:
            recode_word_difficulty(item.word_diff_raw)
        except ValidationError as exc:
            problems.append(str(exc))
    return problems
