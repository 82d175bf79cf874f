"""Parsing model output into items, and structural morphology checks.

The expected surface form is a stem line, one option per line with a
letter prefix ("A.", "B)", "C -"), and a final "Answer: <letter>" line.
Real model output wraps that in rationale, markdown, and labels, so the
parser scavenges rather than insists: it finds the last complete option
run, the nearest stem line above it, and the last answer declaration.

Diagnostic codes (fatal ones abort the item):

- NO_STEM          fatal: no usable stem line before the options
- OPTION_COUNT     fatal: found a different number of options than expected
- OPTION_ORDER     fatal: option letters never form a clean A, B, C... run
- OPTION_EMPTY     fatal: an option line carries no text
- ANSWER_MISSING   fatal: no "Answer: <letter>" declaration found
- ANSWER_RANGE     fatal: the declared letter points past the options
- ANSWER_MULTIPLE  note: several answer declarations; the last one wins
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Optional

from .items import DEFAULT_OPTION_COUNT, Item, QuestionType

OPTION_LINE = re.compile(
    r"^\s*(?:[-*•]\s*)?\**\s*([A-Za-z])\**\s*[.)\-:]\s*\**(.*?)\**\s*$"
)
ANSWER_LINE = re.compile(
    r"^\s*\W*answer\W*[:\-]?\s*\**\s*([A-Za-z])\b", re.IGNORECASE
)
LABEL_LINE = re.compile(
    r"^\s*(?:final\s+)?(?:item|question|stem|output)\s*:?\s*$", re.IGNORECASE
)
# a single word set off by asterisks or double quotes (straight or curly)
DELIMITED_TOKEN = re.compile(
    r"[*\"“”]([A-Za-z][A-Za-z'\-]*)[*\"“”]"
)
# inline bold; flattened before target extraction so **NOT** is emphasis,
# not a marked word
BOLD_SPAN = re.compile(r"\*\*([^*\n]+?)\*\*")


@dataclass
class Diagnostic:
    code: str
    message: str
    fatal: bool = True
    #: line index in the raw text the diagnostic points at, when known
    span: Optional[int] = None

    def to_record(self) -> dict:
        return {
            "code": self.code,
            "message": self.message,
            "fatal": self.fatal,
            "span": self.span,
        }


@dataclass
class ParseResult:
    item: Optional[Item]
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def fatal(self) -> bool:
        return any(d.fatal for d in self.diagnostics)

    @property
    def codes(self) -> list[str]:
        return [d.code for d in self.diagnostics]


def _strip_markup(line: str) -> str:
    line = line.strip()
    line = re.sub(r"^#+\s*", "", line)
    line = re.sub(r"^(?:[-*•]|\d+\.)\s+", "", line)
    line = re.sub(r"^\*\*(.*)\*\*$", r"\1", line)
    return line.strip()


def extract_target_word(stem: str) -> Optional[str]:
    """Last single word set off by asterisks or double quotes, if any."""
    matches = DELIMITED_TOKEN.findall(stem)
    return matches[-1] if matches else None


def _clean_stem(raw_stem: str) -> str:
    """Drop emphasis markers from the stem, keeping the words."""
    cleaned = DELIMITED_TOKEN.sub(lambda m: m.group(1), raw_stem)
    return _strip_markup(cleaned)


def _option_runs(option_lines: list[tuple[int, str, str]]) -> list[list[tuple[int, str, str]]]:
    """Group option lines into maximal consecutive-letter runs starting at A."""
    runs: list[list[tuple[int, str, str]]] = []
    current: list[tuple[int, str, str]] = []
    for entry in option_lines:
        _, letter, _ = entry
        index = ord(letter.upper()) - ord("A")
        if index == 0:
            if current:
                runs.append(current)
            current = [entry]
        elif current and index == len(current):
            current.append(entry)
        else:
            if current:
                runs.append(current)
            current = []
    if current:
        runs.append(current)
    return runs


def parse_item(
    raw: str,
    expected_qt: QuestionType,
    item_id: str = "",
    expected_options: int = DEFAULT_OPTION_COUNT,
) -> ParseResult:
    """Extract one item from raw model output.

    Returns a ParseResult whose item is None when any fatal diagnostic
    fires. Never raises on malformed text.
    """
    diagnostics: list[Diagnostic] = []
    lines = raw.splitlines()

    option_lines: list[tuple[int, str, str]] = []
    answer_hits: list[tuple[int, str]] = []
    for idx, line in enumerate(lines):
        answer_match = ANSWER_LINE.match(line)
        if answer_match:
            answer_hits.append((idx, answer_match.group(1)))
            continue
        option_match = OPTION_LINE.match(line)
        if option_match:
            option_lines.append((idx, option_match.group(1), option_match.group(2).strip()))

    runs = _option_runs(option_lines)
    if runs:
        run = runs[-1]
    else:
        run = []
        if option_lines:
            diagnostics.append(
                Diagnostic(
                    "OPTION_ORDER",
                    "option letters never form a consecutive run starting at A",
                    span=option_lines[0][0],
                )
            )

    if len(run) != expected_options:
        diagnostics.append(
            Diagnostic(
                "OPTION_COUNT",
                f"expected {expected_options} options, found {len(run)}",
                span=run[0][0] if run else None,
            )
        )
    for lineno, letter, text in run:
        if not text:
            diagnostics.append(
                Diagnostic(
                    "OPTION_EMPTY",
                    f"option {letter.upper()} has no text",
                    span=lineno,
                )
            )

    # stem: nearest non-empty, non-label line above the option run
    stem_raw: Optional[str] = None
    if run:
        first_option_idx = run[0][0]
        for idx in range(first_option_idx - 1, -1, -1):
            candidate = _strip_markup(lines[idx])
            if not candidate or LABEL_LINE.match(lines[idx]):
                continue
            stem_raw = candidate
            break
    if stem_raw is None:
        diagnostics.append(
            Diagnostic(
                "NO_STEM",
                "no usable stem line precedes the options",
                span=run[0][0] if run else None,
            )
        )

    answer_index: Optional[int] = None
    if not answer_hits:
        diagnostics.append(
            Diagnostic("ANSWER_MISSING", "no answer declaration found")
        )
    else:
        if len(answer_hits) > 1:
            diagnostics.append(
                Diagnostic(
                    "ANSWER_MULTIPLE",
                    f"{len(answer_hits)} answer declarations; using the last",
                    fatal=False,
                    span=answer_hits[-1][0],
                )
            )
        letter = answer_hits[-1][1].upper()
        answer_index = ord(letter) - ord("A")
        if run and not (0 <= answer_index < len(run)):
            diagnostics.append(
                Diagnostic(
                    "ANSWER_RANGE",
                    f"answer letter {letter} points past the {len(run)} options",
                    span=answer_hits[-1][0],
                )
            )

    if any(d.fatal for d in diagnostics):
        return ParseResult(item=None, diagnostics=diagnostics)

    assert stem_raw is not None and answer_index is not None
    stem_flat = BOLD_SPAN.sub(r"\1", stem_raw)
    item = Item(
        id=item_id,
        stem=_clean_stem(stem_flat),
        options=tuple(text for _, _, text in run),
        answer_index=answer_index,
        qt=expected_qt,
        target_word=extract_target_word(stem_flat),
    )
    return ParseResult(item=item, diagnostics=diagnostics)


def serialize_item(item: Item) -> str:
    """Render an item in the canonical surface form.

    The target word, when it occurs in the stem, is set off with
    asterisks so parsing the output recovers it; the last occurrence is
    marked, matching the parser's last-token rule.
    """
    stem = item.stem
    if item.target_word:
        pattern = re.compile(rf"\b{re.escape(item.target_word)}\b")
        matches = list(pattern.finditer(stem))
        if matches:
            last = matches[-1]
            stem = f"{stem[:last.start()]}*{item.target_word}*{stem[last.end():]}"
    lines = [stem]
    for i, option in enumerate(item.options):
        lines.append(f"{chr(ord('A') + i)}. {option}")
    lines.append(f"Answer: {chr(ord('A') + item.answer_index)}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Morphology checks


#: Reason attached to question types whose correctness is a matter of
#: meaning rather than string structure.
SEMANTIC_REASON = "semantic, not machine-checkable"

#: The leftover after stripping a shared affix must exceed twice the affix
#: length to count as a genuine affixed parse; shorter leftovers are treated
#: as accidental string overlap (heuristic, documented in every violation).
AFFIX_CARRY_FACTOR = 2


@dataclass
class MorphViolation:
    check: str
    code: str
    message: str

    def to_record(self) -> dict:
        return {"check": self.check, "code": self.code, "message": self.message}


@dataclass
class MorphCheckReport:
    item_id: str
    checks_run: list[str] = field(default_factory=list)
    violations: list[MorphViolation] = field(default_factory=list)
    unchecked: list[tuple[str, str]] = field(default_factory=list)

    def to_record(self) -> dict:
        return {
            "item_id": self.item_id,
            "checks_run": self.checks_run,
            "violations": [v.to_record() for v in self.violations],
            "unchecked": [{"check": c, "reason": r} for c, r in self.unchecked],
        }


def _resolve_target(item: Item) -> Optional[str]:
    if item.target_word:
        return item.target_word
    return extract_target_word(item.stem)


def _norm(text: str) -> str:
    return text.strip().casefold()


def _check_leading(item: Item, target: str) -> list[MorphViolation]:
    answer = _norm(item.answer_text)
    word = _norm(target)
    if not (word.startswith(answer) and 0 < len(answer) < len(word)):
        return [
            MorphViolation(
                "prefix_is_leading",
                "PREFIX_NOT_LEADING",
                f"keyed option {item.answer_text!r} is not a leading part of {target!r}",
            )
        ]
    return []


def _check_trailing(item: Item, target: str) -> list[MorphViolation]:
    answer = _norm(item.answer_text)
    word = _norm(target)
    if not (word.endswith(answer) and 0 < len(answer) < len(word)):
        return [
            MorphViolation(
                "suffix_is_trailing",
                "SUFFIX_NOT_TRAILING",
                f"keyed option {item.answer_text!r} is not a trailing part of {target!r}",
            )
        ]
    return []


def _check_substring(item: Item, target: str) -> list[MorphViolation]:
    answer = _norm(item.answer_text)
    word = _norm(target)
    if not (answer and answer in word and len(answer) < len(word)):
        return [
            MorphViolation(
                "root_is_substring",
                "ROOT_NOT_SUBSTRING",
                f"keyed option {item.answer_text!r} does not occur inside {target!r}",
            )
        ]
    return []


PART_SEPARATORS = re.compile(r"[/|+\-\s]+")


def _check_segmentation(item: Item, target: str) -> list[MorphViolation]:
    joined = "".join(PART_SEPARATORS.split(_norm(item.answer_text)))
    if joined != _norm(target):
        return [
            MorphViolation(
                "parts_concatenate",
                "PARTS_MISMATCH",
                f"keyed segmentation {item.answer_text!r} does not rebuild {target!r}",
            )
        ]
    return []


def _common_leading(words: list[str]) -> str:
    if not words:
        return ""
    shortest = min(words, key=len)
    for i, ch in enumerate(shortest):
        if any(w[i] != ch for w in words):
            return shortest[:i]
    return shortest


def _common_trailing(words: list[str]) -> str:
    return _common_leading([w[::-1] for w in words])[::-1]


def _carries_affix(word: str, affix: str, leading: bool) -> bool:
    """Heuristic parse test: the word must start/end with the affix and
    leave a remainder longer than AFFIX_CARRY_FACTOR times the affix."""
    if leading:
        hit = word.startswith(affix)
    else:
        hit = word.endswith(affix)
    return hit and (len(word) - len(affix)) > AFFIX_CARRY_FACTOR * len(affix)


def _check_odd_one_out(item: Item, leading: bool) -> list[MorphViolation]:
    name = "odd_prefix_out" if leading else "odd_suffix_out"
    side = "prefix" if leading else "suffix"
    others = [
        _norm(opt) for i, opt in enumerate(item.options) if i != item.answer_index
    ]
    shared = _common_leading(others) if leading else _common_trailing(others)
    if len(shared) < 2:
        return [
            MorphViolation(
                name,
                f"SHARED_{side.upper()}_MISSING",
                f"non-keyed options do not share a {side} of length >= 2 "
                "(string heuristic)",
            )
        ]
    if _carries_affix(_norm(item.answer_text), shared, leading):
        return [
            MorphViolation(
                name,
                f"KEY_SHARES_{side.upper()}",
                f"keyed option {item.answer_text!r} also carries the shared "
                f"{side} {shared!r} (string heuristic)",
            )
        ]
    return []


def load_wordlist(path) -> set[str]:
    """Plain-text lexicon, one word per line, casefolded; blank lines
    and #-comments are skipped."""
    words: set[str] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            word = line.strip()
            if word and not word.startswith("#"):
                words.add(word.casefold())
    return words


def _check_spelling(item: Item, wordlist: set[str]) -> list[MorphViolation]:
    normalized = {w.casefold() for w in wordlist}
    hits = [opt for opt in item.options if _norm(opt) in normalized]
    violations: list[MorphViolation] = []
    if len(hits) != 1:
        violations.append(
            MorphViolation(
                "spelling_in_wordlist",
                "SPELLING_COUNT",
                f"expected exactly 1 option in the wordlist, found {len(hits)}",
            )
        )
    elif _norm(hits[0]) != _norm(item.answer_text):
        violations.append(
            MorphViolation(
                "spelling_in_wordlist",
                "SPELLING_KEY",
                f"the listed spelling {hits[0]!r} is not the keyed option",
            )
        )
    return violations


#: QTs whose checks need a resolvable target word.
_TARGET_CHECKS: dict[QuestionType, tuple[str, Callable[[Item, str], list[MorphViolation]]]] = {
    QuestionType.QT1: ("prefix_is_leading", _check_leading),
    QuestionType.QT2: ("suffix_is_trailing", _check_trailing),
    QuestionType.QT3: ("root_is_substring", _check_substring),
    QuestionType.QT9: ("parts_concatenate", _check_segmentation),
}

_SEMANTIC_QTS = (
    QuestionType.QT6,
    QuestionType.QT7,
    QuestionType.QT10,
    QuestionType.QT11,
    QuestionType.QT12,
    QuestionType.QT13,
)


def morph_checks(item: Item, wordlist: Optional[set[str]] = None) -> MorphCheckReport:
    """Run the structural check registered for the item's question type.

    Every question type resolves to exactly one of: a check that ran, or
    an unchecked entry carrying the reason. Checks never raise; a failed
    precondition (no resolvable target word) becomes a violation with
    code PRECONDITION.
    """
    report = MorphCheckReport(item_id=item.id)
    qt = item.qt

    if qt in _TARGET_CHECKS:
        name, check = _TARGET_CHECKS[qt]
        target = _resolve_target(item)
        if target is None:
            report.violations.append(
                MorphViolation(
                    name,
                    "PRECONDITION",
                    "no target word in metadata and none marked in the stem",
                )
            )
        else:
            report.checks_run.append(name)
            report.violations.extend(check(item, target))
    elif qt is QuestionType.QT4:
        report.checks_run.append("odd_prefix_out")
        report.violations.extend(_check_odd_one_out(item, leading=True))
    elif qt is QuestionType.QT5:
        report.checks_run.append("odd_suffix_out")
        report.violations.extend(_check_odd_one_out(item, leading=False))
    elif qt is QuestionType.QT8:
        if wordlist:
            report.checks_run.append("spelling_in_wordlist")
            report.violations.extend(_check_spelling(item, wordlist))
        else:
            report.unchecked.append(("spelling_in_wordlist", "wordlist not configured"))
    elif qt in _SEMANTIC_QTS:
        report.unchecked.append((f"{qt.value.lower()}_semantics", SEMANTIC_REASON))

    return report
