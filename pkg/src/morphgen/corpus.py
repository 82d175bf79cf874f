"""Corpus loading, saving, summary statistics, and stratified splitting.

Canonical on-disk form is line-delimited JSON, one item per line, with a
fixed field order so that saves are byte-stable. CSV import is supported
for hand-maintained sheets; options travel pipe-separated there.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .errors import ConfigurationError, CorpusFormatError, ValidationError
from .items import (
    DEFAULT_TASK_CUTS,
    Item,
    recode_word_difficulty,
    validate_item,
)
from .stats import spearman_rho

CSV_FIELDS = [
    "id",
    "stem",
    "options",
    "answer_index",
    "qt",
    "skill",
    "morph",
    "word_diff_raw",
    "task_diff_raw",
    "target_word",
    "target_morpheme",
]

#: Metadata axes a split may stratify on.
STRATA_AXES = ("qt", "skill", "morph", "word_diff", "task_diff")

DEFAULT_STRATA: tuple[str, ...] = ("qt", "task_diff")


@dataclass
class Corpus:
    items: list[Item] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def digest(self) -> str:
        """Content digest over the canonical serialized form."""
        h = hashlib.sha256()
        for item in self.items:
            h.update(_canonical_line(item).encode("utf-8"))
        return h.hexdigest()


def _canonical_line(item: Item) -> str:
    return json.dumps(item.to_record(), ensure_ascii=False) + "\n"


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for item in corpus.items:
            fh.write(_canonical_line(item))


def load_corpus(path: str | Path, fmt: Optional[str] = None) -> Corpus:
    """Load a corpus from jsonl or csv, validating every record.

    All bad records are collected and reported together (with their line
    numbers) instead of stopping at the first one.
    """
    path = Path(path)
    if fmt is None:
        fmt = "csv" if path.suffix.lower() == ".csv" else "jsonl"
    if fmt == "jsonl":
        raw_records, problems = _read_jsonl(path)
    elif fmt == "csv":
        raw_records, problems = _read_csv(path), []
    else:
        raise ConfigurationError(f"unknown corpus format {fmt!r}")

    items: list[Item] = []
    seen_ids: set[str] = set()
    for lineno, record in raw_records:
        missing = [
            k for k in ("id", "stem", "options", "answer_index", "qt")
            if record.get(k) in (None, "", [])
        ]
        if missing:
            problems.append(f"line {lineno}: missing field(s) {', '.join(missing)}")
            continue
        try:
            item = Item.from_record(record)
        except (ValidationError, ValueError, TypeError, KeyError) as exc:
            problems.append(f"line {lineno}: {exc}")
            continue
        violations = validate_item(item)
        if violations:
            problems.append(f"line {lineno}: {'; '.join(violations)}")
            continue
        if item.id in seen_ids:
            problems.append(f"line {lineno}: duplicate item id {item.id!r}")
            continue
        seen_ids.add(item.id)
        items.append(item)
    if problems:
        raise CorpusFormatError(problems)
    return Corpus(items)


def _read_jsonl(path: Path) -> tuple[list[tuple[int, dict]], list[str]]:
    records: list[tuple[int, dict]] = []
    problems: list[str] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                problems.append(f"line {lineno}: invalid JSON ({exc.msg})")
                continue
            if not isinstance(record, dict):
                problems.append(f"line {lineno}: record is not an object")
                continue
            records.append((lineno, record))
    return records, problems


def _read_csv(path: Path) -> list[tuple[int, dict]]:
    records: list[tuple[int, dict]] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise CorpusFormatError(["csv file has no header row"])
        unknown = set(reader.fieldnames) - set(CSV_FIELDS)
        if unknown:
            raise CorpusFormatError([f"csv header has unknown column(s) {sorted(unknown)}"])
        for lineno, row in enumerate(reader, start=2):
            record: dict = {}
            for key, value in row.items():
                if value is None or value == "":
                    record[key] = None
                    continue
                if key == "options":
                    record[key] = [part.strip() for part in value.split("|")]
                elif key == "answer_index":
                    record[key] = _maybe_int(value, lineno)
                elif key in ("word_diff_raw", "task_diff_raw"):
                    record[key] = _maybe_float(value, lineno)
                else:
                    record[key] = value
            records.append((lineno, record))
    return records


def _maybe_int(value: str, lineno: int) -> int:
    try:
        return int(value)
    except ValueError:
        raise CorpusFormatError([f"line {lineno}: {value!r} is not an integer"])


def _maybe_float(value: str, lineno: int) -> float:
    try:
        return float(value)
    except ValueError:
        raise CorpusFormatError([f"line {lineno}: {value!r} is not a number"])


# ---------------------------------------------------------------------------
# Summary statistics


@dataclass
class CorpusSummary:
    total: int
    by_qt: dict[str, int]
    by_skill: dict[str, int]
    by_morph: dict[str, int]
    by_word_level: dict[str, int]
    by_task_band: dict[str, int]
    stem_words_mean: float
    stem_words_min: int
    stem_words_max: int

    def to_record(self) -> dict:
        return {
            "total": self.total,
            "by_qt": self.by_qt,
            "by_skill": self.by_skill,
            "by_morph": self.by_morph,
            "by_word_level": self.by_word_level,
            "by_task_band": self.by_task_band,
            "stem_words_mean": self.stem_words_mean,
            "stem_words_min": self.stem_words_min,
            "stem_words_max": self.stem_words_max,
        }


def _count(values: Iterable[Optional[str]]) -> dict[str, int]:
    table: dict[str, int] = {}
    for v in values:
        key = v if v is not None else "unknown"
        table[key] = table.get(key, 0) + 1
    return dict(sorted(table.items()))


def summarize(
    corpus: Corpus, task_cuts: tuple[int, int] = DEFAULT_TASK_CUTS
) -> CorpusSummary:
    """Count items along every metadata axis and measure stem lengths.

    Each count table sums to the corpus total; items missing an axis are
    counted under "unknown" rather than dropped.
    """
    if not corpus.items:
        raise ValidationError("cannot summarize an empty corpus")
    stem_lengths = [len(item.stem.split()) for item in corpus.items]
    return CorpusSummary(
        total=len(corpus.items),
        by_qt=_count(i.qt.value for i in corpus.items),
        by_skill=_count(i.skill.value if i.skill else None for i in corpus.items),
        by_morph=_count(i.morph.value if i.morph else None for i in corpus.items),
        by_word_level=_count(
            str(i.word_diff_level()) if i.word_diff_raw is not None else None
            for i in corpus.items
        ),
        by_task_band=_count(
            i.task_band(task_cuts).value if i.task_diff_raw is not None else None
            for i in corpus.items
        ),
        stem_words_mean=sum(stem_lengths) / len(stem_lengths),
        stem_words_min=min(stem_lengths),
        stem_words_max=max(stem_lengths),
    )


def difficulty_correlation(corpus: Corpus) -> float:
    """Spearman correlation between raw word and task difficulty over the
    items that carry both ratings."""
    pairs = [
        (i.word_diff_raw, i.task_diff_raw)
        for i in corpus.items
        if i.word_diff_raw is not None and i.task_diff_raw is not None
    ]
    if len(pairs) < 2:
        raise ValidationError("fewer than 2 items carry both difficulty ratings")
    return spearman_rho([p[0] for p in pairs], [p[1] for p in pairs])


# ---------------------------------------------------------------------------
# Stratified splitting


@dataclass(frozen=True)
class SplitSpec:
    """How to cut a corpus into train/val/test.

    Shuffling inside each stratum uses the Mersenne Twister
    (random.Random) seeded with `seed`; reruns with the same corpus,
    ratios, and seed are byte-identical.
    """

    ratios: tuple[float, float, float] = (0.8, 0.1, 0.1)
    seed: int = 0
    strata_keys: tuple[str, ...] = DEFAULT_STRATA
    task_cuts: tuple[int, int] = DEFAULT_TASK_CUTS

    def validate(self) -> None:
        if len(self.ratios) != 3:
            raise ConfigurationError(f"need exactly 3 ratios, got {self.ratios!r}")
        if any(r < 0 for r in self.ratios):
            raise ConfigurationError(f"ratios must be non-negative: {self.ratios!r}")
        if abs(sum(self.ratios) - 1.0) > 1e-9:
            raise ConfigurationError(
                f"ratios must sum to 1, got {sum(self.ratios)!r}"
            )
        bad = [k for k in self.strata_keys if k not in STRATA_AXES]
        if bad:
            raise ConfigurationError(
                f"unknown strata key(s) {bad}; valid axes are {STRATA_AXES}"
            )


@dataclass
class SplitResult:
    train: Corpus
    val: Corpus
    test: Corpus
    warnings: list[str] = field(default_factory=list)

    @property
    def parts(self) -> tuple[Corpus, Corpus, Corpus]:
        return (self.train, self.val, self.test)


SPLIT_NAMES = ("train", "val", "test")


def _stratum_key(item: Item, spec: SplitSpec) -> tuple[str, ...]:
    parts: list[str] = []
    for axis in spec.strata_keys:
        if axis == "qt":
            parts.append(item.qt.value)
        elif axis == "skill":
            parts.append(item.skill.value if item.skill else "unknown")
        elif axis == "morph":
            parts.append(item.morph.value if item.morph else "unknown")
        elif axis == "word_diff":
            level = item.word_diff_level()
            parts.append(str(level) if level is not None else "unknown")
        elif axis == "task_diff":
            band = item.task_band(spec.task_cuts)
            parts.append(band.value if band is not None else "unknown")
    return tuple(parts)


def apportion(n: int, ratios: Sequence[float]) -> list[int]:
    """Largest-remainder apportionment of n seats across ratios.

    Ties on the fractional remainder go to the earlier split (train
    before val before test).
    """
    quotas = [r * n for r in ratios]
    base = [math.floor(q) for q in quotas]
    leftover = n - sum(base)
    # sort by remainder descending, then split order; stable for ties
    order = sorted(
        range(len(ratios)), key=lambda i: (-(quotas[i] - base[i]), i)
    )
    for i in order[:leftover]:
        base[i] += 1
    return base


def stratified_split(corpus: Corpus, spec: SplitSpec) -> SplitResult:
    """Cut a corpus into train/val/test preserving strata proportions.

    Within each stratum, items are ordered by id, shuffled with the
    seeded PRNG, apportioned by largest remainder, and dealt out in
    train, val, test order. Every item lands in exactly one part.
    """
    spec.validate()
    if not corpus.items:
        raise ValidationError("cannot split an empty corpus")

    strata: dict[tuple[str, ...], list[Item]] = {}
    for item in corpus.items:
        strata.setdefault(_stratum_key(item, spec), []).append(item)

    nonzero_splits = sum(1 for r in spec.ratios if r > 0)
    rng = random.Random(spec.seed)
    parts: tuple[list[Item], list[Item], list[Item]] = ([], [], [])
    warnings: list[str] = []

    for key in sorted(strata):
        members = sorted(strata[key], key=lambda i: i.id)
        rng.shuffle(members)
        counts = apportion(len(members), spec.ratios)
        if len(members) < nonzero_splits:
            warnings.append(
                f"stratum {'/'.join(key)} has {len(members)} item(s) for "
                f"{nonzero_splits} nonzero splits; assigned by remainder order"
            )
        cursor = 0
        for part, count in zip(parts, counts):
            part.extend(members[cursor : cursor + count])
            cursor += count

    return SplitResult(
        train=Corpus(parts[0]),
        val=Corpus(parts[1]),
        test=Corpus(parts[2]),
        warnings=warnings,
    )
