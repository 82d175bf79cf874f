"""Automated quality metrics: grammar, readability, fluency, complexity.

All four metrics land on a 0-100 scale (higher is better for grammar,
readability, fluency; complexity reports relative depth). Raw values are
kept alongside the clamped scores so nothing is lost to the scale.

Metric input for an item is its stem plus the option texts, joined with
newlines; the answer key line is never scored. Sentence boundaries are
runs of .!? or newlines, so each option line counts as its own sentence.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence

from .errors import ConfigurationError, TransportError, ValidationError
from .items import Item

WORD = re.compile(r"[A-Za-z]+(?:['\-][A-Za-z]+)*")
VOWEL_GROUP = re.compile(r"[aeiouy]+")
SENTENCE_BREAK = re.compile(r"[.!?]+|\n+")

#: Default ceiling for the depth-to-score mapping.
D_MAX_DEFAULT = 10

#: Words that open a subordinate clause; the heuristic parser treats each
#: occurrence as one extra layer of structure.
SUBORDINATORS = frozenset(
    """
    after although as because before if once since that though unless until
    when whenever where wherever whereas while which who whom whose
    """.split()
)


def clamp01(x: float) -> float:
    return max(0.0, min(1.0, x))


def tokenize_words(text: str) -> list[str]:
    return WORD.findall(text)


def split_sentences(text: str) -> list[str]:
    """Segments containing at least one word; boundaries are .!? runs or
    newlines."""
    return [
        seg.strip() for seg in SENTENCE_BREAK.split(text) if seg and WORD.search(seg)
    ]


def count_syllables(word: str) -> int:
    """Count syllables as maximal vowel groups (a e i o u y, casefolded),
    dropping one for a terminal silent "e" unless that would reach zero.
    Never returns less than 1.
    """
    folded = word.casefold()
    if not re.search(r"[a-z]", folded):
        raise ValidationError(f"word {word!r} contains no letters")
    groups = len(VOWEL_GROUP.findall(folded))
    if folded.endswith("e") and groups > 1:
        groups -= 1
    return max(groups, 1)


# ---------------------------------------------------------------------------
# Individual metrics


@dataclass
class ReadabilityResult:
    raw: float   # unclamped reading-ease value, can leave [0, 100]
    score: float

    def to_record(self) -> dict:
        return {"raw": self.raw, "score": self.score}


def readability(text: str) -> ReadabilityResult:
    """Reading ease: 206.835 - 1.015*(words/sentences) - 84.6*(syllables/words),
    clamped to [0, 100] for the score while the raw value is retained."""
    words = tokenize_words(text)
    if not words:
        raise ValidationError("readability needs at least one word")
    sentences = split_sentences(text)
    sentence_count = max(len(sentences), 1)
    syllables = sum(count_syllables(w) for w in words)
    raw = (
        206.835
        - 1.015 * (len(words) / sentence_count)
        - 84.6 * (syllables / len(words))
    )
    return ReadabilityResult(raw=raw, score=clamp01(raw / 100.0) * 100.0)


def grammar_score(error_count: int, word_count: int) -> tuple[float, float]:
    """Map an error count to a 0-100 score via errors per 100 words.

    Returns (error_density, score): density d = errors/words*100,
    score = clamp(1 - d/10, 0, 1) * 100, so 10 errors per 100 words
    already bottoms out at 0.
    """
    if word_count < 1:
        raise ValidationError("grammar scoring needs at least one word")
    if error_count < 0:
        raise ValidationError(f"negative error count {error_count}")
    density = error_count / word_count * 100.0
    return density, clamp01(1.0 - density / 10.0) * 100.0


def perplexity_from_logprobs(logprobs: Sequence[float]) -> float:
    """exp(-mean token logprob)."""
    if not logprobs:
        raise ValidationError("perplexity needs at least one token logprob")
    for lp in logprobs:
        if not isinstance(lp, (int, float)) or not math.isfinite(lp):
            raise ValidationError(f"non-finite logprob {lp!r}")
    return math.exp(-sum(logprobs) / len(logprobs))


def fluency_score(perplexity: float) -> float:
    """Linear map from perplexity to 0-100: 20 or lower scores 100,
    120 or higher scores 0."""
    if perplexity <= 0 or not math.isfinite(perplexity):
        raise ValidationError(f"perplexity must be positive and finite, got {perplexity!r}")
    return clamp01(1.0 - (perplexity - 20.0) / 100.0) * 100.0


def complexity_score(depth: int, d_max: int = D_MAX_DEFAULT) -> float:
    """Relative structural depth: clamp(depth/d_max, 0, 1) * 100."""
    if d_max <= 0:
        raise ConfigurationError(f"d_max must be positive, got {d_max}")
    if depth < 0:
        raise ValidationError(f"negative depth {depth}")
    return clamp01(depth / d_max) * 100.0


# ---------------------------------------------------------------------------
# Parsing backends (structure for the complexity metric and features)


@dataclass
class ParsedSentence:
    tokens: list[str]
    pos: list[str]
    depth: int


@dataclass
class ParsedText:
    sentences: list[ParsedSentence]
    parser: str

    @property
    def max_depth(self) -> int:
        return max((s.depth for s in self.sentences), default=0)


_DETERMINERS = frozenset("a an the this that these those each every some any no".split())
_PRONOUNS = frozenset(
    "i you he she it we they me him her us them mine yours his hers ours theirs".split()
)
_PREPOSITIONS = frozenset(
    "in on at of to from with by for over under between into through during about".split()
)
_CONJUNCTIONS = frozenset("and or but nor so yet".split())

_POS_SUFFIXES: tuple[tuple[str, str], ...] = (
    ("ly", "ADV"),
    ("ing", "VERB"),
    ("ed", "VERB"),
    ("ize", "VERB"),
    ("ify", "VERB"),
    ("tion", "NOUN"),
    ("sion", "NOUN"),
    ("ness", "NOUN"),
    ("ment", "NOUN"),
    ("ity", "NOUN"),
    ("ous", "ADJ"),
    ("ful", "ADJ"),
    ("able", "ADJ"),
    ("ible", "ADJ"),
    ("ive", "ADJ"),
    ("al", "ADJ"),
    ("ic", "ADJ"),
)


def _heuristic_pos(word: str) -> str:
    folded = word.casefold()
    if folded in _DETERMINERS:
        return "DET"
    if folded in _PRONOUNS:
        return "PRON"
    if folded in _PREPOSITIONS:
        return "ADP"
    if folded in _CONJUNCTIONS:
        return "CONJ"
    if folded in SUBORDINATORS:
        return "SCONJ"
    for suffix, tag in _POS_SUFFIXES:
        if folded.endswith(suffix) and len(folded) > len(suffix) + 1:
            return tag
    return "NOUN"


class HeuristicParseBackend:
    """Offline stand-in for a dependency parser.

    Tags parts of speech by suffix and closed-class lookup, and estimates
    sentence depth as a root layer plus a token layer (2) plus one layer
    per subordinator or comma. Results are labeled "heuristic" wherever
    they surface.
    """

    name = "heuristic"

    def parse(self, text: str) -> ParsedText:
        sentences: list[ParsedSentence] = []
        for segment in split_sentences(text):
            tokens = tokenize_words(segment)
            markers = sum(1 for t in tokens if t.casefold() in SUBORDINATORS)
            depth = 2 + markers + segment.count(",")
            sentences.append(
                ParsedSentence(
                    tokens=tokens,
                    pos=[_heuristic_pos(t) for t in tokens],
                    depth=depth,
                )
            )
        return ParsedText(sentences=sentences, parser=self.name)


def _depth_from_heads(heads: Sequence[int]) -> int:
    """Node depth of a head-indexed tree; the root (head -1 or self) sits
    at depth 1. Cycles are cut off at the token count."""
    n = len(heads)
    best = 0
    for start in range(n):
        depth = 1
        node = start
        seen = 0
        while 0 <= heads[node] != node and seen < n:
            node = heads[node]
            depth += 1
            seen += 1
        best = max(best, depth)
    return best


class HttpParseBackend:
    """Client for a parse service.

    Request: POST JSON {"text": ...}. Response: {"sentences": [{"tokens":
    [...], "pos": [...], "heads": [...]}]} where heads holds the 0-based
    head index per token and -1 (or self-reference) marks the root.
    """

    def __init__(
        self,
        endpoint: str,
        timeout: float = 30.0,
        transport: Optional[Callable[..., tuple[int, str]]] = None,
        name: str = "http-parse",
    ):
        self.endpoint = endpoint
        self.timeout = timeout
        self.transport = transport or _requests_json_transport
        self.name = name

    def parse(self, text: str) -> ParsedText:
        status, body = self.transport(self.endpoint, {"text": text}, self.timeout)
        if status != 200:
            raise TransportError(f"parse backend returned {status}")
        payload = json.loads(body)
        sentences = [
            ParsedSentence(
                tokens=list(s["tokens"]),
                pos=list(s["pos"]),
                depth=_depth_from_heads(list(s["heads"])),
            )
            for s in payload.get("sentences", [])
        ]
        return ParsedText(sentences=sentences, parser=self.name)


class HttpGrammarBackend:
    """Client for a grammar-check service.

    Request: POST form fields text and language to the check endpoint.
    Response: JSON {"matches": [{"offset": ..., "length": ...,
    "message": ...}, ...]}; each match counts as one error.
    """

    def __init__(
        self,
        endpoint: str,
        language: str = "en-US",
        timeout: float = 30.0,
        transport: Optional[Callable[..., tuple[int, str]]] = None,
        name: str = "http-grammar",
    ):
        self.endpoint = endpoint
        self.language = language
        self.timeout = timeout
        self.transport = transport or _requests_form_transport
        self.name = name

    def check(self, text: str) -> list[dict]:
        status, body = self.transport(
            self.endpoint, {"text": text, "language": self.language}, self.timeout
        )
        if status != 200:
            raise TransportError(f"grammar backend returned {status}")
        payload = json.loads(body)
        matches = payload.get("matches", [])
        if not isinstance(matches, list):
            raise TransportError("grammar backend response has no matches list")
        return matches


def _requests_json_transport(endpoint: str, payload: dict, timeout: float) -> tuple[int, str]:
    import requests

    try:
        response = requests.post(endpoint, json=payload, timeout=timeout)
    except requests.RequestException as exc:
        raise TransportError(f"request to {endpoint} failed: {exc}") from exc
    return response.status_code, response.text


def _requests_form_transport(endpoint: str, payload: dict, timeout: float) -> tuple[int, str]:
    import requests

    try:
        response = requests.post(endpoint, data=payload, timeout=timeout)
    except requests.RequestException as exc:
        raise TransportError(f"request to {endpoint} failed: {exc}") from exc
    return response.status_code, response.text


# ---------------------------------------------------------------------------
# Features and per-item scoring


@dataclass
class LinguisticFeatures:
    word_count: int
    sentence_count: int
    syllable_count: int
    avg_word_length: float
    avg_sentence_length: float
    unique_word_ratio: float
    pos_distribution: dict[str, float]
    max_dependency_depth: int
    parser: str

    def to_record(self) -> dict:
        return {
            "word_count": self.word_count,
            "sentence_count": self.sentence_count,
            "syllable_count": self.syllable_count,
            "avg_word_length": self.avg_word_length,
            "avg_sentence_length": self.avg_sentence_length,
            "unique_word_ratio": self.unique_word_ratio,
            "pos_distribution": self.pos_distribution,
            "max_dependency_depth": self.max_dependency_depth,
            "parser": self.parser,
        }


def extract_features(text: str, parse_backend: Optional[Any] = None) -> LinguisticFeatures:
    """Surface statistics plus parser-derived structure for one text."""
    words = tokenize_words(text)
    if not words:
        raise ValidationError("feature extraction needs at least one word")
    backend = parse_backend or HeuristicParseBackend()
    parsed = backend.parse(text)
    pos_counts: dict[str, int] = {}
    for sentence in parsed.sentences:
        for tag in sentence.pos:
            pos_counts[tag] = pos_counts.get(tag, 0) + 1
    total_tags = sum(pos_counts.values())
    distribution = (
        {tag: count / total_tags for tag, count in sorted(pos_counts.items())}
        if total_tags
        else {}
    )
    sentence_count = max(len(parsed.sentences), 1)
    return LinguisticFeatures(
        word_count=len(words),
        sentence_count=sentence_count,
        syllable_count=sum(count_syllables(w) for w in words),
        avg_word_length=sum(len(w) for w in words) / len(words),
        avg_sentence_length=len(words) / sentence_count,
        unique_word_ratio=len({w.casefold() for w in words}) / len(words),
        pos_distribution=distribution,
        max_dependency_depth=parsed.max_depth,
        parser=parsed.parser,
    )


@dataclass
class MetricBackends:
    """Capability bundle for score_item; anything left None is reported
    as a gap rather than an error. The parse backend falls back to the
    built-in heuristic so complexity stays computable offline."""

    grammar: Optional[Any] = None
    logprobs: Optional[Callable[[str], Sequence[float]]] = None
    parse: Optional[Any] = None


@dataclass
class MetricReport:
    item_id: str
    scores: dict[str, Optional[float]]
    raw: dict[str, Any]
    features: LinguisticFeatures
    gaps: dict[str, str] = field(default_factory=dict)

    def to_record(self) -> dict:
        return {
            "item_id": self.item_id,
            "scores": self.scores,
            "raw": self.raw,
            "features": self.features.to_record(),
            "gaps": self.gaps,
        }


def item_text(item: Item) -> str:
    """The scored surface: stem plus option texts, answer key excluded."""
    return "\n".join([item.stem, *item.options])


def score_item(
    item: Item,
    backends: MetricBackends,
    d_max: int = D_MAX_DEFAULT,
) -> MetricReport:
    """Compute all four metrics for one item.

    Metrics whose backend is missing are recorded under gaps with a
    reason; backend failures are left to the caller, which is expected
    to record them per item and keep going.
    """
    text = item_text(item)
    words = tokenize_words(text)
    if not words:
        raise ValidationError(f"item {item.id!r} has no scorable words")

    scores: dict[str, Optional[float]] = {}
    raw: dict[str, Any] = {}
    gaps: dict[str, str] = {}

    reading = readability(text)
    scores["readability"] = reading.score
    raw["readability_raw"] = reading.raw

    if backends.grammar is None:
        scores["grammar"] = None
        gaps["grammar"] = "no grammar backend configured"
    else:
        errors = backends.grammar.check(text)
        density, score = grammar_score(len(errors), len(words))
        scores["grammar"] = score
        raw["grammar_errors"] = len(errors)
        raw["grammar_error_density"] = density

    if backends.logprobs is None:
        scores["fluency"] = None
        gaps["fluency"] = "no logprob backend configured"
    else:
        ppl = perplexity_from_logprobs(list(backends.logprobs(text)))
        scores["fluency"] = fluency_score(ppl)
        raw["perplexity"] = ppl

    parse_backend = backends.parse or HeuristicParseBackend()
    features = extract_features(text, parse_backend)
    scores["complexity"] = complexity_score(features.max_dependency_depth, d_max)
    raw["max_dependency_depth"] = features.max_dependency_depth

    return MetricReport(
        item_id=item.id, scores=scores, raw=raw, features=features, gaps=gaps
    )
