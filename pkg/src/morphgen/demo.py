"""Built-in reference items and scripted mock backends.

One hand-checked reference item per question type, plus two variants
each, so the package can run its whole pipeline offline: the reference
items seed few-shot exemplar pools and judge conditioning, and the
scripted mock answers every strategy's prompts (including all three
turns of the multi-step strategy) with well-formed item text.

The difficulty metadata on these items is illustrative fixture data.
"""

from __future__ import annotations

import re

from .corpus import Corpus
from .items import Item, MorphCategory, QuestionType, SkillFocus
from .judge import RubricDimensions
from .parsing import serialize_item

#: Words accepted as correctly spelled for the QT8 structural check.
DEMO_WORDLIST = frozenset({"prepublication", "beautiful", "disagreement"})

_QT = QuestionType
_SK = SkillFocus
_MC = MorphCategory

# (id, qt, stem, options, answer_index, skill, morph, word_raw, task_raw,
#  target_word, target_morpheme)
_ROWS = [
    ("wc-qt01-a", _QT.QT1, "What is the prefix in the word miswrote?",
     ("mis", "misw", "ote"), 0, _SK.RECOGNITION, _MC.DERIVATIONAL, 2.0, 1.0,
     "miswrote", "mis"),
    ("wc-qt01-b", _QT.QT1, "What is the prefix in the word unhappy?",
     ("un", "unh", "ppy"), 0, _SK.RECOGNITION, _MC.DERIVATIONAL, 1.0, 1.0,
     "unhappy", "un"),
    ("wc-qt01-c", _QT.QT1, "What is the prefix in the word preview?",
     ("pre", "prev", "iew"), 0, _SK.RECOGNITION, _MC.DERIVATIONAL, 3.0, 1.5,
     "preview", "pre"),
    ("wc-qt02-a", _QT.QT2, "What is the suffix in the word governmental?",
     ("al", "mental", "government"), 0, _SK.RECOGNITION, _MC.DERIVATIONAL, 3.5, 1.0,
     "governmental", "al"),
    ("wc-qt02-b", _QT.QT2, "What is the suffix in the word kindness?",
     ("kind", "ness", "dness"), 1, _SK.RECOGNITION, _MC.DERIVATIONAL, 1.5, 1.0,
     "kindness", "ness"),
    ("wc-qt02-c", _QT.QT2, "What is the suffix in the word slowly?",
     ("ly", "slow", "owl"), 0, _SK.RECOGNITION, _MC.DERIVATIONAL, 1.0, 1.5,
     "slowly", "ly"),
    ("wc-qt03-a", _QT.QT3, "What is the root word in subspecialty?",
     ("special", "specialty", "species"), 0, _SK.RECOGNITION, _MC.ADDRESS_WORD_PARTS,
     4.0, 2.0, "subspecialty", "special"),
    ("wc-qt03-b", _QT.QT3, "What is the root word in unfriendly?",
     ("friend", "friendly", "fiend"), 0, _SK.RECOGNITION, _MC.ADDRESS_WORD_PARTS,
     2.0, 2.0, "unfriendly", "friend"),
    ("wc-qt03-c", _QT.QT3, "What is the root word in rebuilding?",
     ("build", "builds", "built"), 0, _SK.RECOGNITION, _MC.ADDRESS_WORD_PARTS,
     2.5, 2.5, "rebuilding", "build"),
    ("wc-qt04-a", _QT.QT4,
     "Find the word that does NOT have the same prefix as the other two words.",
     ("unique", "unexcitable", "unkindness"), 0, _SK.PROBLEM_SOLVING,
     _MC.DERIVATIONAL, 3.0, 3.0, None, "un"),
    ("wc-qt04-b", _QT.QT4,
     "Find the word that does NOT have the same prefix as the other two words.",
     ("uncle", "unload", "unpack"), 0, _SK.PROBLEM_SOLVING, _MC.DERIVATIONAL,
     2.0, 3.0, None, "un"),
    ("wc-qt04-c", _QT.QT4,
     "Find the word that does NOT have the same prefix as the other two words.",
     ("ripe", "replay", "rewrite"), 0, _SK.PROBLEM_SOLVING, _MC.DERIVATIONAL,
     2.5, 3.5, None, "re"),
    ("wc-qt05-a", _QT.QT5,
     "Find the word that does NOT have the same suffix as the other two words.",
     ("uniquely", "ugly", "usefully"), 1, _SK.PROBLEM_SOLVING, _MC.DERIVATIONAL,
     3.0, 3.0, None, "ly"),
    ("wc-qt05-b", _QT.QT5,
     "Find the word that does NOT have the same suffix as the other two words.",
     ("quickly", "jelly", "deeply"), 1, _SK.PROBLEM_SOLVING, _MC.DERIVATIONAL,
     1.5, 3.0, None, "ly"),
    ("wc-qt05-c", _QT.QT5,
     "Find the word that does NOT have the same suffix as the other two words.",
     ("teacher", "summer", "painter"), 1, _SK.PROBLEM_SOLVING, _MC.DERIVATIONAL,
     2.0, 3.5, None, "er"),
    ("wc-qt06-a", _QT.QT6,
     "Change the word undivided to mean “smaller parts of a whole.”",
     ("disdivide", "antidivision", "subdivisions"), 2, _SK.PROBLEM_SOLVING,
     _MC.DERIVATIONAL, 4.0, 4.0, "undivided", "sub"),
    ("wc-qt06-b", _QT.QT6,
     "Change the word helpful to mean “without any help.”",
     ("helpfully", "helpless", "helper"), 1, _SK.PROBLEM_SOLVING,
     _MC.DERIVATIONAL, 2.0, 4.0, "helpful", "less"),
    ("wc-qt06-c", _QT.QT6,
     "Change the word connect to mean “connect again.”",
     ("reconnect", "disconnect", "connector"), 0, _SK.PROBLEM_SOLVING,
     _MC.DERIVATIONAL, 2.5, 3.5, "connect", "re"),
    ("wc-qt07-a", _QT.QT7, "What is the meaning of the word nonperishable?",
     ("fresh; cannot be stored", "made to stay good while being stored",
      "afraid of going bad"), 1, _SK.COMPREHENSION, _MC.DEFINE, 4.5, 3.0,
     "nonperishable", "non"),
    ("wc-qt07-b", _QT.QT7, "What is the meaning of the word unbreakable?",
     ("easily broken", "not able to be broken", "broken before"), 1,
     _SK.COMPREHENSION, _MC.DEFINE, 2.0, 2.0, "unbreakable", "un"),
    ("wc-qt07-c", _QT.QT7, "What is the meaning of the word rewritable?",
     ("able to be written again", "written long ago", "never written"), 0,
     _SK.COMPREHENSION, _MC.DEFINE, 3.0, 2.5, "rewritable", "re"),
    ("wc-qt08-a", _QT.QT8, "Select the correctly spelled word.",
     ("prepublicashun", "prepublishation", "prepublication"), 2,
     _SK.PROBLEM_SOLVING, _MC.INFLECTIONAL, 5.0, 3.0, None, "ation"),
    ("wc-qt08-b", _QT.QT8, "Select the correctly spelled word.",
     ("beutiful", "beautiful", "beautifull"), 1, _SK.PROBLEM_SOLVING,
     _MC.INFLECTIONAL, 2.0, 2.0, None, "ful"),
    ("wc-qt08-c", _QT.QT8, "Select the correctly spelled word.",
     ("disagreement", "dissagreement", "disagreemant"), 0, _SK.PROBLEM_SOLVING,
     _MC.INFLECTIONAL, 3.0, 2.5, None, "ment"),
    ("wc-qt09-a", _QT.QT9,
     "Break the word rehammering into parts based on prefixes, roots, and suffixes.",
     ("re/hammering", "re/hammer/ing", "re/ham/mering"), 1, _SK.RECOGNITION,
     _MC.INFLECTIONAL_AND_DERIVATIONAL, 3.5, 2.0, "rehammering", None),
    ("wc-qt09-b", _QT.QT9,
     "Break the word unkindness into parts based on prefixes, roots, and suffixes.",
     ("un/kind/ness", "unk/ind/ness", "un/kindn/ess"), 0, _SK.RECOGNITION,
     _MC.INFLECTIONAL_AND_DERIVATIONAL, 1.5, 2.0, "unkindness", None),
    ("wc-qt09-c", _QT.QT9,
     "Break the word misreading into parts based on prefixes, roots, and suffixes.",
     ("mis/read/ing", "misr/ead/ing", "mi/sread/ing"), 0, _SK.RECOGNITION,
     _MC.INFLECTIONAL_AND_DERIVATIONAL, 2.0, 2.5, "misreading", None),
    ("wc-qt10-a", _QT.QT10, "What is the meaning of the prefix in transplant?",
     ("within", "movement between", "different from"), 1, _SK.COMPREHENSION,
     _MC.DEFINE, 4.0, 2.0, "transplant", "trans"),
    ("wc-qt10-b", _QT.QT10, "What is the meaning of the prefix in submarine?",
     ("under", "above", "across"), 0, _SK.COMPREHENSION, _MC.DEFINE, 2.5, 2.0,
     "submarine", "sub"),
    ("wc-qt10-c", _QT.QT10, "What is the meaning of the prefix in preheat?",
     ("after", "before", "against"), 1, _SK.COMPREHENSION, _MC.DEFINE, 1.5, 1.5,
     "preheat", "pre"),
    ("wc-qt11-a", _QT.QT11, "What is the meaning of the root word in overtraining?",
     ("to learn through practice", "a vehicle that uses railroads",
      "to injure by too much work"), 0, _SK.COMPREHENSION, _MC.DEFINE, 3.0, 3.0,
     "overtraining", "train"),
    ("wc-qt11-b", _QT.QT11, "What is the meaning of the root word in unhappiness?",
     ("feeling sad", "feeling glad", "feeling tired"), 1, _SK.COMPREHENSION,
     _MC.DEFINE, 1.5, 2.5, "unhappiness", "happy"),
    ("wc-qt11-c", _QT.QT11,
     "What is the meaning of the root word in transportation?",
     ("to carry", "to stop", "to build"), 0, _SK.COMPREHENSION, _MC.DEFINE,
     3.5, 3.0, "transportation", "port"),
    ("wc-qt12-a", _QT.QT12, "What is the meaning of the suffix in expressive?",
     ("person who", "relating to", "the action of"), 1, _SK.COMPREHENSION,
     _MC.SYNTACTIC, 3.5, 3.0, "expressive", "ive"),
    ("wc-qt12-b", _QT.QT12, "What is the meaning of the suffix in teacher?",
     ("person who does", "state of being", "full of"), 0, _SK.COMPREHENSION,
     _MC.SYNTACTIC, 1.0, 2.0, "teacher", "er"),
    ("wc-qt12-c", _QT.QT12, "What is the meaning of the suffix in kindness?",
     ("in the manner of", "state of being", "able to be"), 1, _SK.COMPREHENSION,
     _MC.SYNTACTIC, 1.5, 2.5, "kindness", "ness"),
    ("wc-qt13-a", _QT.QT13,
     "If district refers to an area, what does subdistricts mean?",
     ("larger parts of an area", "smaller parts of an area",
      "a few different areas"), 1, _SK.COMPREHENSION, _MC.DEFINE, 4.0, 4.0,
     "subdistricts", "sub"),
    ("wc-qt13-b", _QT.QT13, "If port means to carry, what does transport mean?",
     ("to carry across", "to stop carrying", "to carry badly"), 0,
     _SK.COMPREHENSION, _MC.DEFINE, 3.0, 3.5, "transport", "trans"),
    ("wc-qt13-c", _QT.QT13, "If dict means to say, what does predict mean?",
     ("to say before", "to say loudly", "to say again"), 0, _SK.COMPREHENSION,
     _MC.DEFINE, 3.5, 4.0, "predict", "pre"),
]


def _build(row) -> Item:
    (item_id, qt, stem, options, answer, skill, morph, word_raw, task_raw,
     target_word, target_morpheme) = row
    return Item(
        id=item_id,
        stem=stem,
        options=options,
        answer_index=answer,
        qt=qt,
        skill=skill,
        morph=morph,
        word_diff_raw=word_raw,
        task_diff_raw=task_raw,
        target_word=target_word,
        target_morpheme=target_morpheme,
    )


def reference_items() -> list[Item]:
    """The thirteen hand-checked items, one per question type."""
    return [_build(row) for row in _ROWS if row[0].endswith("-a")]


def demo_corpus() -> Corpus:
    """Reference items plus two variants per question type (39 items)."""
    return Corpus([_build(row) for row in _ROWS])


def reference_item(qt: QuestionType) -> Item:
    for row in _ROWS:
        if row[1] is qt and row[0].endswith("-a"):
            return _build(row)
    raise KeyError(qt)


def reference_labels() -> dict[str, RubricDimensions]:
    """Fixture expert verdicts for the reference items, used to condition
    the demo judge. All dimensions pass; these are the good examples."""
    ones = dict.fromkeys(
        ("clarity", "answer_accuracy", "distractor_quality",
         "word_difficulty_fit", "task_difficulty_fit"), 1
    )
    return {
        item.id: RubricDimensions(**ones) for item in reference_items()
    }


# ---------------------------------------------------------------------------
# Scripted mock rules


def _word_for(qt: QuestionType) -> str:
    item = reference_item(qt)
    return item.target_word or item.answer_text.split()[0]


def generation_rules() -> list[tuple[str, str]]:
    """Mock rules answering every generation prompt.

    Multi-step turns are matched by their step marker (which names the
    question type); single-turn prompts fall through to the per-type
    rule. Order matters: step rules come first. Patterns are literal so
    matching stays cheap on long prompts.
    """
    rules: list[tuple[str, str]] = []
    for qt in QuestionType:
        item_text = serialize_item(reference_item(qt))
        rules.append(
            (re.escape(f"step 1 of 3.\n\nQuestion type {qt.value}:"),
             f"The word fits the type and targets.\nChosen word: {_word_for(qt)}")
        )
        rules.append(
            (re.escape(f"step 2 of 3 for the same {qt.value} item"), item_text)
        )
        rules.append(
            (re.escape(f"step 3 of 3 for the same {qt.value} item"), item_text)
        )
    for qt in QuestionType:
        rules.append(
            (re.escape(f"Question type {qt.value}:"),
             serialize_item(reference_item(qt)))
        )
    return rules


def judge_rules() -> list[tuple[str, str]]:
    """Mock rules for the judge: fixed flags per question type, varied
    enough that aggregates are not all identical."""
    rules: list[tuple[str, str]] = []
    for n, qt in enumerate(QuestionType, start=1):
        flags = {
            "clarity": 1,
            "answer_accuracy": 1 if n % 4 else 0,
            "distractor_quality": n % 2,
            "word_difficulty_fit": 1 if n % 3 else 0,
            "task_difficulty_fit": (n + 1) % 2,
        }
        reply = "\n".join(f"{k}: {v}" for k, v in flags.items())
        rules.append((re.escape(f"question type {qt.value}:"), reply))
    return rules
