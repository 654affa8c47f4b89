"""Rule-based annotators for the eight constructs.

Every annotator is a pure function ``(Sentence, Lexicons) -> list`` of
annotations. Matching is case-insensitive and works on token indices;
verb forms are classified with the irregular table, suffix rules and the
known-verb lists, not a tagger.
"""

import enum
import re

from l1lens.schemas.annotation import (
    Annotation,
    ConstructKind,
    Correctness,
    SentenceRef,
    SpeechActType,
)
from l1lens.services.lexicons import Lexicons, Phrase
from l1lens.services.segment import TERMINATORS, Sentence

NUMERAL_RE = re.compile(r"^[+-]?\d+(?:\.\d+)?$")
WORD_RE = re.compile(r"^[^\W\d_]+(?:'[^\W\d_]+)*$")

CONTRACTIONS = {
    "won't": "will",
    "can't": "can",
    "shan't": "shall",
    "ain't": "is",
}
IRREGULAR_PLURALS = {
    "people": "person",
    "children": "child",
    "men": "man",
    "women": "woman",
    "feet": "foot",
    "teeth": "tooth",
    "mice": "mouse",
    "geese": "goose",
}
NUMBER_NEUTRAL = frozenset(
    {"sheep", "fish", "deer", "series", "species", "aircraft", "news"}
)
LEMMA_EXCEPTIONS = {"has": "have"}
SINGULAR_S_ENDINGS = ("ss", "us", "is", "ous")

SINGULAR_TRIGGERS = frozenset({"a", "an", "one"})
PLURAL_TRIGGERS = frozenset({"many", "few", "several", "these", "those"})
NUMERAL_EXCLUDED = frozenset({"one", "half"})
ARTICLE_SKIPS = frozenset({"few", "lot", "couple", "little", "bit", "number"})

SUBJECTS = frozenset({"i", "you", "he", "she", "it", "we", "they"})
OBJECT_AMBIGUOUS = frozenset({"it", "you"})
AUXILIARIES = frozenset(
    {"do", "does", "did", "am", "is", "are", "was", "were"}
)
PREPOSITIONS = frozenset(
    {
        "to",
        "of",
        "in",
        "on",
        "at",
        "by",
        "for",
        "with",
        "from",
        "about",
        "into",
        "onto",
        "over",
        "under",
        "after",
        "before",
        "during",
        "through",
        "between",
        "around",
        "near",
        "without",
        "like",
    }
)
ADVERBS = frozenset(
    {
        "always",
        "never",
        "often",
        "sometimes",
        "usually",
        "also",
        "just",
        "really",
        "still",
        "already",
        "only",
        "even",
        "actually",
        "maybe",
    }
)
TENSE_SKIPPED_MODALS = frozenset({"could", "would", "should", "might"})
REQUEST_OPENERS = frozenset({"could", "can", "would", "will"})
LEADING_SKIPS = frozenset(
    {"um", "uh", "ah", "er", "oh", "hmm", "well", "please", "so", "okay"}
)
WINDOW = 3


class VerbForm(enum.Enum):
    BASE = "base"
    THIRD_SINGULAR = "third_singular"
    PAST = "past"
    AM = "am"
    IS = "is"
    ARE = "are"
    WAS = "was"
    WERE = "were"


COPULAS = {
    "am": VerbForm.AM,
    "is": VerbForm.IS,
    "are": VerbForm.ARE,
    "was": VerbForm.WAS,
    "were": VerbForm.WERE,
}
CLITIC_COPULAS = {"m": VerbForm.AM, "s": VerbForm.IS, "re": VerbForm.ARE}
AGREEMENT = {
    "i": {VerbForm.BASE, VerbForm.PAST, VerbForm.AM, VerbForm.WAS},
    "you": {VerbForm.BASE, VerbForm.PAST, VerbForm.ARE, VerbForm.WERE},
    "we": {VerbForm.BASE, VerbForm.PAST, VerbForm.ARE, VerbForm.WERE},
    "they": {VerbForm.BASE, VerbForm.PAST, VerbForm.ARE, VerbForm.WERE},
    "he": {VerbForm.THIRD_SINGULAR, VerbForm.PAST, VerbForm.IS, VerbForm.WAS},
    "she": {VerbForm.THIRD_SINGULAR, VerbForm.PAST, VerbForm.IS, VerbForm.WAS},
    "it": {VerbForm.THIRD_SINGULAR, VerbForm.PAST, VerbForm.IS, VerbForm.WAS},
}


# Morphology


def normalize(word: str) -> str:
    """Lowercase form with contractions resolved to their verb."""
    word = word.lower().replace("’", "'")
    if word in CONTRACTIONS:
        return CONTRACTIONS[word]
    if word.endswith("n't") and len(word) > 3:  # noqa: PLR2004
        return word[:-3]
    return word


def clitic_head(word: str) -> str:
    """``he's`` -> ``he``; words without a clitic are returned unchanged."""
    word = word.lower().replace("’", "'")
    return word.split("'", 1)[0] if "'" in word else word


def _strip_s(word: str) -> list[str]:
    candidates = []
    if word.endswith("ies") and len(word) > 4:  # noqa: PLR2004
        candidates.append(word[:-3] + "y")
    if word.endswith("es"):
        candidates.append(word[:-2])
    if word.endswith("s") and not word.endswith("ss"):
        candidates.append(word[:-1])
    return candidates


def _strip_suffix(word: str, suffix: str) -> list[str]:
    if not word.endswith(suffix) or len(word) <= len(suffix) + 1:
        return []
    stem = word[: -len(suffix)]
    candidates = [stem, stem + "e"]
    if len(stem) > 2 and stem[-1] == stem[-2]:  # noqa: PLR2004
        candidates.append(stem[:-1])
    if suffix == "ed" and stem.endswith("i"):
        candidates.append(stem[:-1] + "y")
    return candidates


def verb_lemma(word: str, lex: Lexicons) -> str | None:
    """Base form of a known verb, or None when the word is not one."""
    word = normalize(word)
    word = LEMMA_EXCEPTIONS.get(word, word)
    bases = lex.verb_bases
    if word in bases:
        return word
    if word in lex.irregular_past:
        return lex.irregular_past[word]
    for candidates in (
        _strip_s(word),
        _strip_suffix(word, "ing"),
        _strip_suffix(word, "ed"),
    ):
        for candidate in candidates:
            if candidate in bases:
                return candidate
    return None


def noun_lemma(word: str) -> str:
    word = word.lower()
    if word in IRREGULAR_PLURALS:
        return IRREGULAR_PLURALS[word]
    if is_plural(word):
        if word.endswith("ies") and len(word) > 4:  # noqa: PLR2004
            return word[:-3] + "y"
        if word.endswith(("ses", "xes", "ches", "shes", "zes")):
            return word[:-2]
        return word[:-1]
    return word


def is_plural(word: str) -> bool:
    word = word.lower()
    if word in IRREGULAR_PLURALS:
        return True
    return (
        len(word) > 2  # noqa: PLR2004
        and word.endswith("s")
        and not word.endswith(SINGULAR_S_ENDINGS)
    )


def is_past_suffix(word: str) -> bool:
    return (
        len(word) >= 5  # noqa: PLR2004
        and word.endswith("ed")
        and not word.endswith("eed")
    )


def verb_form(word: str, lex: Lexicons) -> VerbForm | None:
    """Classify a finite verb form; None when the word is not a verb."""
    word = normalize(word)
    if word in COPULAS:
        return COPULAS[word]
    if word in {"has", "does"}:
        return VerbForm.THIRD_SINGULAR
    if (
        word in lex.function_words
        and word not in lex.verb_bases
        and word not in lex.irregular_past
    ):
        return None
    if word in lex.irregular_past:
        return VerbForm.PAST
    if word in lex.verb_bases:
        return VerbForm.BASE
    if is_past_suffix(word) and word not in lex.number_words:
        return VerbForm.PAST
    if any(stem in lex.verb_bases for stem in _strip_s(word)):
        return VerbForm.THIRD_SINGULAR
    return None


def is_noun_like(word: str, lex: Lexicons) -> bool:
    word = word.lower()
    return (
        len(word) > 1
        and WORD_RE.match(word) is not None
        and "'" not in word
        and word not in lex.function_words
        and word not in lex.determiners
        and word not in lex.number_words
        and word not in lex.quantifier_words
        and word not in lex.modal_words
        and word not in lex.irregular_past
        and not word.endswith("ly")
    )


def match_phrases(
    words: list[str], index: dict[str, tuple[Phrase, ...]]
) -> list[tuple[int, int, Phrase]]:
    """Left-to-right, non-overlapping, longest match wins."""
    matches = []
    position = 0
    while position < len(words):
        for phrase in index.get(words[position], ()):
            end = position + len(phrase)
            if tuple(words[position:end]) == phrase:
                matches.append((position, end, phrase))
                position = end
                break
        else:
            position += 1
    return matches


def _annotation(
    sentence: Sentence,
    kind: ConstructKind,
    spans: list[tuple[int, int]],
    rationale: str,
    correctness: Correctness = Correctness.UNJUDGED,
    label: SpeechActType | None = None,
) -> Annotation:
    spans = sorted(spans)
    return Annotation(
        kind=kind,
        sentence_ref=SentenceRef(
            dialogue_id=sentence.dialogue_id,
            turn_index=sentence.turn_index,
            sentence_index=sentence.sentence_index,
        ),
        spans=spans,
        tokens=[
            sentence.tokens[index].text
            for start, end in spans
            for index in range(start, end)
        ],
        sentence=sentence.raw,
        rationale=rationale,
        correctness=correctness,
        label=label,
    )


def _judge(agrees: bool) -> Correctness:  # noqa: FBT001
    return Correctness.NATIVE_LIKE if agrees else Correctness.NON_NATIVE_LIKE


# Annotators


def annotate_reference_words(
    sentence: Sentence, lex: Lexicons
) -> list[Annotation]:
    return [
        _annotation(
            sentence,
            ConstructKind.REFERENCE_WORD,
            [(index, index + 1)],
            "pronoun lexicon match",
        )
        for index, token in enumerate(sentence.tokens)
        if token.lowercase in lex.pronouns_referential
        or clitic_head(token.lowercase) in lex.pronouns_referential
    ]


def annotate_modal(sentence: Sentence, lex: Lexicons) -> list[Annotation]:
    words = [normalize(token.text) for token in sentence.tokens]
    return [
        _annotation(
            sentence,
            ConstructKind.MODAL_EXPRESSION,
            [(start, end)],
            "modal phrase match" if len(phrase) > 1 else "modal lexicon match",
        )
        for start, end, phrase in match_phrases(words, lex.modal_index)
    ]


def annotate_quantifiers_numerals(
    sentence: Sentence, lex: Lexicons
) -> list[Annotation]:
    words = sentence.lowered
    spans = {
        (start, end): (
            "number word" if phrase[0] in lex.number_words and len(phrase) == 1
            else "quantifier lexicon match"
        )
        for start, end, phrase in match_phrases(words, lex.quantifier_index)
    }
    covered = {i for start, end in spans for i in range(start, end)}
    for index, word in enumerate(words):
        if index not in covered and NUMERAL_RE.match(word):
            spans[(index, index + 1)] = "digit numeral"
    return [
        _annotation(sentence, ConstructKind.QUANTIFIER_NUMERAL, [span], why)
        for span, why in sorted(spans.items())
    ]


def _trigger_number(word: str, lex: Lexicons) -> bool | None:
    """True for a plural trigger, False for a singular one, else None."""
    if word in SINGULAR_TRIGGERS:
        return False
    if word in PLURAL_TRIGGERS:
        return True
    if NUMERAL_RE.match(word):
        return float(word) != 1
    if word in lex.number_words and word not in NUMERAL_EXCLUDED:
        return True
    return None


def _head_noun(
    words: list[str], start: int, lex: Lexicons, skip: frozenset[str]
) -> int | None:
    """Last noun-like token of the first contiguous run in the window."""
    head = None
    for index in range(start, min(start + WINDOW, len(words))):
        word = words[index]
        if is_noun_like(word, lex):
            head = index
        elif head is not None or not (
            word in skip or NUMERAL_RE.match(word)
        ):
            break
    return head


def annotate_number_agreement(
    sentence: Sentence, lex: Lexicons
) -> list[Annotation]:
    words = sentence.lowered
    annotations = []
    for index, word in enumerate(words):
        plural = _trigger_number(word, lex)
        if plural is None:
            continue
        following = words[index + 1] if index + 1 < len(words) else ""
        if word in {"a", "an"} and (
            following in ARTICLE_SKIPS or following in lex.number_words
        ):
            continue
        head = _head_noun(words, index + 1, lex, frozenset())
        if head is None:
            continue
        noun = words[head]
        agrees = noun in NUMBER_NEUTRAL or is_plural(noun) == plural
        annotations.append(
            _annotation(
                sentence,
                ConstructKind.NUMBER_AGREEMENT,
                [(index, index + 1), (head, head + 1)],
                "plural determiner or numeral before noun"
                if plural
                else "singular determiner before noun",
                _judge(agrees),
            )
        )
    return annotations


def _tense_candidate(
    words: list[str], index: int, lex: Lexicons
) -> VerbForm | str | None:
    word = normalize(words[index])
    if word in TENSE_SKIPPED_MODALS or word.endswith("ing"):
        return None
    if index > 0 and words[index - 1] == "to":
        return None
    if word in lex.modal_words:
        return "modal"
    return verb_form(word, lex)


def annotate_tense_agreement(
    sentence: Sentence, lex: Lexicons
) -> list[Annotation]:
    words = sentence.lowered
    matches = match_phrases(words, lex.temporal_index)
    if not matches:
        return []
    start, end, phrase = matches[0]
    past_trigger = phrase in lex.past_phrases
    best = None
    for index in range(len(words)):
        if start <= index < end:
            continue
        form = _tense_candidate(words, index, lex)
        if form is None:
            continue
        distance = start - index if index < start else index - end + 1
        if best is None or distance < best[0]:
            best = (distance, index, form)
    if best is None:
        return []
    _, verb, form = best
    past_verb = form in {VerbForm.PAST, VerbForm.WAS, VerbForm.WERE}
    return [
        _annotation(
            sentence,
            ConstructKind.TENSE_AGREEMENT,
            [(verb, verb + 1), (start, end)],
            "past temporal expression" if past_trigger
            else "non-past temporal expression",
            _judge(past_verb == past_trigger),
        )
    ]


def annotate_subject_verb_agreement(
    sentence: Sentence, lex: Lexicons
) -> list[Annotation]:
    words = sentence.lowered
    annotations = []
    for index, word in enumerate(words):
        head, apostrophe, clitic = word.replace("’", "'").partition("'")
        if apostrophe and head in SUBJECTS and clitic in CLITIC_COPULAS:
            annotations.append(
                _annotation(
                    sentence,
                    ConstructKind.SUBJECT_VERB_AGREEMENT,
                    [(index, index + 1)],
                    "pronoun subject with contracted copula",
                    _judge(CLITIC_COPULAS[clitic] in AGREEMENT[head]),
                )
            )
            continue
        if word not in SUBJECTS or index + 1 >= len(words):
            continue
        previous = normalize(words[index - 1]) if index > 0 else ""
        if previous in AUXILIARIES or previous in lex.modal_words:
            continue
        if word in OBJECT_AMBIGUOUS and (
            previous in PREPOSITIONS or verb_form(previous, lex) is not None
        ):
            continue
        verb = index + 1
        if words[verb] in ADVERBS and verb + 1 < len(words):
            verb += 1
        verb_word = normalize(words[verb])
        if verb_word in lex.modal_words:
            continue
        form = verb_form(verb_word, lex)
        if form is None:
            continue
        annotations.append(
            _annotation(
                sentence,
                ConstructKind.SUBJECT_VERB_AGREEMENT,
                [(index, index + 1), (verb, verb + 1)],
                "pronoun subject before finite verb",
                _judge(form in AGREEMENT[word]),
            )
        )
    return annotations


def annotate_noun_verb_collocation(
    sentence: Sentence, lex: Lexicons
) -> list[Annotation]:
    words = sentence.lowered
    annotations = []
    for index, word in enumerate(words):
        lemma = verb_lemma(word, lex)
        if lemma is None or lemma not in lex.collocation_verbs:
            continue
        if index + 1 < len(words) and words[index + 1] == "to":
            continue
        head = _head_noun(words, index + 1, lex, lex.determiners)
        if head is None:
            continue
        noun = noun_lemma(words[head])
        listed_with = lex.collocation_nouns.get(noun)
        if (lemma, noun) in lex.collocation_pairs:
            correctness = Correctness.NATIVE_LIKE
            rationale = "listed verb-noun collocation"
        elif listed_with:
            correctness = Correctness.NON_NATIVE_LIKE
            rationale = f"noun usually takes {'/'.join(sorted(listed_with))}"
        else:
            correctness = Correctness.UNJUDGED
            rationale = "light verb with object noun"
        annotations.append(
            _annotation(
                sentence,
                ConstructKind.NOUN_VERB_COLLOCATION,
                [(index, index + 1), (head, head + 1)],
                rationale,
                correctness,
            )
        )
    return annotations


def _content_words(sentence: Sentence) -> list[str]:
    return [
        normalize(token.text)
        for token in sentence.tokens
        if WORD_RE.match(token.text) or NUMERAL_RE.match(token.text)
    ]


def classify_speech_act(
    sentence: Sentence, lex: Lexicons
) -> tuple[SpeechActType, str]:
    words = _content_words(sentence)
    while words and words[0] in LEADING_SKIPS:
        words.pop(0)
    terminal = next(
        (t.text for t in reversed(sentence.tokens) if t.text in TERMINATORS),
        None,
    )
    asks = terminal == "?"
    if (
        asks
        and len(words) >= 2  # noqa: PLR2004
        and words[0] in REQUEST_OPENERS
        and words[1] == "you"
    ):
        return SpeechActType.REQUEST, "question opening with a modal and you"
    if asks:
        return SpeechActType.QUESTION, "ends with a question mark"
    first = next(
        (
            token.lowercase
            for token in sentence.tokens
            if WORD_RE.match(token.text)
            and token.lowercase not in LEADING_SKIPS
        ),
        None,
    )
    if first is not None and first in lex.imperative_verbs:
        return SpeechActType.COMMAND, "opens with an imperative verb"
    return SpeechActType.ASSERTION, "default assertion"


def annotate_speech_acts(
    sentence: Sentence, lex: Lexicons
) -> list[Annotation]:
    act, rationale = classify_speech_act(sentence, lex)
    return [
        _annotation(
            sentence,
            ConstructKind.SPEECH_ACT,
            [(0, len(sentence.tokens))],
            rationale,
            label=act,
        )
    ]


ANNOTATORS = {
    ConstructKind.NUMBER_AGREEMENT: annotate_number_agreement,
    ConstructKind.TENSE_AGREEMENT: annotate_tense_agreement,
    ConstructKind.SUBJECT_VERB_AGREEMENT: annotate_subject_verb_agreement,
    ConstructKind.MODAL_EXPRESSION: annotate_modal,
    ConstructKind.QUANTIFIER_NUMERAL: annotate_quantifiers_numerals,
    ConstructKind.NOUN_VERB_COLLOCATION: annotate_noun_verb_collocation,
    ConstructKind.REFERENCE_WORD: annotate_reference_words,
    ConstructKind.SPEECH_ACT: annotate_speech_acts,
}


def annotate_sentence(sentence: Sentence, lex: Lexicons) -> list[Annotation]:
    annotations = []
    for annotator in ANNOTATORS.values():
        annotations.extend(annotator(sentence, lex))
    return annotations
