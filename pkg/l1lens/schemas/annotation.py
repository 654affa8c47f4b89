import enum

from ninja import Schema
from pydantic import ConfigDict, Field, field_validator


class ConstructKind(str, enum.Enum):
    NUMBER_AGREEMENT = "number_agreement"
    TENSE_AGREEMENT = "tense_agreement"
    SUBJECT_VERB_AGREEMENT = "subject_verb_agreement"
    MODAL_EXPRESSION = "modal_expression"
    QUANTIFIER_NUMERAL = "quantifier_numeral"
    NOUN_VERB_COLLOCATION = "noun_verb_collocation"
    REFERENCE_WORD = "reference_word"
    SPEECH_ACT = "speech_act"

    @property
    def display_name(self) -> str:
        return CONSTRUCT_NAMES[self]

    @property
    def order(self) -> int:
        return CONSTRUCT_ORDER[self]


CONSTRUCT_NAMES = {
    ConstructKind.NUMBER_AGREEMENT: "Number Agreement",
    ConstructKind.TENSE_AGREEMENT: "Tense Agreement",
    ConstructKind.SUBJECT_VERB_AGREEMENT: "Subject-Verb Agreement",
    ConstructKind.MODAL_EXPRESSION: "Modal Verbs and Expressions",
    ConstructKind.QUANTIFIER_NUMERAL: "Quantifiers and Numerals",
    ConstructKind.NOUN_VERB_COLLOCATION: "Noun-Verb Collocations",
    ConstructKind.REFERENCE_WORD: "Reference Word",
    ConstructKind.SPEECH_ACT: "Speech Acts",
}

CONSTRUCT_DEFINITIONS = {
    ConstructKind.NUMBER_AGREEMENT: (
        "Adjectives/determiners and nouns must agree in number."
    ),
    ConstructKind.TENSE_AGREEMENT: (
        "The verb tense (past, present, future) must align with temporal "
        "expressions."
    ),
    ConstructKind.SUBJECT_VERB_AGREEMENT: (
        "The verb form must agree with the subject's person and number."
    ),
    ConstructKind.MODAL_EXPRESSION: (
        "Modal verbs that indicate likelihood, ability, permission, or "
        "obligation."
    ),
    ConstructKind.QUANTIFIER_NUMERAL: (
        "Numerical expressions or those related to amounts, such as "
        "quantifiers."
    ),
    ConstructKind.NOUN_VERB_COLLOCATION: (
        "Common verb and noun collocations that enhance sentence fluency."
    ),
    ConstructKind.REFERENCE_WORD: (
        "Linguistic devices referring to entities mentioned earlier "
        "(anaphora) or later (cataphora)."
    ),
    ConstructKind.SPEECH_ACT: (
        "Utterances that serve special functions, such as assertions, "
        "questions, requests, or commands."
    ),
}

CONSTRUCT_ORDER = {kind: index for index, kind in enumerate(ConstructKind)}


class Correctness(str, enum.Enum):
    NATIVE_LIKE = "native_like"
    NON_NATIVE_LIKE = "non_native_like"
    UNJUDGED = "unjudged"


class SpeechActType(str, enum.Enum):
    REQUEST = "request"
    QUESTION = "question"
    COMMAND = "command"
    ASSERTION = "assertion"


class SentenceRef(Schema):
    model_config = ConfigDict(frozen=True)

    dialogue_id: str
    turn_index: int = Field(ge=0)
    sentence_index: int = Field(ge=0)


class Annotation(Schema):
    model_config = ConfigDict(frozen=True)

    kind: ConstructKind
    sentence_ref: SentenceRef
    spans: list[tuple[int, int]]
    tokens: list[str]
    sentence: str
    rationale: str
    correctness: Correctness = Correctness.UNJUDGED
    label: SpeechActType | None = None

    @field_validator("spans")
    @classmethod
    def check_spans(cls, value: list[tuple[int, int]]):
        if not 1 <= len(value) <= 2:  # noqa: PLR2004
            raise ValueError("an annotation has one or two token ranges")
        for start, end in value:
            if start < 0 or end <= start:
                raise ValueError(f"invalid token range ({start}, {end})")
        if len(value) == 2 and value[0][1] > value[1][0]:  # noqa: PLR2004
            raise ValueError("token ranges must be disjoint and ordered")
        return value

    @property
    def start(self) -> int:
        return self.spans[0][0]

    @property
    def key(self) -> str:
        """Stable reference used by the review workflow."""
        ref = self.sentence_ref
        ranges = ";".join(f"{start}:{end}" for start, end in self.spans)
        return (
            f"{ref.dialogue_id}|{ref.turn_index}|{ref.sentence_index}"
            f"|{self.kind.value}|{ranges}"
        )

    def sort_key(self) -> tuple:
        ref = self.sentence_ref
        return (
            ref.turn_index,
            ref.sentence_index,
            self.kind.order,
            self.start,
        )


class AnnotationRecord(Schema):
    """The five-field record exchanged with annotation models."""

    model_config = ConfigDict(populate_by_name=True)

    type: str
    annotation_sentence: str = Field(alias="annotation sentence")
    annotation_token: str = Field(alias="annotation token")
    rationale: str
    grammar_correctness: str = Field(alias="grammar correctness")

    def as_prompt_dict(self) -> dict:
        return self.model_dump(by_alias=True)
