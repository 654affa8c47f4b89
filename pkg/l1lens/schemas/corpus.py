import enum

from ninja import Schema
from pydantic import ConfigDict, field_validator, model_validator


class LanguageCode(str, enum.Enum):
    KOREAN = "kor"
    MANDARIN = "cmn"
    JAPANESE = "jpn"
    CANTONESE = "yue"
    THAI = "tha"
    MALAY = "msa"
    URDU = "urd"
    ENGLISH = "eng"

    @property
    def display_name(self) -> str:
        return LANGUAGE_NAMES[self]


LANGUAGE_NAMES = {
    LanguageCode.KOREAN: "Korean",
    LanguageCode.MANDARIN: "Mandarin",
    LanguageCode.JAPANESE: "Japanese",
    LanguageCode.CANTONESE: "Cantonese",
    LanguageCode.THAI: "Thai",
    LanguageCode.MALAY: "Malay",
    LanguageCode.URDU: "Urdu",
    LanguageCode.ENGLISH: "English",
}


class Origin(str, enum.Enum):
    HUMAN = "human"
    MODEL = "model"


class Condition(str, enum.Enum):
    BI = "bi"
    MONO = "mono"
    NOT_APPLICABLE = "not_applicable"


class Speaker(str, enum.Enum):
    NATIVE_SPEAKER = "native_speaker"
    L2_SPEAKER = "l2_speaker"


class SourceTag(Schema):
    model_config = ConfigDict(frozen=True, protected_namespaces=())

    origin: Origin
    model_name: str | None = None

    @model_validator(mode="after")
    def check_model_name(self):
        if self.origin == Origin.MODEL and not self.model_name:
            raise ValueError("model_name is required for generated dialogues")
        if self.origin == Origin.HUMAN and self.model_name is not None:
            raise ValueError("human dialogues carry no model_name")
        return self

    @classmethod
    def human(cls) -> "SourceTag":
        return cls(origin=Origin.HUMAN, model_name=None)

    @classmethod
    def model(cls, model_name: str) -> "SourceTag":
        return cls(origin=Origin.MODEL, model_name=model_name)


class Turn(Schema):
    model_config = ConfigDict(frozen=True)

    speaker: Speaker
    text: str

    @field_validator("text")
    @classmethod
    def check_text(cls, value: str) -> str:
        if not value.strip():
            raise ValueError("turn text is empty")
        return value


class Dialogue(Schema):
    model_config = ConfigDict(frozen=True)

    id: str
    l1: LanguageCode
    source: SourceTag
    condition: Condition
    topic: str | None = None
    turns: list[Turn]

    @model_validator(mode="after")
    def check_consistency(self):
        if not self.id:
            raise ValueError("dialogue id is empty")
        if not self.turns:
            raise ValueError(f"dialogue {self.id} has no turns")
        human = self.source.origin == Origin.HUMAN
        if human and self.condition != Condition.NOT_APPLICABLE:
            raise ValueError("human dialogues carry condition not_applicable")
        if not human:
            if self.condition == Condition.NOT_APPLICABLE:
                raise ValueError("generated dialogues carry bi or mono")
            if len(self.turns) < 2:  # noqa: PLR2004
                raise ValueError("generated dialogues need at least 2 turns")
        return self

    @property
    def speaker_key(self) -> str:
        """Participant identity: the dialogue id up to the first '-'."""
        return self.id.split("-", 1)[0]


class CorpusStats(Schema):
    dialogues: int
    tokens: int
    participants: int | None


class Corpus(Schema):
    model_config = ConfigDict(frozen=True)

    dialogues: list[Dialogue] = []

    @field_validator("dialogues")
    @classmethod
    def check_unique_ids(cls, value: list[Dialogue]) -> list[Dialogue]:
        seen = set()
        for dialogue in value:
            if dialogue.id in seen:
                raise ValueError(f"duplicate dialogue id {dialogue.id}")
            seen.add(dialogue.id)
        return value

    def __len__(self) -> int:
        return len(self.dialogues)


class CorpusSlice(Schema):
    """Conjunction of optional filters over dialogue metadata."""

    model_config = ConfigDict(frozen=True, protected_namespaces=())

    l1: LanguageCode | None = None
    origin: Origin | None = None
    model_name: str | None = None
    condition: Condition | None = None

    def matches(self, dialogue: Dialogue) -> bool:
        if self.l1 is not None and dialogue.l1 != self.l1:
            return False
        if self.origin is not None and dialogue.source.origin != self.origin:
            return False
        if (
            self.model_name is not None
            and dialogue.source.model_name != self.model_name
        ):
            return False
        return self.condition is None or dialogue.condition == self.condition

    def label(self) -> str:
        parts = [
            self.l1.value if self.l1 else "*",
            self.model_name or (self.origin.value if self.origin else "*"),
            self.condition.value if self.condition else "*",
        ]
        return "/".join(parts)


class ManifestRow(Schema):
    filename: str
    l1: LanguageCode
    speaker_id: str
    topic: str | None = None
