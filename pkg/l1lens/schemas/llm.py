import enum

from ninja import Schema
from pydantic import ConfigDict, Field, field_validator, model_validator

from l1lens.schemas.corpus import Condition, LanguageCode

MIN_CARD_TURNS = 20


class Role(str, enum.Enum):
    SYSTEM = "system"
    USER = "user"
    ASSISTANT = "assistant"


class ChatMessage(Schema):
    model_config = ConfigDict(frozen=True)

    role: Role
    content: str

    @field_validator("content")
    @classmethod
    def check_content(cls, value: str) -> str:
        if not value.strip():
            raise ValueError("message content is empty")
        return value

    def as_wire(self) -> dict:
        return {"role": self.role.value, "content": self.content}


class GenerationConfig(Schema):
    model_config = ConfigDict(frozen=True, protected_namespaces=())

    model_name: str
    temperature: float = Field(default=0.0, ge=0.0, le=2.0)
    max_output_tokens: int = Field(default=2048, gt=0)
    retries: int = Field(default=3, ge=0)
    backoff_base_ms: int = Field(default=500, ge=0)
    endpoint_url: str = "https://api.openai.com/v1/chat/completions"
    api_key_env: str = "L1LENS_API_KEY"
    timeout_s: float = Field(default=120.0, gt=0)


class CardLine(Schema):
    model_config = ConfigDict(frozen=True)

    l1_line: str
    romanization: str | None = None
    english_gloss: str


class Trait(Schema):
    model_config = ConfigDict(frozen=True)

    name: str
    description: str
    examples: list[str] = []


class L1KnowledgeCard(Schema):
    model_config = ConfigDict(frozen=True)

    l1: LanguageCode
    scene: str | None = None
    example_dialogue: list[CardLine]
    trait_analysis: list[Trait]

    @model_validator(mode="after")
    def check_sections(self):
        if len(self.example_dialogue) < MIN_CARD_TURNS:
            raise ValueError(
                f"example dialogue needs at least {MIN_CARD_TURNS} turns, "
                f"got {len(self.example_dialogue)}"
            )
        if not self.trait_analysis:
            raise ValueError("trait analysis is empty")
        return self

    def trait_texts(self) -> list[str]:
        texts = []
        for trait in self.trait_analysis:
            texts.append(trait.name)
            texts.append(trait.description)
            texts.extend(trait.examples)
        return texts


class PromptBundle(Schema):
    model_config = ConfigDict(frozen=True)

    messages: list[ChatMessage]
    condition: Condition
    l1: LanguageCode | None = None
    topic: str | None = None
    prompt_version: str
    turns: int | None = None

    def wire_messages(self) -> list[dict]:
        return [message.as_wire() for message in self.messages]

    def text(self) -> str:
        return "\n\n".join(message.content for message in self.messages)


class RejectedRecord(Schema):
    """An annotation record the parser could not accept, with the reason."""

    index: int
    reason: str
    record: dict | list | str | int | float | bool | None = None


class GenerationFailure(Schema):
    dialogue_id: str
    condition: Condition
    topic: str
    error: str
