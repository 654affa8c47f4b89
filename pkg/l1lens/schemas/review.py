import enum

from ninja import Schema
from pydantic import ConfigDict, Field, model_validator

from l1lens.schemas.annotation import ConstructKind


class Verdict(str, enum.Enum):
    CORRECT = "correct"
    INCORRECT = "incorrect"


class ReviewItem(Schema):
    model_config = ConfigDict(frozen=True)

    annotation_ref: str
    kind: ConstructKind
    sentence: str
    tokens: str
    rationale: str
    correctness: str


class ReviewBatch(Schema):
    model_config = ConfigDict(frozen=True)

    batch_id: str
    sampled: list[ReviewItem]
    fraction: float = Field(gt=0, le=1)
    seed: int
    population_size: int = Field(gt=0)
    stratified: bool = True

    @model_validator(mode="after")
    def check_sample(self):
        refs = [item.annotation_ref for item in self.sampled]
        if len(set(refs)) != len(refs):
            raise ValueError("sampled references must be unique")
        if len(refs) != round(self.fraction * self.population_size):
            raise ValueError("sample size must equal round(fraction * N)")
        return self

    @property
    def refs(self) -> list[str]:
        return [item.annotation_ref for item in self.sampled]


class Judgment(Schema):
    model_config = ConfigDict(frozen=True)

    annotation_ref: str
    verdict: Verdict
    reviewer: str


class ConstructAccuracy(Schema):
    kind: ConstructKind
    correct: int
    total: int

    @property
    def accuracy(self) -> float:
        return self.correct / self.total if self.total else 0.0


class AccuracyReport(Schema):
    correct: int
    total: int
    per_construct: list[ConstructAccuracy]

    @property
    def accuracy(self) -> float:
        return self.correct / self.total if self.total else 0.0

    @property
    def percent(self) -> str:
        return f"{100 * self.accuracy:.1f}%"


class AccuracyDelta(Schema):
    kind: ConstructKind
    before: float | None
    after: float | None

    @property
    def delta(self) -> float | None:
        if self.before is None or self.after is None:
            return None
        return self.after - self.before


class StoreAgreement(Schema):
    kind: ConstructKind
    both: int
    only_first: int
    only_second: int
