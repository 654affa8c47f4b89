import enum
import math

from ninja import Schema
from pydantic import ConfigDict, Field, model_validator

from l1lens.schemas.annotation import ConstructKind
from l1lens.schemas.corpus import Condition, CorpusSlice, LanguageCode

DEFAULT_FLOOR = 1e-12


class ConstructRate(Schema):
    model_config = ConfigDict(frozen=True)

    dialogue_id: str
    kind: ConstructKind
    count: int = Field(ge=0)
    tokens: int = Field(gt=0)
    rate: float

    @model_validator(mode="after")
    def check_rate(self):
        expected = 100 * self.count / self.tokens
        if not math.isclose(self.rate, expected, rel_tol=1e-12):
            raise ValueError("rate must equal 100 * count / tokens")
        return self


class RateSample(Schema):
    model_config = ConfigDict(frozen=True)

    kind: ConstructKind
    slice: CorpusSlice
    values: list[float]
    truncated: int = 0

    def __len__(self) -> int:
        return len(self.values)


class DensityModel(Schema):
    model_config = ConfigDict(frozen=True)

    kernel: str = "gaussian"
    bandwidth: float = Field(gt=0)
    support_points: list[float]
    floor: float = Field(default=DEFAULT_FLOOR, gt=0)

    @model_validator(mode="after")
    def check_support(self):
        if self.kernel != "gaussian":
            raise ValueError("only the gaussian kernel is supported")
        if not self.support_points:
            raise ValueError("a density needs at least one support point")
        return self


class CellStatus(str, enum.Enum):
    OK = "ok"
    INSUFFICIENT_DATA = "insufficient_data"


class DivergenceResult(Schema):
    model_config = ConfigDict(frozen=True, protected_namespaces=())

    l1: LanguageCode
    kind: ConstructKind
    condition: Condition
    model_name: str | None = None
    status: CellStatus = CellStatus.OK
    d: float | None = None
    n_human: int
    n_model: int
    bandwidth_human: float | None = None
    bandwidth_model: float | None = None

    @model_validator(mode="after")
    def check_status(self):
        if self.status == CellStatus.OK:
            if self.d is None:
                raise ValueError("an ok cell carries a divergence value")
            if self.n_human < 2 or self.n_model < 2:  # noqa: PLR2004
                raise ValueError("an ok cell needs two or more samples each")
        elif self.d is not None:
            raise ValueError("an insufficient-data cell carries no value")
        return self

    @property
    def is_ok(self) -> bool:
        return self.status == CellStatus.OK
