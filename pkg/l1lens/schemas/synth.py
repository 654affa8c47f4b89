import enum

from ninja import Schema
from pydantic import ConfigDict, Field, model_validator


class Distribution(str, enum.Enum):
    NORMAL = "normal"
    LOGNORMAL = "lognormal"
    MIXTURE = "mixture"
    CONSTANT = "constant"


class SyntheticSpec(Schema):
    """Parameters of a planted rate distribution.

    ``mu``/``sigma`` describe the (first) component; a mixture adds
    ``mu2``/``sigma2`` and draws from the first component with
    probability ``weight``. A constant spec always yields ``mu``.
    """

    model_config = ConfigDict(frozen=True)

    distribution: Distribution = Distribution.NORMAL
    mu: float
    sigma: float = 1.0
    mu2: float | None = None
    sigma2: float | None = None
    weight: float = Field(default=0.5, ge=0, le=1)
    n: int = Field(default=500, ge=2)
    seed: int

    @model_validator(mode="after")
    def check_parameters(self):
        if self.distribution == Distribution.CONSTANT:
            return self
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.distribution == Distribution.MIXTURE:
            if self.mu2 is None or self.sigma2 is None:
                raise ValueError("a mixture needs mu2 and sigma2")
            if self.sigma2 <= 0:
                raise ValueError("sigma2 must be positive")
        return self


class OracleCase(Schema):
    case: str
    estimate: float
    expected: float
    tolerance: float
    passed: bool
    detail: str = ""
