from fractions import Fraction
from typing import Dict, Optional, Tuple, Union
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, model_validator

Number = Union[Fraction, int, float]


class EvalMode(str, Enum):
    FLOAT = "float"
    RATIONAL = "rational"


class MomentMethod(str, Enum):
    PARTITION = "partition"
    MELLIN = "mellin"
    INTEGER_CASE = "integer-case"
    RECURRENCE = "recurrence"
    AUTO = "auto"


class ZetaMethod(str, Enum):
    RECURSION = "recursion"
    ZERO_SUM = "zero_sum"
    BOTH = "both"


class Beta4Representation(str, Enum):
    THREE_F_TWO = "three_f_two"
    FOUR_F_THREE = "four_f_three"


class DensityKind(str, Enum):
    FINITE_BETA2 = "finite_beta2"
    HARD_EDGE = "hard_edge"
    MARCHENKO_PASTUR = "marchenko_pastur"


class OutputFormat(str, Enum):
    TEXT = "text"
    JSON = "json"
    CSV = "csv"


class CheckStatus(str, Enum):
    PASSED = "passed"
    FAILED = "failed"
    ERROR = "error"


def is_exact(value) -> bool:
    return isinstance(value, (int, Fraction)) and not isinstance(value, bool)


class MomentQuery(BaseModel):
    """One moment request: integer order k or complex Mellin variable s"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    k: Optional[int] = None
    s: Optional[complex] = None
    beta: Number = 2
    alpha: Optional[Number] = None
    nu: Optional[Number] = None
    n_size: Optional[int] = None
    mode: EvalMode = EvalMode.FLOAT

    @model_validator(mode="after")
    def _check_invariants(self) -> "MomentQuery":
        if (self.k is None) == (self.s is None):
            raise ValueError("exactly one of k or s must be given")
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if self.n_size is not None and self.n_size < 1:
            raise ValueError("N must be a positive integer")

        if self.nu is not None:
            if self.nu <= -1:
                raise ValueError("nu must exceed -1")
        elif self.alpha is None:
            raise ValueError("alpha (or nu in low-temperature mode) is required")
        elif self.k is not None:
            if self.k < 1:
                raise ValueError("k must be a positive integer")
            if not self.alpha > self.k - 1:
                raise ValueError(f"k < alpha+1 violated: k={self.k}, alpha={self.alpha}")
        else:
            if not self.alpha > Fraction(-1, 2):
                raise ValueError("alpha must exceed -1/2 for Mellin queries")
            if not (0.5 < self.s.real < float(self.alpha) + 1):
                raise ValueError(f"s={self.s} outside the strip 1/2 < Re(s) < alpha+1")

        if self.mode == EvalMode.RATIONAL:
            if self.k is None:
                raise ValueError("rational mode requires an integer order")
            values = [self.beta, self.alpha if self.nu is None else self.nu]
            if not all(is_exact(v) for v in values):
                raise ValueError("rational mode requires rational beta and alpha")
        return self

    @property
    def limiting(self) -> bool:
        return self.n_size is None


class EnsembleConfig(BaseModel):
    """Monte Carlo run parameters for the bidiagonal beta-Laguerre model"""

    model_config = ConfigDict(frozen=True)

    n_size: int = Field(ge=1)
    beta: float = Field(gt=0)
    alpha: float = Field(gt=-1)
    samples: int = Field(ge=1)
    seed: int = Field(default=0, ge=0, lt=2**64)

    @property
    def tilde_a(self) -> float:
        return self.alpha + 0.5 * self.beta * (self.n_size - 1) + 1

    @model_validator(mode="after")
    def _check_chi_parameters(self) -> "EnsembleConfig":
        if not self.tilde_a > 0.5 * self.beta * (self.n_size - 1):
            raise ValueError("chi parameters 2*tilde_a - beta*j must be positive")
        return self


class MomentEstimate(BaseModel):
    mean: float
    stderr: float = Field(ge=0)
    samples: int
    seed: int
    k: int
    clamped: int = 0


class DensitySpec(BaseModel):
    """Which density a quadrature or point evaluation refers to"""

    kind: DensityKind
    n_size: Optional[int] = None
    alpha: Optional[float] = None
    beta_class: Optional[int] = None
    c: Optional[float] = None

    @model_validator(mode="after")
    def _check_fields(self) -> "DensitySpec":
        if self.kind == DensityKind.FINITE_BETA2:
            if self.n_size is None or self.n_size < 1 or self.alpha is None or self.alpha <= -1:
                raise ValueError("finite_beta2 needs N >= 1 and alpha > -1")
        elif self.kind == DensityKind.HARD_EDGE:
            if self.beta_class not in (1, 2, 4) or self.alpha is None or self.alpha <= -0.5:
                raise ValueError("hard_edge needs beta_class in {1,2,4} and alpha > -1/2")
        elif self.c is None or not 0 < self.c <= 1:
            raise ValueError("marchenko_pastur needs 0 < c <= 1")
        return self

    @property
    def c_minus(self) -> float:
        return (1 - self.c ** 0.5) ** 2

    @property
    def c_plus(self) -> float:
        return (1 + self.c ** 0.5) ** 2

    @property
    def domain(self) -> Tuple[float, float]:
        if self.kind == DensityKind.MARCHENKO_PASTUR:
            return (self.c_minus, self.c_plus)
        return (0.0, float("inf"))

    @classmethod
    def finite_beta2(cls, n_size: int, alpha: float) -> "DensitySpec":
        return cls(kind=DensityKind.FINITE_BETA2, n_size=n_size, alpha=alpha)

    @classmethod
    def hard_edge(cls, beta_class: int, alpha: float) -> "DensitySpec":
        return cls(kind=DensityKind.HARD_EDGE, beta_class=beta_class, alpha=alpha)

    @classmethod
    def marchenko_pastur(cls, c: float) -> "DensitySpec":
        return cls(kind=DensityKind.MARCHENKO_PASTUR, c=c)


class QuadratureResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    value: complex
    abserr: float


class OutputRecord(BaseModel):
    """One machine-readable result line"""

    command: str
    query: Dict[str, str] = {}
    results: Dict[str, str] = {}
    method: str
    error_bound: Optional[str] = None
    stderr: Optional[str] = None
    elapsed_ms: float = 0.0
    seed: Optional[int] = None
    exact: bool = False


class CheckResult(BaseModel):
    suite: str
    name: str
    status: CheckStatus
    achieved: Optional[float] = None
    required: Optional[float] = None
    details: str = ""
    execution_time_ms: int = 0

