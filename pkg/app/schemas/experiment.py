from enum import Enum

from pydantic import BaseModel, Field, field_validator, model_validator

from app.core.config import settings


class ExperimentKind(str, Enum):
    PLANTED_SWEEP = "planted-sweep"
    LATENT_RECOVERY = "latent-recovery"
    NOISY_RECOVERY = "noisy-recovery"


class Method(str, Enum):
    ADDS3_AL = "adds3-al"
    ADDS4_AL = "adds4-al"
    COSINE_AL = "cosine-al"
    BRUTE_FORCE = "brute-force"


PLANTED_METHODS = {Method.ADDS3_AL, Method.ADDS4_AL, Method.COSINE_AL}
RECOVERY_METHODS = {Method.ADDS3_AL, Method.BRUTE_FORCE}


class ExperimentConfig(BaseModel):
    """One harness run; list fields accept comma-separated strings from config files."""

    experiment: ExperimentKind = ExperimentKind.PLANTED_SWEEP
    methods: list[Method] = Field(default_factory=lambda: [Method.ADDS3_AL], min_length=1)
    trials: int = Field(10, ge=1)
    seed: int = Field(default_factory=lambda: settings.SEED)
    flip_prob: float = Field(0.0, ge=0.0, le=1.0)
    timing: bool = False

    # planted sweep
    n0: int = Field(30, ge=1)
    levels: int = Field(3, ge=0)
    mu: float = 0.8
    sigma: float = Field(0.1, ge=0.0)
    separations: list[float] = Field(default_factory=lambda: [0.15], min_length=1)
    multipliers: list[float] = Field(default_factory=lambda: [16.0], min_length=1)

    # latent recovery
    n: int = Field(64, ge=3)
    probabilities: list[float] = Field(default_factory=lambda: [0.5], min_length=1)
    brute_force_max_n: int = Field(7, ge=1)

    @field_validator("methods", "separations", "multipliers", "probabilities", mode="before")
    @classmethod
    def split_csv(cls, v):
        if isinstance(v, str):
            return [item.strip() for item in v.split(",") if item.strip()]
        return v

    @field_validator("separations")
    @classmethod
    def validate_separations(cls, v: list[float]) -> list[float]:
        if any(s <= 0 for s in v):
            raise ValueError("separations must be positive")
        return v

    @field_validator("multipliers")
    @classmethod
    def validate_multipliers(cls, v: list[float]) -> list[float]:
        if any(k <= 0 for k in v):
            raise ValueError("budget multipliers must be positive")
        return v

    @field_validator("probabilities")
    @classmethod
    def validate_probabilities(cls, v: list[float]) -> list[float]:
        if any(not 0 < p <= 1 for p in v):
            raise ValueError("sampling probabilities must lie in (0, 1]")
        return v

    @model_validator(mode="after")
    def validate_methods(self) -> "ExperimentConfig":
        allowed = (
            PLANTED_METHODS
            if self.experiment == ExperimentKind.PLANTED_SWEEP
            else RECOVERY_METHODS
        )
        unsupported = [m.value for m in self.methods if m not in allowed]
        if unsupported:
            raise ValueError(f"methods {unsupported} do not apply to {self.experiment.value}")
        return self


RESULT_COLUMNS = [
    "experiment",
    "method",
    "n",
    "param",
    "num_comparisons",
    "flip_prob",
    "trial",
    "seed",
    "revenue",
    "revenue_kind",
    "aari",
    "ratio_to_latent",
    "wall_ms",
]


class ResultRow(BaseModel):
    """One (config point, trial, method) measurement.

    `revenue` is measured on the sampled comparisons for planted sweeps and on
    the complete latent triplet set for recovery runs.
    """

    experiment: ExperimentKind
    method: Method
    n: int
    param: float
    num_comparisons: int
    flip_prob: float
    trial: int
    seed: int
    revenue: int
    revenue_kind: str = Field(..., pattern="^(triplet|quadruplet)$")
    aari: float | None = None
    ratio_to_latent: float | None = None
    wall_ms: float | None = None

    @field_validator("aari", "ratio_to_latent", "wall_ms", mode="before")
    @classmethod
    def empty_to_none(cls, v):
        return None if v == "" else v
