from pydantic import BaseModel, ConfigDict, Field


class SamplingParams(BaseModel):
    """Bernoulli pair sampling of a latent triplet set."""

    p: float = Field(..., ge=0.0, le=1.0)
    alpha: float = Field(1.0, gt=0.0)
    epsilon: float = Field(0.25, gt=0.0, lt=0.5)

    model_config = ConfigDict(frozen=True)


class NoiseParams(BaseModel):
    """Uniform comparison flips."""

    flip_prob: float = Field(0.0, ge=0.0, le=1.0)

    model_config = ConfigDict(frozen=True)


class PlantedParams(BaseModel):
    """Gaussian planted hierarchy over 2**levels ground clusters of n0 objects."""

    n0: int = Field(30, ge=1)
    levels: int = Field(3, ge=0)
    mu: float = 0.8
    sigma: float = Field(0.1, ge=0.0)
    separation: float = Field(0.15, gt=0.0)
    seed: int = 0

    model_config = ConfigDict(frozen=True)

    @property
    def n(self) -> int:
        return self.n0 * 2**self.levels
