from pydantic import BaseModel, Field, model_validator

from app.hc.comparisons import QuadrupletSet, TripletSet
from app.schemas.trees import MergeList


class ComparisonPayload(BaseModel):
    """Either triplets or quadruplets over objects 0..n-1."""

    n: int = Field(..., ge=1)
    triplets: list[tuple[int, int, int]] | None = None
    quadruplets: list[tuple[int, int, int, int]] | None = None

    @model_validator(mode="after")
    def validate_kind(self) -> "ComparisonPayload":
        if (self.triplets is None) == (self.quadruplets is None):
            raise ValueError("provide exactly one of triplets or quadruplets")
        return self

    def to_set(self) -> TripletSet | QuadrupletSet:
        if self.triplets is not None:
            return TripletSet(self.n, self.triplets)
        return QuadrupletSet(self.n, self.quadruplets)


class RevenueRequest(BaseModel):
    tree: MergeList
    comparisons: ComparisonPayload


class RevenueResponse(BaseModel):
    revenue: int
    revenue_kind: str
    consistency: int | None = None
    n: int
    num_comparisons: int


class ClusterRequest(BaseModel):
    comparisons: ComparisonPayload | None = None
    similarity: list[list[float]] | None = None

    @model_validator(mode="after")
    def validate_source(self) -> "ClusterRequest":
        if (self.comparisons is None) == (self.similarity is None):
            raise ValueError("provide exactly one of comparisons or similarity")
        return self


class OracleRequest(BaseModel):
    n: int = Field(..., ge=1)
    triplets: list[tuple[int, int, int]]
    objective: str = Field("trev", pattern="^(trev|consistency)$")


class OracleResponse(BaseModel):
    tree: MergeList
    value: int
    unique: bool
