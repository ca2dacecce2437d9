from pydantic import BaseModel, Field

from app.hc.dendrogram import Dendrogram


class MergeList(BaseModel):
    """Dendrogram on the wire: leaves 0..n-1, the t-th merge creates id n+t-1."""

    n: int = Field(..., ge=1)
    merges: list[tuple[int, int]] = Field(default_factory=list)

    @classmethod
    def from_dendrogram(cls, tree: Dendrogram) -> "MergeList":
        return cls(n=tree.n, merges=list(tree.merges))

    def to_dendrogram(self) -> Dendrogram:
        return Dendrogram(self.n, self.merges)


class RandomTreeRequest(BaseModel):
    n: int = Field(..., ge=1, le=5000)
    seed: int | None = None


class PlantedTreeRequest(BaseModel):
    n0: int = Field(..., ge=1)
    levels: int = Field(..., ge=0, le=12)


class TripletListResponse(BaseModel):
    n: int
    triplets: list[tuple[int, int, int]]
    total: int
