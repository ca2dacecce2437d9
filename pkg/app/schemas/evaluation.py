from pydantic import BaseModel, Field, model_validator

from app.schemas.trees import MergeList


class Partition(BaseModel):
    """Flat clustering: labels[i] is the cluster id of object i."""

    labels: list[int] = Field(..., min_length=1)

    @model_validator(mode="after")
    def validate_labels(self) -> "Partition":
        used = set(self.labels)
        if used != set(range(len(used))):
            raise ValueError("cluster ids must be exactly 0..k-1, each used at least once")
        return self

    @property
    def num_clusters(self) -> int:
        return max(self.labels) + 1


class AariRequest(BaseModel):
    tree: MergeList
    truth: MergeList
    levels: int = Field(..., ge=1)


class AariResponse(BaseModel):
    aari: float
    levels: int


class CutRequest(BaseModel):
    tree: MergeList
    k: int = Field(..., ge=1)
