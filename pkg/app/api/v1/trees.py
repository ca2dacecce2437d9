import numpy as np
from fastapi import APIRouter, HTTPException, status

from app.core.config import settings
from app.core.errors import TrevHCError
from app.hc.comparisons import triplets_from_tree
from app.hc.dendrogram import complete_planted_tree, random_tree
from app.schemas.trees import (
    MergeList,
    PlantedTreeRequest,
    RandomTreeRequest,
    TripletListResponse,
)

router = APIRouter(prefix="/trees", tags=["trees"])


@router.post("/random", response_model=MergeList)
async def create_random_tree(body: RandomTreeRequest):
    """Random hierarchy by uniform pair merging."""
    seed = settings.SEED if body.seed is None else body.seed
    tree = random_tree(body.n, np.random.default_rng(seed))
    return MergeList.from_dendrogram(tree)


@router.post("/planted", response_model=MergeList)
async def create_planted_tree(body: PlantedTreeRequest):
    tree = complete_planted_tree(body.n0, body.levels)
    return MergeList.from_dendrogram(tree)


@router.post("/triplets", response_model=TripletListResponse)
async def latent_triplets(body: MergeList):
    """Complete triplet set T0 induced by a tree."""
    try:
        triplets = triplets_from_tree(body.to_dendrogram())
    except TrevHCError as e:
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(e))

    return TripletListResponse(n=triplets.n, triplets=list(triplets), total=len(triplets))
