from fastapi import APIRouter, HTTPException, status

from app.core.errors import TrevHCError
from app.hc.evaluation import aari, cut_top
from app.schemas.evaluation import AariRequest, AariResponse, CutRequest, Partition

router = APIRouter(prefix="/evaluation", tags=["evaluation"])


@router.post("/aari", response_model=AariResponse)
async def averaged_ari(body: AariRequest):
    try:
        value = aari(body.tree.to_dendrogram(), body.truth.to_dendrogram(), body.levels)
    except TrevHCError as e:
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(e))

    return AariResponse(aari=value, levels=body.levels)


@router.post("/cut", response_model=Partition)
async def cut(body: CutRequest):
    """Flat partition after undoing the last k-1 merges."""
    try:
        return cut_top(body.tree.to_dendrogram(), body.k)
    except TrevHCError as e:
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(e))
