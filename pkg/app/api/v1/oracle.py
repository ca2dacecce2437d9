from fastapi import APIRouter, HTTPException, status

from app.core.errors import TrevHCError
from app.hc.comparisons import TripletSet
from app.hc.oracle import brute_force_max_consistency, brute_force_max_trev
from app.schemas.comparisons import OracleRequest, OracleResponse
from app.schemas.trees import MergeList

router = APIRouter(prefix="/oracle", tags=["oracle"])


@router.post("", response_model=OracleResponse)
async def maximize(body: OracleRequest):
    """Exact maximizer over every tree on n leaves; capped by TREVHC_ORACLE_MAX_N."""
    try:
        triplets = TripletSet(body.n, body.triplets)
        search = brute_force_max_trev if body.objective == "trev" else brute_force_max_consistency
        best = search(triplets, body.n)
    except TrevHCError as e:
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(e))

    return OracleResponse(
        tree=MergeList.from_dendrogram(best.tree), value=best.value, unique=best.unique
    )
