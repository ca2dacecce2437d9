from fastapi import APIRouter, HTTPException, status

from app.core.errors import TrevHCError
from app.hc.comparisons import TripletSet
from app.hc.objective import consistency_count, qrev, trev
from app.schemas.comparisons import RevenueRequest, RevenueResponse

router = APIRouter(prefix="/revenue", tags=["revenue"])


@router.post("", response_model=RevenueResponse)
async def score_tree(body: RevenueRequest):
    """Triplet or quadruplet revenue of a tree, with the triplet consistency count."""
    try:
        tree = body.tree.to_dendrogram()
        comparisons = body.comparisons.to_set()

        if isinstance(comparisons, TripletSet):
            return RevenueResponse(
                revenue=trev(tree, comparisons),
                revenue_kind="triplet",
                consistency=consistency_count(tree, comparisons),
                n=tree.n,
                num_comparisons=len(comparisons),
            )
        return RevenueResponse(
            revenue=qrev(tree, comparisons),
            revenue_kind="quadruplet",
            n=tree.n,
            num_comparisons=len(comparisons),
        )
    except TrevHCError as e:
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(e))
