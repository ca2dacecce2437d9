import structlog
from fastapi import APIRouter, HTTPException, status

from app.core.errors import TrevHCError
from app.hc.comparisons import TripletSet
from app.hc.linkage import average_linkage
from app.hc.similarity import SimilarityMatrix, adds3, adds4
from app.schemas.comparisons import ClusterRequest
from app.schemas.trees import MergeList

router = APIRouter(prefix="/clusters", tags=["clusters"])

log = structlog.get_logger()


@router.post("", response_model=MergeList)
async def cluster(body: ClusterRequest):
    """AddS3-AL / AddS4-AL on comparisons, or plain average linkage on a similarity."""
    try:
        if body.similarity is not None:
            matrix = SimilarityMatrix(body.similarity)
        else:
            comparisons = body.comparisons.to_set()
            additive = adds3 if isinstance(comparisons, TripletSet) else adds4
            matrix = additive(comparisons)

        tree = average_linkage(matrix)
    except TrevHCError as e:
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(e))

    log.info("clustered", n=tree.n)
    return MergeList.from_dendrogram(tree)
