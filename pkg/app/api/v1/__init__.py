from fastapi import APIRouter

from app.api.v1 import (
    trees,
    revenue,
    clusters,
    evaluation,
    oracle,
)

router = APIRouter(prefix="/api/v1")

router.include_router(trees.router)
router.include_router(revenue.router)
router.include_router(clusters.router)
router.include_router(evaluation.router)
router.include_router(oracle.router)
