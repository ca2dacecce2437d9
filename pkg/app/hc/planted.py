"""Planted hierarchical similarity model over a complete binary tree of ground clusters."""

import numpy as np

from app.hc.dendrogram import Dendrogram, complete_planted_tree
from app.hc.similarity import SimilarityMatrix
from app.schemas.params import PlantedParams


def planted_means(params: PlantedParams) -> np.ndarray:
    """Mean similarity per pair: mu inside a ground cluster, mu - (L - l) * separation
    across clusters whose common ancestor sits at level l (root is level 0).

    Ground clusters are the leaves of a complete tree, so L - l is the bit length of
    the XOR of the two cluster indices.
    """
    clusters = np.arange(params.n) // params.n0
    depth_gap = np.bitwise_xor.outer(clusters, clusters)
    gaps = np.zeros_like(depth_gap)
    while depth_gap.any():
        gaps += depth_gap > 0
        depth_gap >>= 1
    return params.mu - gaps * params.separation


def planted_similarity(
    params: PlantedParams, rng: np.random.Generator | None = None
) -> tuple[SimilarityMatrix, Dendrogram]:
    """Independent Gaussian per pair, drawn once for i < j and mirrored.

    Uses `rng` when given, otherwise a generator seeded with params.seed.
    """
    rng = np.random.default_rng(params.seed) if rng is None else rng
    n = params.n
    means = planted_means(params)
    rows, cols = np.triu_indices(n, 1)
    values = np.zeros((n, n), dtype=np.float64)
    values[rows, cols] = rng.normal(means[rows, cols], params.sigma)
    values[cols, rows] = values[rows, cols]
    return SimilarityMatrix(values), complete_planted_tree(params.n0, params.levels)
