"""Revenue and cost of dendrograms: comparison revenues, Dasgupta cost and revenue."""

from fractions import Fraction

import numpy as np

from app.core.errors import ComparisonError
from app.hc.comparisons import QuadrupletSet, TripletSet
from app.hc.dendrogram import Dendrogram, internal_nodes
from app.hc.similarity import SimilarityMatrix

_INT64_LIMIT = 2**63


def _lca_for(tree: Dendrogram, comparisons: TripletSet | QuadrupletSet) -> np.ndarray:
    rows = comparisons.array
    if len(rows) and rows.max() >= tree.n:
        raise ComparisonError(
            f"comparison index {int(rows.max())} outside a tree on {tree.n} leaves"
        )
    if len(rows) * max(tree.n, 1) >= _INT64_LIMIT:
        raise OverflowError("revenue could exceed the int64 range")
    return tree.lca_sizes


def trev(tree: Dendrogram, triplets: TripletSet) -> int:
    """Triplet revenue: sum of |H(i v k)| - |H(i v j)| over (i, j, k)."""
    m = _lca_for(tree, triplets)
    i, j, k = triplets.array.T
    return int((m[i, k] - m[i, j]).sum())


def qrev(tree: Dendrogram, quadruplets: QuadrupletSet) -> int:
    """Quadruplet revenue: sum of |H(k v l)| - |H(i v j)| over (i, j, k, l)."""
    m = _lca_for(tree, quadruplets)
    i, j, k, l = quadruplets.array.T
    return int((m[k, l] - m[i, j]).sum())


def consistency_count(tree: Dendrogram, triplets: TripletSet) -> int:
    """Number of triplets (i, j, k) the tree satisfies, |H(i v k)| > |H(i v j)|."""
    m = _lca_for(tree, triplets)
    i, j, k = triplets.array.T
    return int((m[i, k] > m[i, j]).sum())


def _pair_sum(values: np.ndarray) -> int | float:
    total = values.sum()
    return int(total) if np.issubdtype(values.dtype, np.integer) else float(total)


def dcost(tree: Dendrogram, similarity: SimilarityMatrix) -> int | float:
    """Dasgupta cost, sum over i < j of s_ij |H(i v j)|."""
    rows, cols = np.triu_indices(tree.n, 1)
    return _pair_sum(similarity.values[rows, cols] * tree.lca_sizes[rows, cols])


def drev(tree: Dendrogram, similarity: SimilarityMatrix) -> int | float:
    """Dasgupta revenue, n * sum of s_ij minus the cost."""
    return tree.n * _pair_sum(similarity.upper()) - dcost(tree, similarity)


def latent_trev_closed_form(tree: Dendrogram) -> int:
    """Trev of a tree on its own complete triplet set, from internal-node sizes only."""
    n = tree.n
    return sum(
        left * right * size * (3 * size - 2 * n - 2)
        for size, left, right in internal_nodes(tree)
    )


def latent_trev_lower_bound(n: int) -> Fraction:
    """n^4/12 - (2/3)(n^3 - n^2 - n), valid for every tree on n leaves."""
    return Fraction(n**4, 12) - Fraction(2 * (n**3 - n**2 - n), 3)
