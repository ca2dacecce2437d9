"""Average linkage on similarities (maximize the mean inter-cluster similarity)."""

import numpy as np
import structlog

from app.hc.dendrogram import Dendrogram
from app.hc.similarity import SimilarityMatrix

log = structlog.get_logger()


def average_linkage(similarity: SimilarityMatrix) -> Dendrogram:
    """Agglomerate by the size-weighted average similarity rule.

    A merged cluster takes the lower of its two matrix slots.  Among equal averages
    the lexicographically smallest slot pair wins, and the merge is emitted as
    (id in lower slot, id in higher slot).  Inter-cluster similarity totals are kept
    alongside the averages so integer inputs tie exactly.
    """
    n = similarity.n
    if n == 1:
        return Dendrogram(1, [])

    totals = similarity.values.astype(np.float64)
    averages = totals.copy()
    np.fill_diagonal(averages, -np.inf)
    sizes = np.ones(n, dtype=np.float64)
    active = np.ones(n, dtype=bool)
    slot_ids = list(range(n))
    merges = []

    for new_id in range(n, 2 * n - 1):
        # row-major argmax of a symmetric matrix is the smallest (row, col) with row < col
        low, high = divmod(int(np.argmax(averages)), n)
        merges.append((slot_ids[low], slot_ids[high]))

        totals[low] += totals[high]
        totals[:, low] = totals[low]
        sizes[low] += sizes[high]
        slot_ids[low] = new_id

        active[high] = False

        row = totals[low] / (sizes[low] * sizes)
        row[~active] = -np.inf
        row[low] = -np.inf
        averages[low] = row
        averages[:, low] = row
        averages[high] = -np.inf
        averages[:, high] = -np.inf

    log.debug("average linkage done", n=n)
    return Dendrogram(n, merges)
