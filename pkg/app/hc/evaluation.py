"""Flat cuts of dendrograms, ARI and the level-averaged AARI."""

from pathlib import Path

from sklearn.metrics import adjusted_rand_score

from app.core.errors import DendrogramError, FormatError
from app.hc.dendrogram import Dendrogram
from app.hc.textio import read_text
from app.schemas.evaluation import Partition


def cut_top(tree: Dendrogram, k: int) -> Partition:
    """Partition left after undoing the last k-1 merges.

    Cluster labels follow the order of each cluster's smallest leaf.
    """
    n = tree.n
    if not 1 <= k <= n:
        raise DendrogramError(f"cannot cut a tree on {n} leaves into {k} clusters")

    # every leaf climbs to its highest ancestor created by one of the first n-k merges
    owner = list(range(2 * n - 1))
    parent = list(range(2 * n - 1))
    for t, (a, b) in enumerate(tree.merges[: n - k]):
        parent[a] = parent[b] = n + t
    for node in range(2 * n - 2, -1, -1):
        if parent[node] != node:
            owner[node] = owner[parent[node]]

    labels: dict[int, int] = {}
    return Partition(labels=[labels.setdefault(owner[leaf], len(labels)) for leaf in range(n)])


def ari(first: Partition, second: Partition) -> float:
    """Hubert-Arabie adjusted Rand index; 1.0 when both partitions are trivial."""
    if len(first.labels) != len(second.labels):
        raise DendrogramError(
            f"partitions cover {len(first.labels)} and {len(second.labels)} objects"
        )
    return float(adjusted_rand_score(first.labels, second.labels))


def aari(tree: Dendrogram, truth: Dendrogram, levels: int) -> float:
    """Mean ARI of the 2**l-cluster cuts of both trees for l = 1..levels."""
    if tree.n != truth.n:
        raise DendrogramError(f"trees have {tree.n} and {truth.n} leaves")
    if levels < 1 or 2**levels > tree.n:
        raise DendrogramError(
            f"{levels} levels need 2**{levels} clusters but the trees have {tree.n} leaves"
        )
    scores = [
        ari(cut_top(tree, 2**level), cut_top(truth, 2**level))
        for level in range(1, levels + 1)
    ]
    return sum(scores) / levels


def read_partition(path: Path | str) -> Partition:
    fields = read_text(path).split()
    try:
        labels = [int(field) for field in fields]
    except ValueError as e:
        raise FormatError(f"{path}: labels must be integers") from e
    return Partition(labels=labels)


def format_partition(partition: Partition) -> str:
    return "".join(f"{label}\n" for label in partition.labels)


def write_partition(path: Path | str, partition: Partition) -> None:
    Path(path).write_text(format_partition(partition), encoding="utf-8")
