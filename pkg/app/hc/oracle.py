"""Exhaustive enumeration of binary hierarchies and brute-force maximizers for small n."""

from collections.abc import Callable, Iterator
from typing import NamedTuple

import numpy as np
import structlog

from app.core.config import settings
from app.core.errors import OracleLimitError
from app.hc.comparisons import TripletSet
from app.hc.dendrogram import Dendrogram
from app.hc.objective import consistency_count
from app.hc.similarity import adds3

log = structlog.get_logger()

Nested = int | tuple["Nested", "Nested"]


class Maximizer(NamedTuple):
    tree: Dendrogram
    value: int
    unique: bool


def count_trees(n: int) -> int:
    """(2n-3)!! rooted binary topologies on n labeled leaves."""
    total = 1
    for odd in range(3, 2 * n - 2, 2):
        total *= odd
    return total


def _insertions(n: int) -> Iterator[Nested]:
    """Attach leaf m to each of the 2m-3 edges (root edge included) of every tree on m leaves."""

    def grow(node: Nested, leaf: int) -> Iterator[Nested]:
        yield (node, leaf)
        if isinstance(node, tuple):
            left, right = node
            for grown in grow(left, leaf):
                yield (grown, right)
            for grown in grow(right, leaf):
                yield (left, grown)

    def build(tree: Nested, leaf: int) -> Iterator[Nested]:
        if leaf == n:
            yield tree
            return
        for grown in grow(tree, leaf):
            yield from build(grown, leaf + 1)

    if n == 1:
        yield 0
        return
    yield from build((0, 1), 2)


def _to_dendrogram(tree: Nested, n: int) -> Dendrogram:
    merges: list[tuple[int, int]] = []

    def walk(node: Nested) -> int:
        if isinstance(node, int):
            return node
        a, b = walk(node[0]), walk(node[1])
        merges.append((a, b))
        return n + len(merges) - 1

    walk(tree)
    return Dendrogram(n, merges)


def _check_cap(n: int, max_n: int | None) -> None:
    if n < 1:
        raise OracleLimitError(f"cannot enumerate trees on {n} leaves")
    cap = settings.ORACLE_MAX_N if max_n is None else max_n
    if n > cap:
        raise OracleLimitError(
            f"enumerating {count_trees(n)} trees for n={n} exceeds the cap n <= {cap}"
        )


def enumerate_trees(n: int, max_n: int | None = None) -> Iterator[Dendrogram]:
    """Every topology on n leaves exactly once, by iterative leaf insertion."""
    _check_cap(n, max_n)
    return (_to_dendrogram(tree, n) for tree in _insertions(n))


def _maximize(
    n: int, score: Callable[[Dendrogram], int], max_n: int | None
) -> Maximizer:
    best: Dendrogram | None = None
    best_value = 0
    ties = 0
    for tree in enumerate_trees(n, max_n):
        value = score(tree)
        if best is None or value > best_value:
            best, best_value, ties = tree, value, 1
        elif value == best_value:
            ties += 1
            if tree.canonical_form < best.canonical_form:
                best = tree
    log.debug("brute force done", n=n, value=best_value, maximizers=ties)
    return Maximizer(best, best_value, ties == 1)


def brute_force_max_trev(
    triplets: TripletSet, n: int | None = None, max_n: int | None = None
) -> Maximizer:
    """Exact Trev maximizer, scored as -Dcost on AddS3 so each tree costs O(n^2).

    Ties between maximizers resolve to the smallest canonical form.
    """
    n = triplets.n if n is None else n
    rows, cols = np.triu_indices(n, 1)
    weights = adds3(triplets, n).values[rows, cols]
    return _maximize(
        n, lambda tree: -int(weights @ tree.lca_sizes[rows, cols]), max_n
    )


def brute_force_max_consistency(
    triplets: TripletSet, n: int | None = None, max_n: int | None = None
) -> Maximizer:
    n = triplets.n if n is None else n
    return _maximize(n, lambda tree: consistency_count(tree, triplets), max_n)
