"""Binary hierarchies over n labeled objects, stored as ordered merge sequences.

Leaves carry ids 0..n-1 and the t-th merge (t = 1..n-1) creates id n+t-1, so
the root is always id 2n-2.
"""

from collections.abc import Iterable, Sequence
from functools import cached_property
from pathlib import Path

import numpy as np

from app.core.errors import DendrogramError, FormatError
from app.hc.textio import is_index, read_text


class Dendrogram:
    """Immutable rooted binary tree on leaves 0..n-1."""

    def __init__(self, n: int, merges: Iterable[Sequence[int]]):
        if n < 1:
            raise DendrogramError(f"a dendrogram needs at least one leaf, got n={n}")
        pairs = tuple((int(a), int(b)) for a, b in merges)
        if len(pairs) != n - 1:
            raise DendrogramError(
                f"expected {n - 1} merges for n={n}, got {len(pairs)}"
            )

        merged = [False] * (2 * n - 1)
        for t, (a, b) in enumerate(pairs):
            new_id = n + t
            for c in (a, b):
                if not 0 <= c < new_id:
                    raise DendrogramError(f"merge {t}: unknown cluster id {c}")
                if merged[c]:
                    raise DendrogramError(f"merge {t}: cluster id {c} merged twice")
                merged[c] = True
            if a == b:
                raise DendrogramError(f"merge {t}: cluster id {a} merged with itself")

        self.n = n
        self.merges = pairs

    def __repr__(self) -> str:
        return f"Dendrogram(n={self.n}, merges={list(self.merges)!r})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dendrogram):
            return NotImplemented
        return self.n == other.n and self.merges == other.merges

    def __hash__(self) -> int:
        return hash((self.n, self.merges))

    @property
    def root(self) -> int:
        return 2 * self.n - 2

    @cached_property
    def sizes(self) -> tuple[int, ...]:
        """Leaf count of every cluster id."""
        sizes = [1] * self.n
        for a, b in self.merges:
            sizes.append(sizes[a] + sizes[b])
        return tuple(sizes)

    @cached_property
    def min_leaf(self) -> tuple[int, ...]:
        lows = list(range(self.n))
        for a, b in self.merges:
            lows.append(min(lows[a], lows[b]))
        return tuple(lows)

    @cached_property
    def lca_sizes(self) -> np.ndarray:
        m = np.ones((self.n, self.n), dtype=np.int64)
        groups: list[list[int]] = [[i] for i in range(self.n)]
        for a, b in self.merges:
            left, right = groups[a], groups[b]
            size = len(left) + len(right)
            m[np.ix_(left, right)] = size
            m[np.ix_(right, left)] = size
            groups.append(left + right)
        m.setflags(write=False)
        return m

    @cached_property
    def canonical_form(self) -> str:
        """Nested-parenthesis string with children ordered by their smallest leaf."""
        forms = [str(i) for i in range(self.n)]
        lows = self.min_leaf
        for a, b in self.merges:
            if lows[b] < lows[a]:
                a, b = b, a
            forms.append(f"({forms[a]},{forms[b]})")
        return forms[-1]


def build_from_merges(n: int, merges: Iterable[Sequence[int]]) -> Dendrogram:
    return Dendrogram(n, merges)


def lca_size_matrix(tree: Dendrogram) -> np.ndarray:
    """Read-only matrix m with m[i, j] = |H(i v j)| for i != j and 1 on the diagonal."""
    return tree.lca_sizes


def internal_nodes(tree: Dendrogram) -> list[tuple[int, int, int]]:
    """(size, left_size, right_size) per internal node, in merge order."""
    sizes = tree.sizes
    return [(sizes[a] + sizes[b], sizes[a], sizes[b]) for a, b in tree.merges]


def is_isomorphic(first: Dendrogram, second: Dendrogram) -> bool:
    if first.n != second.n:
        raise DendrogramError(
            f"cannot compare trees on {first.n} and {second.n} leaves"
        )
    return first.canonical_form == second.canonical_form


def random_tree(n: int, rng: np.random.Generator) -> Dendrogram:
    """Merge a uniformly random pair of current clusters until one remains.

    Not uniform over topologies once n >= 4.
    """
    if n < 1:
        raise DendrogramError(f"a dendrogram needs at least one leaf, got n={n}")
    active = list(range(n))
    merges = []
    for new_id in range(n, 2 * n - 1):
        x, y = rng.choice(len(active), size=2, replace=False)
        a, b = active[x], active[y]
        merges.append((a, b))
        for pos in sorted((int(x), int(y)), reverse=True):
            del active[pos]
        active.append(new_id)
    return Dendrogram(n, merges)


def complete_planted_tree(n0: int, levels: int) -> Dendrogram:
    """Complete binary tree of height `levels` over 2**levels ground clusters of n0 leaves.

    Ground cluster c owns leaves [c*n0, (c+1)*n0) and is a caterpillar.  Cluster
    merges come last, bottom level first, so undoing the final 2**l - 1 merges
    yields the 2**l clusters of level l.
    """
    if n0 < 1 or levels < 0:
        raise DendrogramError(f"invalid planted shape n0={n0}, levels={levels}")
    n = n0 * 2**levels
    merges: list[tuple[int, int]] = []
    next_id = n

    def merge(a: int, b: int) -> int:
        nonlocal next_id
        merges.append((a, b))
        next_id += 1
        return next_id - 1

    tops = []
    for c in range(2**levels):
        node = c * n0
        for leaf in range(c * n0 + 1, (c + 1) * n0):
            node = merge(node, leaf)
        tops.append(node)

    while len(tops) > 1:
        tops = [merge(tops[x], tops[x + 1]) for x in range(0, len(tops), 2)]
    return Dendrogram(n, merges)


def restrict(tree: Dendrogram, subset: Iterable[int]) -> tuple[Dendrogram, tuple[int, ...]]:
    """Restriction of `tree` to the leaves in `subset`, single-child nodes contracted.

    Returns the restricted tree on 0..|C|-1 and the label map (new label -> old leaf),
    which follows the sorted order of `subset`.
    """
    labels = tuple(sorted(set(int(c) for c in subset)))
    if not labels:
        raise DendrogramError("cannot restrict a tree to an empty leaf set")
    if labels[0] < 0 or labels[-1] >= tree.n:
        raise DendrogramError(f"restriction set has labels outside 0..{tree.n - 1}")

    size = len(labels)
    image: list[int | None] = [None] * tree.n
    for new, old in enumerate(labels):
        image[old] = new

    merges = []
    next_id = size
    for a, b in tree.merges:
        ra, rb = image[a], image[b]
        if ra is None or rb is None:
            image.append(rb if ra is None else ra)
            continue
        merges.append((ra, rb))
        image.append(next_id)
        next_id += 1
    return Dendrogram(size, merges), labels


def serialize(tree: Dendrogram) -> str:
    lines = [f"n {tree.n}"]
    lines.extend(f"{a} {b}" for a, b in tree.merges)
    return "\n".join(lines) + "\n"


def parse(text: str) -> Dendrogram:
    if not text.endswith("\n"):
        raise FormatError("merge list must end with a newline")
    rows = [
        line.strip()
        for line in text.splitlines()
        if line.strip() and not line.lstrip().startswith("#")
    ]
    if not rows:
        raise FormatError("merge list is empty")

    header = rows[0].split()
    if len(header) != 2 or header[0] != "n" or not is_index(header[1]):
        raise FormatError(f"malformed header {rows[0]!r}, expected 'n <count>'")
    n = int(header[1])
    if len(rows) - 1 != n - 1:
        raise FormatError(f"header declares n={n} but found {len(rows) - 1} merge lines")

    merges = []
    for row in rows[1:]:
        fields = row.split()
        if len(fields) != 2 or not all(is_index(f) for f in fields):
            raise FormatError(f"bad merge line {row!r}")
        merges.append((int(fields[0]), int(fields[1])))
    try:
        return Dendrogram(n, merges)
    except DendrogramError as e:
        raise FormatError(str(e)) from e


def read_tree(path: Path | str) -> Dendrogram:
    return parse(read_text(path))
