"""Triplet and quadruplet comparison sets: generation, sampling, noise, conversion and files.

A triplet (i, j, k) states s_ij > s_ik; a quadruplet (i, j, k, l) with i < j, k < l
states s_ij > s_kl.
"""

import csv
import io
import re
from collections.abc import Iterable, Iterator, Sequence
from functools import cached_property
from math import comb
from pathlib import Path

import numpy as np
import structlog

from app.core.errors import ComparisonError, FormatError
from app.hc.dendrogram import Dendrogram
from app.hc.similarity import SimilarityMatrix
from app.hc.textio import is_index, read_text
from app.schemas.params import NoiseParams, SamplingParams

log = structlog.get_logger()

_N_HEADER = re.compile(r"^#\s*n\s+([0-9]+)\s*$")


class ComparisonSet:
    """De-duplicated, immutable collection of comparison tuples over objects 0..n-1."""

    width: int = 0
    kind: str = ""

    def __init__(self, n: int, rows: np.ndarray | Sequence[Sequence[int]] = ()):
        array = np.asarray(rows, dtype=np.int64)
        if array.size == 0:
            array = np.empty((0, self.width), dtype=np.int64)
        if array.ndim != 2 or array.shape[1] != self.width:
            raise ComparisonError(
                f"{self.kind} rows must have {self.width} entries, got shape {array.shape}"
            )
        if n < 0:
            raise ComparisonError(f"object count must be non-negative, got {n}")
        if len(array) and (array.min() < 0 or array.max() >= n):
            raise ComparisonError(f"{self.kind} index outside 0..{n - 1}")
        self._check_rows(array)

        array = np.unique(array, axis=0) if len(array) else array
        array.setflags(write=False)
        self.n = n
        self.array = array

    def _check_rows(self, array: np.ndarray) -> None:
        raise NotImplementedError

    def __len__(self) -> int:
        return len(self.array)

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        return (tuple(int(v) for v in row) for row in self.array)

    def __contains__(self, item: Sequence[int]) -> bool:
        if len(item) != self.width:
            return False
        key = 0
        for v in item:
            key = key * self.n + int(v)
        return key in self._key_set

    def __eq__(self, other: object) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.array, other.array)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={self.n}, size={len(self)})"

    @cached_property
    def keys(self) -> np.ndarray:
        """Row-major integer encoding of each tuple."""
        key = np.zeros(len(self.array), dtype=np.int64)
        for col in range(self.width):
            key = key * self.n + self.array[:, col]
        return key

    @cached_property
    def _key_set(self) -> frozenset[int]:
        return frozenset(self.keys.tolist())

    def with_rows(self, rows: np.ndarray) -> "ComparisonSet":
        return type(self)(self.n, rows)


class TripletSet(ComparisonSet):
    width = 3
    kind = "triplet"

    def _check_rows(self, array: np.ndarray) -> None:
        i, j, k = array.T
        if np.any((i == j) | (i == k) | (j == k)):
            raise ComparisonError("triplet indices must be pairwise distinct")


class QuadrupletSet(ComparisonSet):
    width = 4
    kind = "quadruplet"

    def _check_rows(self, array: np.ndarray) -> None:
        i, j, k, l = array.T
        if np.any(i >= j) or np.any(k >= l):
            raise ComparisonError("quadruplet pairs must satisfy i < j and k < l")
        if np.any((i == k) & (j == l)):
            raise ComparisonError("quadruplet compares a pair with itself")


# ------------------------------------------------------------------
# Generation
# ------------------------------------------------------------------


def triplets_from_similarity(similarity: SimilarityMatrix) -> TripletSet:
    """Every strict triplet of a similarity matrix; tied anchors yield nothing."""
    s = similarity.values
    n = similarity.n
    if n < 3:
        return TripletSet(n)
    a, b = np.triu_indices(n - 1, 1)
    blocks = []
    for i in range(n):
        j = a + (a >= i)
        k = b + (b >= i)
        sj, sk = s[i, j], s[i, k]
        closer_j = sj > sk
        closer_k = sk > sj
        anchor = np.full(int(closer_j.sum() + closer_k.sum()), i, dtype=np.int64)
        first = np.concatenate([j[closer_j], k[closer_k]])
        second = np.concatenate([k[closer_j], j[closer_k]])
        blocks.append(np.column_stack([anchor, first, second]))
    return TripletSet(n, np.concatenate(blocks))


def triplets_from_tree(tree: Dendrogram) -> TripletSet:
    """T0 of a hierarchy: (i,j,k) and (j,i,k) whenever i and j merge before either meets k.

    The set equals the strict triplets of the similarity -|H(i v j)|, since the anchor
    outside the closest pair always sees a tie.
    """
    return triplets_from_similarity(SimilarityMatrix(-tree.lca_sizes.astype(np.int64)))


def quadruplets_from_similarity(similarity: SimilarityMatrix) -> QuadrupletSet:
    """Every strict quadruplet; O(C(n,2)^2) output, meant for small n."""
    n = similarity.n
    rows, cols = np.triu_indices(n, 1)
    values = similarity.values[rows, cols]
    blocks = []
    for p in range(len(values) - 1):
        q = np.arange(p + 1, len(values))
        win = values[p] > values[q]
        lose = values[q] > values[p]
        wins, losses = int(win.sum()), int(lose.sum())
        ahead = np.column_stack(
            [np.full(wins, rows[p]), np.full(wins, cols[p]), rows[q[win]], cols[q[win]]]
        )
        behind = np.column_stack(
            [rows[q[lose]], cols[q[lose]], np.full(losses, rows[p]), np.full(losses, cols[p])]
        )
        blocks.extend([ahead, behind])
    if not blocks:
        return QuadrupletSet(n)
    return QuadrupletSet(n, np.concatenate(blocks))


# ------------------------------------------------------------------
# Sampling
# ------------------------------------------------------------------


def sample_pairs_bernoulli(
    t0: TripletSet, params: SamplingParams, rng: np.random.Generator
) -> TripletSet:
    """Keep each pair {(i,j,k), (j,i,k)} jointly with probability params.p."""
    arr = t0.array
    swapped = arr[:, [1, 0, 2]]
    swapped_keys = (swapped[:, 0] * t0.n + swapped[:, 1]) * t0.n + swapped[:, 2]
    if not np.isin(swapped_keys, t0.keys).all():
        raise ComparisonError("triplet set is not closed under (i,j,k) <-> (j,i,k)")

    heads = arr[arr[:, 0] < arr[:, 1]]
    keep = rng.random(len(heads)) < params.p
    kept = heads[keep]
    return TripletSet(t0.n, np.concatenate([kept, kept[:, [1, 0, 2]]]))


def unrank_pairs(ranks: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Colex unranking: rank r -> (a, b) with a < b and r = b(b-1)/2 + a."""
    ranks = np.asarray(ranks, dtype=np.int64)
    b = np.floor((1 + np.sqrt(1 + 8 * ranks.astype(np.float64))) / 2).astype(np.int64)
    b -= (b * (b - 1) // 2 > ranks).astype(np.int64)
    b += ((b + 1) * b // 2 <= ranks).astype(np.int64)
    return ranks - b * (b - 1) // 2, b


def _count_ties(values: np.ndarray) -> int:
    _, counts = np.unique(values, return_counts=True)
    return int((counts * (counts - 1) // 2).sum())


def tie_free_size(similarity: SimilarityMatrix, kind: str = "triplet") -> int:
    """Exact size of the tie-free triplet or quadruplet space of a similarity matrix."""
    n = similarity.n
    s = similarity.values
    if kind == "triplet":
        if n < 3:
            return 0
        ties = 0
        for i in range(n):
            ties += _count_ties(np.delete(s[i], i))
        return n * comb(n - 1, 2) - ties
    if kind == "quadruplet":
        values = s[np.triu_indices(n, 1)]
        return comb(len(values), 2) - _count_ties(values)
    raise ComparisonError(f"unknown comparison kind {kind!r}")


def _unrank_triplets(ranks: np.ndarray, n: int) -> np.ndarray:
    per_anchor = comb(n - 1, 2)
    anchor = ranks // per_anchor
    a, b = unrank_pairs(ranks % per_anchor)
    return np.column_stack([anchor, a + (a >= anchor), b + (b >= anchor)])


def _unrank_quadruplets(ranks: np.ndarray, n: int) -> np.ndarray:
    p, q = unrank_pairs(ranks)
    i, j = unrank_pairs(p)
    k, l = unrank_pairs(q)
    return np.column_stack([i, j, k, l])


def _orient(rows: np.ndarray, s: np.ndarray, kind: str) -> tuple[np.ndarray, np.ndarray]:
    """Orient unordered comparisons by similarity; returns (oriented rows, not-tied mask)."""
    if kind == "triplet":
        first, second = s[rows[:, 0], rows[:, 1]], s[rows[:, 0], rows[:, 2]]
        flip = second > first
        oriented = rows.copy()
        oriented[flip] = rows[flip][:, [0, 2, 1]]
    else:
        first, second = s[rows[:, 0], rows[:, 1]], s[rows[:, 2], rows[:, 3]]
        flip = second > first
        oriented = rows.copy()
        oriented[flip] = rows[flip][:, [2, 3, 0, 1]]
    return oriented, first != second


def sample_uniform(
    similarity: SimilarityMatrix,
    m: int,
    rng: np.random.Generator,
    kind: str = "triplet",
) -> TripletSet | QuadrupletSet:
    """Draw m distinct non-tied comparisons uniformly from T_all or Q_all.

    Indices of the comparison space are unranked on demand, so memory stays O(m)
    unless m is at least half the space, where the space is listed instead.
    """
    n = similarity.n
    if kind == "triplet":
        space, unrank, result = n * comb(n - 1, 2), _unrank_triplets, TripletSet
    elif kind == "quadruplet":
        space, unrank, result = comb(comb(n, 2), 2), _unrank_quadruplets, QuadrupletSet
    else:
        raise ComparisonError(f"unknown comparison kind {kind!r}")

    available = tie_free_size(similarity, kind)
    if m < 0 or m > available:
        raise ComparisonError(
            f"cannot sample {m} {kind}s: tie-free space holds {available}"
        )
    if m == 0:
        return result(n)

    if 2 * m >= available:
        full = (
            triplets_from_similarity(similarity)
            if kind == "triplet"
            else quadruplets_from_similarity(similarity)
        )
        picked = rng.choice(len(full), size=m, replace=False)
        return result(n, full.array[picked])

    ranks = np.empty(0, dtype=np.int64)
    rejected = 0
    while len(ranks) < m:
        need = m - len(ranks)
        draw = rng.integers(0, space, size=need + need // 4 + 16)
        _, valid = _orient(unrank(draw, n), similarity.values, kind)
        rejected += int((~valid).sum())
        ranks = np.concatenate([ranks, draw[valid]])
        _, first = np.unique(ranks, return_index=True)
        ranks = ranks[np.sort(first)]
    ranks = ranks[:m]

    rows, _ = _orient(unrank(ranks, n), similarity.values, kind)
    log.debug("sampled comparisons", kind=kind, requested=m, rejected_ties=rejected)
    return result(n, rows)


def flip_noise(
    comparisons: TripletSet | QuadrupletSet,
    params: NoiseParams,
    rng: np.random.Generator,
) -> TripletSet | QuadrupletSet:
    """Independently reverse each comparison with probability params.flip_prob."""
    arr = comparisons.array
    flip = rng.random(len(arr)) < params.flip_prob
    order = [0, 2, 1] if isinstance(comparisons, TripletSet) else [2, 3, 0, 1]
    noisy = arr.copy()
    noisy[flip] = arr[flip][:, order]
    return comparisons.with_rows(noisy)


# ------------------------------------------------------------------
# Query-format conversions
# ------------------------------------------------------------------


def _object_count(rows: list[tuple[int, ...]], n: int | None) -> int:
    if n is not None:
        return n
    return max((max(r) for r in rows), default=-1) + 1


def convert_central(
    answers: Iterable[tuple[int, int, int, int]], n: int | None = None
) -> TripletSet:
    """'Which of i, j, k is most central': the central c yields (a,c,b) and (b,c,a)."""
    rows = []
    for i, j, k, central in answers:
        triple = (i, j, k)
        if central not in triple or len(set(triple)) != 3:
            raise ComparisonError(f"central object {central} not in query {triple}")
        a, b = (x for x in triple if x != central)
        rows.extend([(a, central, b), (b, central, a)])
    return TripletSet(_object_count(rows, n), rows)


def convert_odd_out(
    answers: Iterable[tuple[int, int, int, int]], n: int | None = None
) -> TripletSet:
    """'Which of i, j, k is the odd one out': the odd o yields (a,b,o) and (b,a,o)."""
    rows = []
    for i, j, k, odd in answers:
        triple = (i, j, k)
        if odd not in triple or len(set(triple)) != 3:
            raise ComparisonError(f"odd object {odd} not in query {triple}")
        a, b = (x for x in triple if x != odd)
        rows.extend([(a, b, odd), (b, a, odd)])
    return TripletSet(_object_count(rows, n), rows)


def convert_rank2of8(
    answers: Iterable[tuple[int, Sequence[int], Sequence[int]]], n: int | None = None
) -> TripletSet:
    """Reference plus 7 candidates with the 2 most similar ranked: 11 triplets per answer."""
    rows = []
    for reference, candidates, top2 in answers:
        candidates = [int(c) for c in candidates]
        first, second = (int(t) for t in top2)
        if len(candidates) != 7 or len(set(candidates)) != 7 or reference in candidates:
            raise ComparisonError(
                f"rank-2-of-8 query needs 7 distinct candidates besides {reference}"
            )
        if first == second or first not in candidates or second not in candidates:
            raise ComparisonError(
                f"ranked objects {first}, {second} must be two distinct candidates"
            )
        rest = [c for c in candidates if c not in (first, second)]
        rows.extend((reference, first, c) for c in [second, *rest])
        rows.extend((reference, second, c) for c in rest)
    return TripletSet(_object_count(rows, n), rows)


def read_answers(path: Path | str, n: int | None = None) -> TripletSet:
    """Convert a CSV of crowd answers; the header names the query type."""
    reader = csv.DictReader(io.StringIO(read_text(path), newline=""))
    fields = reader.fieldnames or []
    try:
        records = [{key: int(value) for key, value in row.items()} for row in reader]
    except (TypeError, ValueError) as e:
        raise FormatError(f"{path}: non-integer answer field") from e

    if fields == ["i", "j", "k", "central"]:
        return convert_central(((r["i"], r["j"], r["k"], r["central"]) for r in records), n)
    if fields == ["i", "j", "k", "oddout"]:
        return convert_odd_out(((r["i"], r["j"], r["k"], r["oddout"]) for r in records), n)
    if fields == ["reference", *(f"c{x}" for x in range(1, 8)), "rank1", "rank2"]:
        return convert_rank2of8(
            (
                (r["reference"], [r[f"c{x}"] for x in range(1, 8)], (r["rank1"], r["rank2"]))
                for r in records
            ),
            n,
        )
    raise FormatError(f"{path}: header {fields} names no known query type")


# ------------------------------------------------------------------
# Restriction
# ------------------------------------------------------------------


def restrict_triplets(triplets: TripletSet, subset: Iterable[int]) -> TripletSet:
    """Triplets lying entirely in `subset`, relabeled by sorted position like `restrict`."""
    labels = np.array(sorted(set(int(c) for c in subset)), dtype=np.int64)
    arr = triplets.array
    inside = np.isin(arr, labels).all(axis=1)
    return TripletSet(len(labels), np.searchsorted(labels, arr[inside]))


# ------------------------------------------------------------------
# Files
# ------------------------------------------------------------------


def format_comparisons(comparisons: ComparisonSet) -> str:
    out = io.StringIO()
    out.write(f"# n {comparisons.n}\n")
    for row in comparisons.array:
        out.write(" ".join(str(int(v)) for v in row))
        out.write("\n")
    return out.getvalue()


def parse_comparisons(text: str, kind: str = "triplet", n: int | None = None) -> ComparisonSet:
    cls = {"triplet": TripletSet, "quadruplet": QuadrupletSet}.get(kind)
    if cls is None:
        raise ComparisonError(f"unknown comparison kind {kind!r}")

    declared = None
    body = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            header = _N_HEADER.match(stripped)
            if header:
                declared = int(header.group(1))
            continue
        fields = stripped.split()
        if len(fields) != cls.width or not all(is_index(f) for f in fields):
            raise FormatError(f"line {lineno}: expected {cls.width} indices, got {stripped!r}")
        body.append([int(f) for f in fields])

    rows = np.array(body, dtype=np.int64).reshape(-1, cls.width)
    count = n if n is not None else declared
    if count is None:
        count = int(rows.max()) + 1 if len(rows) else 0
    try:
        return cls(count, rows)
    except ComparisonError as e:
        raise FormatError(str(e)) from e


def read_comparisons(
    path: Path | str, kind: str = "triplet", n: int | None = None
) -> ComparisonSet:
    return parse_comparisons(read_text(path), kind, n)


def write_comparisons(path: Path | str, comparisons: ComparisonSet) -> None:
    Path(path).write_text(format_comparisons(comparisons), encoding="utf-8")
