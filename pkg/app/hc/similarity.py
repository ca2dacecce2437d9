"""Pairwise similarities: additive similarities from comparisons, the latent closed form, cosine."""

from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np
from sklearn.metrics.pairwise import cosine_similarity

from app.core.errors import FormatError, SimilarityError
from app.hc.textio import read_text

if TYPE_CHECKING:
    from app.hc.comparisons import QuadrupletSet, TripletSet
    from app.hc.dendrogram import Dendrogram

SYMMETRY_TOLERANCE = 1e-9


class SimilarityMatrix:
    """Symmetric n x n similarity with a zero diagonal; int64 when built from counts."""

    def __init__(self, values: np.ndarray):
        try:
            values = np.array(values)
        except ValueError as e:
            raise SimilarityError(f"similarity is not a matrix: {e}") from e
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise SimilarityError(f"similarity must be square, got shape {values.shape}")
        if np.issubdtype(values.dtype, np.integer):
            values = values.astype(np.int64)
            symmetric = np.array_equal(values, values.T)
        else:
            values = values.astype(np.float64)
            symmetric = np.allclose(values, values.T, rtol=0.0, atol=SYMMETRY_TOLERANCE)
        if not symmetric:
            raise SimilarityError("similarity matrix is not symmetric")
        np.fill_diagonal(values, 0)
        values.setflags(write=False)
        self.values = values

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def is_integer(self) -> bool:
        return np.issubdtype(self.values.dtype, np.integer)

    def upper(self) -> np.ndarray:
        """Entries s_ij for i < j in row-major order."""
        return self.values[np.triu_indices(self.n, 1)]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SimilarityMatrix):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    def __repr__(self) -> str:
        return f"SimilarityMatrix(n={self.n}, dtype={self.values.dtype})"


def _signed_pair_counts(n: int, winners: np.ndarray, losers: np.ndarray) -> SimilarityMatrix:
    """+1 for every winning pair, -1 for every losing pair, mirrored to both halves."""
    size = n * n
    plus = np.bincount(winners[:, 0] * n + winners[:, 1], minlength=size)
    minus = np.bincount(losers[:, 0] * n + losers[:, 1], minlength=size)
    half = (plus - minus).astype(np.int64).reshape(n, n)
    return SimilarityMatrix(half + half.T)


def _check_range(rows: np.ndarray, n: int) -> None:
    if len(rows) and (rows.min() < 0 or rows.max() >= n):
        raise SimilarityError(f"comparison index outside 0..{n - 1}")


def adds3(triplets: "TripletSet", n: int | None = None) -> SimilarityMatrix:
    """AddS3: each (i,j,k) adds +1 to s_ij and -1 to s_ik."""
    n = triplets.n if n is None else n
    rows = triplets.array
    _check_range(rows, n)
    return _signed_pair_counts(n, rows[:, [0, 1]], rows[:, [0, 2]])


def adds4(quadruplets: "QuadrupletSet", n: int | None = None) -> SimilarityMatrix:
    """AddS4: each (i,j,k,l) adds +1 to s_ij and -1 to s_kl."""
    n = quadruplets.n if n is None else n
    rows = quadruplets.array
    _check_range(rows, n)
    return _signed_pair_counts(n, rows[:, [0, 1]], rows[:, [2, 3]])


def latent_adds3(tree: "Dendrogram") -> SimilarityMatrix:
    """AddS3 of the complete triplet set of `tree`: 2n + 2 - 3|H(i v j)|."""
    return SimilarityMatrix(2 * tree.n + 2 - 3 * tree.lca_sizes)


def cosine(embedding: np.ndarray) -> SimilarityMatrix:
    x = np.asarray(embedding, dtype=np.float64)
    if x.ndim != 2:
        raise SimilarityError(f"embedding must be a matrix, got shape {x.shape}")
    zero = np.flatnonzero(np.linalg.norm(x, axis=1) == 0)
    if len(zero):
        raise SimilarityError(f"embedding row {int(zero[0])} has zero norm")
    return SimilarityMatrix(cosine_similarity(x))


def format_similarity(similarity: SimilarityMatrix) -> str:
    fmt = "{:d}" if similarity.is_integer else "{!r}"
    return "".join(
        ",".join(fmt.format(v.item()) for v in row) + "\n" for row in similarity.values
    )


def read_similarity(path: Path | str) -> SimilarityMatrix:
    text = read_text(path)
    try:
        values = np.loadtxt(text.splitlines(), delimiter=",", dtype=np.float64, ndmin=2)
    except ValueError as e:
        raise FormatError(f"{path}: {e}") from e
    if "." not in text and "e" not in text.lower():
        values = values.astype(np.int64)
    try:
        return SimilarityMatrix(values)
    except SimilarityError as e:
        raise FormatError(f"{path}: {e}") from e


def write_similarity(path: Path | str, similarity: SimilarityMatrix) -> None:
    Path(path).write_text(format_similarity(similarity), encoding="utf-8")


def read_embedding(path: Path | str) -> np.ndarray:
    lines = read_text(path).splitlines()
    try:
        return np.loadtxt(lines, delimiter=",", dtype=np.float64, ndmin=2)
    except ValueError as e:
        raise FormatError(f"{path}: {e}") from e
