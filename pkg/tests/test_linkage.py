import numpy as np
import pytest

from app.hc.comparisons import sample_uniform, triplets_from_tree
from app.hc.dendrogram import Dendrogram, is_isomorphic, random_tree
from app.hc.evaluation import cut_top
from app.hc.linkage import average_linkage
from app.hc.objective import trev
from app.hc.similarity import SimilarityMatrix, adds3, latent_adds3


def _random_similarity(n, rng):
    upper = np.triu(rng.random((n, n)), 1)
    return SimilarityMatrix(upper + upper.T)


def _relabel(tree, perm):
    """Same topology with leaf i renamed perm[i]."""
    n = tree.n
    rename = [int(perm[i]) for i in range(n)] + list(range(n, 2 * n - 1))
    return Dendrogram(n, [(rename[a], rename[b]) for a, b in tree.merges])


def test_closest_pair_merges_first():
    s = SimilarityMatrix(np.array([[0, 2, -1], [2, 0, -1], [-1, -1, 0]]))
    assert average_linkage(s).merges == ((0, 1), (3, 2))


def test_ties_break_toward_smallest_slots():
    tree = average_linkage(SimilarityMatrix(np.ones((5, 5), dtype=np.int64)))
    assert tree.merges == ((0, 1), (5, 2), (6, 3), (7, 4))


def test_single_object():
    assert average_linkage(SimilarityMatrix(np.zeros((1, 1)))).n == 1


def test_two_blocks_split_at_the_root():
    values = np.zeros((6, 6), dtype=np.int64)
    values[:3, :3] = 1
    values[3:, 3:] = 1
    tree = average_linkage(SimilarityMatrix(values))
    assert cut_top(tree, 2).labels == [0, 0, 0, 1, 1, 1]


def test_latent_similarity_recovers_the_tree(rng):
    for n in (3, 10, 40):
        tree = random_tree(n, rng)
        assert is_isomorphic(average_linkage(latent_adds3(tree)), tree)


def test_permutation_equivariance(rng):
    for n in (5, 12, 30):
        s = _random_similarity(n, rng)
        perm = rng.permutation(n)
        permuted = np.empty_like(s.values)
        permuted[np.ix_(perm, perm)] = s.values
        expected = _relabel(average_linkage(s), perm)
        assert is_isomorphic(average_linkage(SimilarityMatrix(permuted)), expected)


@pytest.mark.parametrize("shift", [-10, -3, 1, 4, 10])
def test_shift_invariance_with_ties(shift, rng):
    for n in (6, 15, 30):
        triplets = sample_uniform(_random_similarity(n, rng), n * n, rng)
        s = adds3(triplets)
        shifted = SimilarityMatrix(s.values + shift)
        assert is_isomorphic(average_linkage(shifted), average_linkage(s))


def test_adds3_linkage_never_loses_revenue(rng):
    for _ in range(200):
        n = int(rng.integers(3, 26))
        source = _random_similarity(n, rng)
        budget = int(rng.integers(1, n * (n - 1) * (n - 2) // 2 + 1))
        triplets = sample_uniform(source, budget, rng)
        assert trev(average_linkage(adds3(triplets)), triplets) >= 0


def test_output_is_a_valid_tree(rng):
    s = adds3(triplets_from_tree(random_tree(25, rng)))
    tree = average_linkage(s)
    assert tree.n == 25
    assert len(tree.merges) == 24
