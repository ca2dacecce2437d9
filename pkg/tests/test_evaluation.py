import numpy as np
import pytest
from pydantic import ValidationError

from app.core.errors import DendrogramError, FormatError
from app.hc.dendrogram import Dendrogram, complete_planted_tree, random_tree
from app.hc.evaluation import aari, ari, cut_top, read_partition, write_partition
from app.schemas.evaluation import Partition


def test_cut_extremes(rng):
    tree = random_tree(9, rng)
    assert cut_top(tree, 1).labels == [0] * 9
    assert cut_top(tree, 9).labels == list(range(9))


def test_cut_caterpillar():
    tree = Dendrogram(4, [(0, 1), (4, 2), (5, 3)])
    assert cut_top(tree, 2).labels == [0, 0, 0, 1]
    assert cut_top(tree, 3).labels == [0, 0, 1, 2]


def test_cut_out_of_range(caterpillar):
    with pytest.raises(DendrogramError):
        cut_top(caterpillar, 0)
    with pytest.raises(DendrogramError):
        cut_top(caterpillar, 4)


def test_cuts_refine_each_other(rng):
    tree = random_tree(30, rng)
    for k in range(1, 30):
        coarse, fine = cut_top(tree, k).labels, cut_top(tree, k + 1).labels
        parent = {}
        for c, f in zip(coarse, fine):
            assert parent.setdefault(f, c) == c


def test_cut_of_planted_tree_finds_ground_clusters():
    tree = complete_planted_tree(5, 2)
    assert cut_top(tree, 4).labels == [c for c in range(4) for _ in range(5)]
    assert cut_top(tree, 2).labels == [0] * 10 + [1] * 10


def test_ari_basics():
    same = Partition(labels=[0, 0, 1, 1])
    assert ari(same, Partition(labels=[1, 1, 0, 0])) == pytest.approx(1.0)
    assert ari(same, Partition(labels=[0, 1, 2, 3])) == pytest.approx(0.0)


def test_ari_is_symmetric(rng):
    first = Partition(labels=[0, 1, 2] + rng.integers(0, 3, size=47).tolist())
    second = Partition(labels=[0, 1, 2, 3] + rng.integers(0, 4, size=46).tolist())
    assert ari(first, second) == pytest.approx(ari(second, first))


def test_ari_of_random_labelings_is_near_zero(rng):
    scores = []
    for _ in range(100):
        first = Partition(labels=list(range(5)) + rng.integers(0, 5, size=195).tolist())
        second = Partition(labels=list(range(5)) + rng.integers(0, 5, size=195).tolist())
        scores.append(ari(first, second))
    assert abs(np.mean(scores)) < 0.05


def test_ari_length_mismatch():
    with pytest.raises(DendrogramError):
        ari(Partition(labels=[0, 1]), Partition(labels=[0, 1, 0]))


def test_aari_of_identical_trees():
    truth = complete_planted_tree(2, 2)
    assert aari(truth, truth, 2) == pytest.approx(1.0)


def test_aari_ignores_order_inside_ground_clusters():
    truth = complete_planted_tree(2, 2)
    swapped = Dendrogram(8, [(1, 0), *truth.merges[1:]])
    assert aari(swapped, truth, 2) == pytest.approx(1.0)


def test_aari_of_a_wrong_tree_is_below_one():
    truth = complete_planted_tree(4, 2)
    other = Dendrogram(16, [(0, 1)] + [(16 + t, t + 2) for t in range(14)])
    assert aari(other, truth, 2) < 1.0


def test_aari_level_bounds(caterpillar):
    with pytest.raises(DendrogramError):
        aari(caterpillar, caterpillar, 2)
    with pytest.raises(DendrogramError):
        aari(caterpillar, caterpillar, 0)


def test_partition_labels_must_be_dense():
    with pytest.raises(ValidationError):
        Partition(labels=[0, 2])
    assert Partition(labels=[1, 0, 1]).num_clusters == 2


def test_partition_file(tmp_path):
    path = tmp_path / "labels.txt"
    write_partition(path, Partition(labels=[0, 1, 1]))
    assert path.read_text() == "0\n1\n1\n"
    assert read_partition(path).labels == [0, 1, 1]
    path.write_text("0\nx\n")
    with pytest.raises(FormatError):
        read_partition(path)
    path.write_bytes(b"0\n\xff\n")
    with pytest.raises(FormatError):
        read_partition(path)
