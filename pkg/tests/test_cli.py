import numpy as np
import orjson
import pytest

from app.cli import main
from app.hc.comparisons import read_comparisons, triplets_from_tree
from app.hc.dendrogram import parse, random_tree, serialize
from app.hc.linkage import average_linkage
from app.hc.objective import trev
from app.hc.similarity import adds3, read_similarity


def _run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_help_exits_cleanly(capsys):
    assert _run(capsys, "--help")[0] == 0
    assert _run(capsys, "cluster", "--help")[0] == 0


def test_usage_errors(capsys):
    assert _run(capsys, "no-such-command")[0] == 2
    assert _run(capsys, "gen-tree")[0] == 2
    assert _run(capsys, "gen-tree", "--n", "4", "--n0", "2")[0] == 2
    assert _run(capsys, "cluster", "--triplets", "t.txt")[0] == 2
    assert _run(capsys, "sample", "--triplets", "t.txt")[0] == 2
    assert _run(capsys, "sample", "--similarity", "s.csv", "--kind", "quadruplet")[0] == 2


def test_runtime_errors(tmp_path, capsys):
    broken = tmp_path / "tree.txt"
    broken.write_text("n 3\n0 1\n")
    triplets = tmp_path / "t.txt"
    triplets.write_text("0 1 2\n")
    assert _run(capsys, "revenue", "--tree", str(broken), "--triplets", str(triplets))[0] == 1
    missing = str(tmp_path / "missing")
    assert _run(capsys, "revenue", "--tree", missing, "--triplets", str(triplets))[0] == 1
    assert _run(capsys, "gen-tree", "--n", "0")[0] == 1


def test_malformed_text_is_a_runtime_error(tmp_path, capsys):
    triplets = tmp_path / "t.txt"
    triplets.write_text("0 1 2\n")
    undecodable = tmp_path / "undecodable.txt"
    undecodable.write_bytes(b"n 3\n0 \xff1\n3 2\n")
    superscript = tmp_path / "superscript.txt"
    superscript.write_text("n \u00b2\n0 1\n", encoding="utf-8")
    for tree in (undecodable, superscript):
        assert _run(capsys, "revenue", "--tree", str(tree), "--triplets", str(triplets))[0] == 1
    tree = tmp_path / "tree.txt"
    tree.write_text("n 3\n0 1\n3 2\n")
    assert _run(capsys, "revenue", "--tree", str(tree), "--triplets", str(undecodable))[0] == 1
    assert _run(capsys, "adds3", "--triplets", str(undecodable))[0] == 1


def test_gen_tree_is_seeded(capsys):
    first = _run(capsys, "gen-tree", "--n", "12", "--seed", "4")[1]
    second = _run(capsys, "gen-tree", "--n", "12", "--seed", "4")[1]
    assert first == second
    assert parse(first) == random_tree(12, np.random.default_rng(4))


def test_gen_planted_tree(capsys):
    code, out = _run(capsys, "gen-tree", "--n0", "2", "--levels", "2")
    assert code == 0
    assert parse(out).n == 8


def test_pipeline_matches_library(tmp_path, capsys):
    tree_path = tmp_path / "tree.txt"
    t0_path = tmp_path / "t0.txt"
    sample_path = tmp_path / "sample.txt"
    s_path = tmp_path / "s.csv"
    out_path = tmp_path / "al.txt"

    assert _run(capsys, "gen-tree", "--n", "15", "--seed", "2", "-o", str(tree_path))[0] == 0
    assert _run(capsys, "triplets", "--tree", str(tree_path), "-o", str(t0_path))[0] == 0
    code, _ = _run(
        capsys, "sample", "--triplets", str(t0_path), "--p", "0.4", "--seed", "3",
        "-o", str(sample_path),
    )
    assert code == 0
    assert _run(capsys, "adds3", "--triplets", str(sample_path), "-o", str(s_path))[0] == 0
    code, _ = _run(
        capsys, "cluster", "--triplets", str(sample_path), "--adds3", "-o", str(out_path)
    )
    assert code == 0
    code, out = _run(capsys, "revenue", "--tree", str(out_path), "--triplets", str(sample_path))
    assert code == 0

    sample = read_comparisons(sample_path)
    assert sample.n == 15
    assert read_similarity(s_path) == adds3(sample)
    expected_tree = average_linkage(adds3(sample))
    assert out_path.read_text() == serialize(expected_tree)
    assert int(out) == trev(expected_tree, sample)


def test_revenue_json(tmp_path, capsys):
    tree = random_tree(6, np.random.default_rng(0))
    tree_path = tmp_path / "tree.txt"
    tree_path.write_text(serialize(tree))
    t0_path = tmp_path / "t0.txt"
    _run(capsys, "triplets", "--tree", str(tree_path), "-o", str(t0_path))
    code, out = _run(
        capsys, "revenue", "--tree", str(tree_path), "--triplets", str(t0_path), "--json"
    )
    assert code == 0
    payload = orjson.loads(out)
    t0 = triplets_from_tree(tree)
    assert payload["revenue"] == trev(tree, t0)
    assert payload["consistency"] == len(t0)
    assert payload["num_comparisons"] == len(t0)


def test_oracle_command(tmp_path, capsys):
    triplets = tmp_path / "t.txt"
    triplets.write_text("0 1 2\n1 0 2\n")
    code, out = _run(capsys, "oracle", "--n", "3", "--triplets", str(triplets), "--json")
    assert code == 0
    payload = orjson.loads(out)
    assert payload["value"] == 2
    assert payload["unique"] is True

    assert _run(capsys, "oracle", "--n", "3", "--triplets", str(triplets), "--max-n", "2")[0] == 1


def test_cut_and_aari(tmp_path, capsys):
    truth = tmp_path / "truth.txt"
    _run(capsys, "gen-tree", "--n0", "3", "--levels", "2", "-o", str(truth))
    code, out = _run(capsys, "cut", "--tree", str(truth), "--k", "4")
    assert code == 0
    assert out.split() == [str(c) for c in range(4) for _ in range(3)]
    labels = tmp_path / "labels.txt"
    assert _run(capsys, "cut", "--tree", str(truth), "--k", "4", "-o", str(labels))[0] == 0
    assert labels.read_text() == out
    code, out = _run(capsys, "aari", "--tree", str(truth), "--truth", str(truth), "--levels", "2")
    assert code == 0
    assert float(out) == pytest.approx(1.0)


def test_convert(tmp_path, capsys):
    answers = tmp_path / "answers.csv"
    answers.write_text("i,j,k,oddout\n0,1,2,2\n")
    code, out = _run(capsys, "convert", "--input", str(answers))
    assert code == 0
    assert out == "# n 3\n0 1 2\n1 0 2\n"


def test_planted_and_uniform_sampling(tmp_path, capsys):
    s_path = tmp_path / "s.csv"
    truth = tmp_path / "truth.txt"
    code, _ = _run(
        capsys, "gen-planted", "--n0", "3", "--levels", "2", "--similarity", str(s_path),
        "--tree", str(truth),
    )
    assert code == 0
    code, out = _run(capsys, "sample", "--similarity", str(s_path), "--count", "50", "--seed", "1")
    assert code == 0
    assert len(out.splitlines()) == 51
    code, out = _run(
        capsys, "sample", "--similarity", str(s_path), "--count", "50", "--kind", "quadruplet"
    )
    assert code == 0
    assert len(out.splitlines()[1].split()) == 4


def test_sweep_is_identical_across_jobs(tmp_path, capsys):
    args = [
        "sweep", "--n0", "4", "--levels", "2", "--trials", "2", "--seed", "9",
        "--multipliers", "2", "--methods", "adds3-al,cosine-al",
    ]
    serial = tmp_path / "serial.csv"
    pooled = tmp_path / "pooled.csv"
    assert _run(capsys, *args, "--jobs", "1", "-o", str(serial))[0] == 0
    assert _run(capsys, *args, "--jobs", "8", "-o", str(pooled))[0] == 0
    assert serial.read_bytes() == pooled.read_bytes()

    code, out = _run(capsys, "correlate", "--results", str(serial), "--json")
    assert code == 0
    assert set(orjson.loads(out)) <= {"adds3-al", "cosine-al"}


def test_recover_with_noise(capsys):
    code, out = _run(
        capsys, "recover", "--n", "6", "--trials", "1", "--probabilities", "1.0",
        "--methods", "adds3-al,brute-force", "--flip-prob", "0.1",
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("experiment,method,n,param")
    assert all(line.startswith("noisy-recovery,") for line in lines[1:])
    assert len(lines) == 3


def test_invalid_experiment_config(capsys):
    assert _run(capsys, "recover", "--probabilities", "0")[0] == 1
