import numpy as np
import pytest
from pydantic import ValidationError

from app.core.errors import ExperimentError
from app.hc.comparisons import triplets_from_similarity
from app.hc.evaluation import aari
from app.hc.harness import (
    format_results,
    load_config,
    read_results,
    revenue_aari_correlation,
    run_experiment,
    run_latent_recovery,
    run_planted_sweep,
    trial_seed,
    write_results,
)
from app.hc.linkage import average_linkage
from app.hc.planted import planted_similarity
from app.hc.similarity import adds3
from app.schemas.experiment import (
    RESULT_COLUMNS,
    ExperimentConfig,
    ExperimentKind,
    Method,
    ResultRow,
)
from app.schemas.params import PlantedParams


def _small_sweep(**overrides):
    values = {
        "experiment": "planted-sweep",
        "methods": "adds3-al,adds4-al,cosine-al",
        "trials": 2,
        "seed": 5,
        "n0": 4,
        "levels": 2,
        "separations": "0.15",
        "multipliers": "2",
    }
    values.update(overrides)
    return ExperimentConfig.model_validate(values)


def _small_recovery(**overrides):
    values = {
        "experiment": "latent-recovery",
        "methods": "adds3-al,brute-force",
        "trials": 2,
        "seed": 1,
        "n": 6,
        "probabilities": "0.5,1.0",
    }
    values.update(overrides)
    return ExperimentConfig.model_validate(values)


def test_trial_seed():
    assert trial_seed(10, 0) == 10
    assert trial_seed(10, 3) == 13


def test_planted_sweep_rows():
    rows = list(run_planted_sweep(_small_sweep()))
    assert len(rows) == 6
    assert {row.method for row in rows} == {Method.ADDS3_AL, Method.ADDS4_AL, Method.COSINE_AL}
    assert [row.trial for row in rows] == [0, 0, 0, 1, 1, 1]
    for row in rows:
        assert row.n == 16
        assert row.num_comparisons == 2 * 16 * 16
        assert row.wall_ms is None
        assert -1.0 <= row.aari <= 1.0
    kinds = {row.method: row.revenue_kind for row in rows}
    assert kinds[Method.ADDS4_AL] == "quadruplet"
    assert kinds[Method.ADDS3_AL] == "triplet"


def test_results_are_reproducible():
    first = format_results(run_planted_sweep(_small_sweep()))
    second = format_results(run_planted_sweep(_small_sweep()))
    assert first == second


def test_results_do_not_depend_on_worker_count():
    serial = format_results(run_planted_sweep(_small_sweep(), jobs=1))
    pooled = format_results(run_planted_sweep(_small_sweep(), jobs=8))
    assert serial == pooled


def test_timing_fills_wall_clock():
    rows = list(run_planted_sweep(_small_sweep(trials=1, timing=True)))
    assert all(row.wall_ms is not None and row.wall_ms >= 0 for row in rows)


def test_infeasible_budget_is_reported():
    with pytest.raises(ExperimentError):
        list(run_planted_sweep(_small_sweep(n0=2, levels=1, multipliers="100")))


def test_noiseless_planted_pipeline_is_exact():
    params = PlantedParams(n0=4, levels=2, sigma=0.0)
    similarity, truth = planted_similarity(params)
    tree = average_linkage(adds3(triplets_from_similarity(similarity)))
    assert aari(tree, truth, 2) == pytest.approx(1.0)


def test_latent_recovery_rows():
    rows = list(run_latent_recovery(_small_recovery()))
    assert len(rows) == 8
    assert all(row.revenue_kind == "triplet" for row in rows)
    assert all(row.aari is None for row in rows)
    full = [row for row in rows if row.param == 1.0 and row.method == Method.BRUTE_FORCE]
    assert [row.ratio_to_latent for row in full] == [1.0, 1.0]


def test_brute_force_is_skipped_above_its_cap():
    rows = list(run_latent_recovery(_small_recovery(n=9, brute_force_max_n=7)))
    assert {row.method for row in rows} == {Method.ADDS3_AL}


def test_noisy_recovery_records_flip_probability():
    config = _small_recovery(experiment="noisy-recovery", flip_prob=0.1, methods="adds3-al")
    rows = list(run_experiment(config))
    assert all(row.flip_prob == 0.1 for row in rows)
    assert all(row.experiment == ExperimentKind.NOISY_RECOVERY for row in rows)


def test_runners_check_the_experiment_kind():
    with pytest.raises(ExperimentError):
        run_planted_sweep(_small_recovery())
    with pytest.raises(ExperimentError):
        run_latent_recovery(_small_sweep())


def test_config_validation():
    with pytest.raises(ValidationError):
        _small_recovery(probabilities="0.0")
    with pytest.raises(ValidationError):
        _small_recovery(methods="cosine-al")
    with pytest.raises(ValidationError):
        _small_sweep(methods="brute-force")
    with pytest.raises(ValidationError):
        _small_sweep(separations="0.1,-0.2")
    with pytest.raises(ValidationError):
        _small_sweep(trials=0)


def test_load_config_file(tmp_path):
    path = tmp_path / "sweep.env"
    path.write_text("experiment=planted-sweep\ntrials=3\nseparations=0.1,0.2\nmethods=adds3-al\n")
    config = load_config(path, trials=4)
    assert config.trials == 4
    assert config.separations == [0.1, 0.2]
    assert config.methods == [Method.ADDS3_AL]
    with pytest.raises(ExperimentError):
        load_config(tmp_path / "missing.env")


def test_results_file_round_trip(tmp_path):
    rows = list(run_planted_sweep(_small_sweep(trials=1)))
    path = tmp_path / "results.csv"
    with open(path, "w", newline="", encoding="utf-8") as f:
        assert write_results(f, rows) == 3
    assert path.read_text().splitlines()[0] == ",".join(RESULT_COLUMNS)
    assert read_results(path) == rows


def test_read_results_checks_the_header(tmp_path):
    path = tmp_path / "results.csv"
    path.write_text("method,revenue\nadds3-al,1\n")
    with pytest.raises(ExperimentError):
        read_results(path)


def _row(method, revenue, score):
    return ResultRow(
        experiment=ExperimentKind.PLANTED_SWEEP,
        method=method,
        n=16,
        param=0.15,
        num_comparisons=10,
        flip_prob=0.0,
        trial=0,
        seed=0,
        revenue=revenue,
        revenue_kind="triplet",
        aari=score,
    )


def test_revenue_aari_correlation():
    rows = [_row(Method.ADDS3_AL, r, r / 10) for r in range(1, 6)]
    rows += [_row(Method.COSINE_AL, r, (6 - r) / 10) for r in range(1, 6)]
    rows.append(_row(Method.ADDS4_AL, 1, 0.5))
    summary = revenue_aari_correlation(rows)
    assert set(summary) == {"adds3-al", "cosine-al"}
    assert summary["adds3-al"]["kendall_tau"] == pytest.approx(1.0)
    assert summary["cosine-al"]["spearman_rho"] == pytest.approx(-1.0)
    assert summary["adds3-al"]["count"] == 5


@pytest.mark.slow
def test_adds3_recovers_most_latent_revenue():
    n, p = 64, 0.5
    config = _small_recovery(n=n, probabilities=str(p), trials=200, methods="adds3-al")
    rows = list(run_latent_recovery(config, jobs=4))
    assert np.mean([row.ratio_to_latent for row in rows]) >= 0.9
    sizes = np.array([row.num_comparisons for row in rows])
    inside = (sizes >= 0.1 * p * n**3) & (sizes <= 0.5 * p * n**3)
    assert inside.mean() >= 0.99


@pytest.mark.slow
def test_planted_sweep_at_full_budget():
    """Default planted model, separation 0.15 and 16 n^2 sampled triplets."""
    config = ExperimentConfig(
        experiment=ExperimentKind.PLANTED_SWEEP,
        methods=[Method.ADDS3_AL],
        trials=10,
        seed=0,
        multipliers=[16.0],
    )
    rows = list(run_planted_sweep(config, jobs=4))
    assert len(rows) == 10
    assert all(row.num_comparisons == 16 * 240 * 240 for row in rows)
    assert np.mean([row.revenue for row in rows]) == pytest.approx(7.347e7, rel=0.01)
    assert abs(np.mean([row.aari for row in rows]) - 0.937) <= 0.08


@pytest.mark.slow
def test_aari_grows_with_signal_to_noise():
    separations = [round(0.02 * step, 2) for step in range(1, 11)]
    config = ExperimentConfig(
        experiment=ExperimentKind.PLANTED_SWEEP,
        methods=[Method.ADDS3_AL],
        trials=3,
        seed=0,
        separations=separations,
        multipliers=[4.0],
    )
    rows = list(run_planted_sweep(config, jobs=4))
    means = [np.mean([row.aari for row in rows if row.param == s]) for s in separations]
    inversions = sum(later < earlier for earlier, later in zip(means, means[1:]))
    assert inversions <= 1
