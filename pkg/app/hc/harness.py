"""Experiment orchestration: planted sweeps, latent recovery curves, result files."""

import csv
import io
import time
from collections import defaultdict
from collections.abc import Callable, Iterable, Iterator, Sequence
from concurrent.futures import ProcessPoolExecutor
from itertools import product
from pathlib import Path

import numpy as np
import structlog
from dotenv import dotenv_values
from scipy.stats import kendalltau, spearmanr

from app.core.config import settings
from app.core.errors import ComparisonError, ExperimentError
from app.core.logging import configure_logging
from app.hc.comparisons import (
    flip_noise,
    sample_pairs_bernoulli,
    sample_uniform,
    triplets_from_tree,
)
from app.hc.dendrogram import random_tree
from app.hc.evaluation import aari
from app.hc.linkage import average_linkage
from app.hc.objective import latent_trev_closed_form, qrev, trev
from app.hc.oracle import brute_force_max_trev
from app.hc.planted import planted_similarity
from app.hc.similarity import adds3, adds4
from app.hc.textio import read_text
from app.schemas.experiment import (
    RESULT_COLUMNS,
    ExperimentConfig,
    ExperimentKind,
    Method,
    ResultRow,
)
from app.schemas.params import NoiseParams, PlantedParams, SamplingParams

log = structlog.get_logger()


def trial_seed(base_seed: int, trial: int) -> int:
    return base_seed + trial


class _Stopwatch:
    def __init__(self, enabled: bool):
        self.enabled = enabled
        self.started = 0.0

    def start(self) -> None:
        self.started = time.perf_counter()

    def elapsed_ms(self) -> float | None:
        if not self.enabled:
            return None
        return round((time.perf_counter() - self.started) * 1000, 3)


def _planted_trial(
    config: ExperimentConfig, separation: float, multiplier: float, trial: int
) -> list[ResultRow]:
    seed = trial_seed(config.seed, trial)
    rng = np.random.default_rng(seed)
    params = PlantedParams(
        n0=config.n0,
        levels=config.levels,
        mu=config.mu,
        sigma=config.sigma,
        separation=separation,
        seed=seed,
    )
    with structlog.contextvars.bound_contextvars(
        experiment=config.experiment.value, trial=trial, seed=seed
    ):
        similarity, truth = planted_similarity(params, rng)
        n = params.n
        budget = round(multiplier * n * n)
        noise = NoiseParams(flip_prob=config.flip_prob)

        try:
            triplets = flip_noise(sample_uniform(similarity, budget, rng, "triplet"), noise, rng)
            quadruplets = None
            if Method.ADDS4_AL in config.methods:
                quadruplets = flip_noise(
                    sample_uniform(similarity, budget, rng, "quadruplet"), noise, rng
                )
        except ComparisonError as e:
            raise ExperimentError(f"infeasible budget {budget} for n={n}: {e}") from e

        rows = []
        clock = _Stopwatch(config.timing)
        for method in config.methods:
            clock.start()
            if method == Method.ADDS4_AL:
                tree = average_linkage(adds4(quadruplets))
                revenue, kind, count = qrev(tree, quadruplets), "quadruplet", len(quadruplets)
            else:
                source = adds3(triplets) if method == Method.ADDS3_AL else similarity
                tree = average_linkage(source)
                revenue, kind, count = trev(tree, triplets), "triplet", len(triplets)
            rows.append(
                ResultRow(
                    experiment=config.experiment,
                    method=method,
                    n=n,
                    param=separation,
                    num_comparisons=count,
                    flip_prob=config.flip_prob,
                    trial=trial,
                    seed=seed,
                    revenue=revenue,
                    revenue_kind=kind,
                    aari=aari(tree, truth, config.levels) if config.levels >= 1 else None,
                    wall_ms=clock.elapsed_ms(),
                )
            )
        log.info("planted trial done", separation=separation, budget=budget)
    return rows


def _recovery_trial(config: ExperimentConfig, p: float, trial: int) -> list[ResultRow]:
    seed = trial_seed(config.seed, trial)
    rng = np.random.default_rng(seed)
    with structlog.contextvars.bound_contextvars(
        experiment=config.experiment.value, trial=trial, seed=seed
    ):
        latent = random_tree(config.n, rng)
        t0 = triplets_from_tree(latent)
        observed = sample_pairs_bernoulli(t0, SamplingParams(p=p), rng)
        observed = flip_noise(observed, NoiseParams(flip_prob=config.flip_prob), rng)
        optimum = latent_trev_closed_form(latent)

        rows = []
        clock = _Stopwatch(config.timing)
        for method in config.methods:
            if method == Method.BRUTE_FORCE and config.n > config.brute_force_max_n:
                continue
            clock.start()
            if method == Method.BRUTE_FORCE:
                tree = brute_force_max_trev(observed, max_n=config.brute_force_max_n).tree
            else:
                tree = average_linkage(adds3(observed))
            revenue = trev(tree, t0)
            rows.append(
                ResultRow(
                    experiment=config.experiment,
                    method=method,
                    n=config.n,
                    param=p,
                    num_comparisons=len(observed),
                    flip_prob=config.flip_prob,
                    trial=trial,
                    seed=seed,
                    revenue=revenue,
                    revenue_kind="triplet",
                    ratio_to_latent=revenue / optimum,
                    wall_ms=clock.elapsed_ms(),
                )
            )
        log.info("recovery trial done", p=p, observed=len(observed))
    return rows


def _run_tasks(
    task: Callable[..., list[ResultRow]], arguments: Sequence[tuple], jobs: int
) -> Iterator[ResultRow]:
    """Run trials, serially or on a process pool, yielding rows in task order."""
    if jobs <= 1 or len(arguments) <= 1:
        for args in arguments:
            yield from task(*args)
        return
    with ProcessPoolExecutor(
        max_workers=min(jobs, len(arguments)),
        initializer=configure_logging,
        initargs=(settings.LOG_LEVEL,),
    ) as pool:
        for rows in pool.map(task, *zip(*arguments)):
            yield from rows


def run_planted_sweep(config: ExperimentConfig, jobs: int | None = None) -> Iterator[ResultRow]:
    """Planted similarities -> sampled comparisons -> AddS/AL trees, one row per method."""
    if config.experiment != ExperimentKind.PLANTED_SWEEP:
        raise ExperimentError(f"{config.experiment.value} is not a planted sweep")
    arguments = [
        (config, separation, multiplier, trial)
        for separation, multiplier, trial in product(
            config.separations, config.multipliers, range(config.trials)
        )
    ]
    return _run_tasks(_planted_trial, arguments, jobs or settings.JOBS)


def run_latent_recovery(config: ExperimentConfig, jobs: int | None = None) -> Iterator[ResultRow]:
    """Random latent tree -> Bernoulli pair sample (+ flips) -> AddS3-AL, scored on T0."""
    if config.experiment == ExperimentKind.PLANTED_SWEEP:
        raise ExperimentError("planted-sweep configs run through run_planted_sweep")
    arguments = [
        (config, p, trial) for p, trial in product(config.probabilities, range(config.trials))
    ]
    return _run_tasks(_recovery_trial, arguments, jobs or settings.JOBS)


def run_experiment(config: ExperimentConfig, jobs: int | None = None) -> Iterator[ResultRow]:
    if config.experiment == ExperimentKind.PLANTED_SWEEP:
        return run_planted_sweep(config, jobs)
    return run_latent_recovery(config, jobs)


def load_config(path: Path | str | None = None, **overrides) -> ExperimentConfig:
    """Merge a key=value config file with explicit overrides (overrides win)."""
    values: dict = {}
    if path is not None:
        if not Path(path).is_file():
            raise ExperimentError(f"config file {path} does not exist")
        entries = dotenv_values(stream=io.StringIO(read_text(path)))
        values.update({k: v for k, v in entries.items() if v is not None})
    values.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig.model_validate(values)


def _cell(value) -> str:
    if value is None:
        return ""
    if hasattr(value, "value"):
        return str(value.value)
    return repr(value) if isinstance(value, float) else str(value)


def format_results(rows: Iterable[ResultRow]) -> str:
    out = io.StringIO()
    write_results(out, rows)
    return out.getvalue()


def write_results(stream, rows: Iterable[ResultRow]) -> int:
    """Write the fixed-header results CSV; returns the number of rows written."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(RESULT_COLUMNS)
    count = 0
    for row in rows:
        writer.writerow([_cell(getattr(row, column)) for column in RESULT_COLUMNS])
        count += 1
    return count


def read_results(path: Path | str) -> list[ResultRow]:
    reader = csv.DictReader(io.StringIO(read_text(path), newline=""))
    if reader.fieldnames != RESULT_COLUMNS:
        raise ExperimentError(f"{path}: unexpected results header {reader.fieldnames}")
    return [ResultRow.model_validate(record) for record in reader]


def revenue_aari_correlation(rows: Iterable[ResultRow]) -> dict[str, dict[str, float]]:
    """Kendall tau and Spearman rho between revenue and AARI, per method."""
    grouped: dict[str, list[tuple[int, float]]] = defaultdict(list)
    for row in rows:
        if row.aari is not None:
            grouped[row.method.value].append((row.revenue, row.aari))

    summary = {}
    for method, pairs in sorted(grouped.items()):
        if len(pairs) < 3:
            continue
        revenue, score = zip(*pairs)
        summary[method] = {
            "kendall_tau": float(kendalltau(revenue, score).statistic),
            "spearman_rho": float(spearmanr(revenue, score).statistic),
            "count": len(pairs),
        }
    return summary
