"""trev-hc command line.

Every stochastic command takes --seed (default TREVHC_SEED). Exit status is 0 on
success, 2 on usage errors and 1 on runtime errors.
"""

import argparse
import sys
from pathlib import Path

import numpy as np
import orjson
import structlog
from pydantic import ValidationError

from app.core.config import settings
from app.core.errors import TrevHCError
from app.core.logging import configure_logging
from app.hc import comparisons as cmp
from app.hc import dendrogram as dg
from app.hc import evaluation, harness, objective, oracle, planted, similarity
from app.hc.linkage import average_linkage
from app.schemas.experiment import ExperimentKind
from app.schemas.params import NoiseParams, PlantedParams, SamplingParams

log = structlog.get_logger()


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _rng(args: argparse.Namespace) -> np.random.Generator:
    return np.random.default_rng(args.seed)


def _read_comparisons(args: argparse.Namespace) -> cmp.ComparisonSet:
    if getattr(args, "triplets", None):
        return cmp.read_comparisons(args.triplets, "triplet", getattr(args, "n", None))
    return cmp.read_comparisons(args.quadruplets, "quadruplet", getattr(args, "n", None))


# ------------------------------------------------------------------
# Commands
# ------------------------------------------------------------------


def cmd_gen_tree(args: argparse.Namespace) -> None:
    if args.n0 is not None:
        tree = dg.complete_planted_tree(args.n0, args.levels)
    else:
        tree = dg.random_tree(args.n, _rng(args))
    _emit(dg.serialize(tree), args.output)


def cmd_gen_planted(args: argparse.Namespace) -> None:
    params = PlantedParams(
        n0=args.n0,
        levels=args.levels,
        mu=args.mu,
        sigma=args.sigma,
        separation=args.separation,
        seed=args.seed,
    )
    matrix, truth = planted.planted_similarity(params)
    _emit(similarity.format_similarity(matrix), args.similarity)
    if args.tree:
        Path(args.tree).write_text(dg.serialize(truth), encoding="utf-8")


def cmd_triplets(args: argparse.Namespace) -> None:
    if args.tree:
        result = cmp.triplets_from_tree(dg.read_tree(args.tree))
    else:
        result = cmp.triplets_from_similarity(similarity.read_similarity(args.similarity))
    _emit(cmp.format_comparisons(result), args.output)


def cmd_quadruplets(args: argparse.Namespace) -> None:
    result = cmp.quadruplets_from_similarity(similarity.read_similarity(args.similarity))
    _emit(cmp.format_comparisons(result), args.output)


def cmd_sample(args: argparse.Namespace) -> None:
    rng = _rng(args)
    if args.triplets:
        t0 = cmp.read_comparisons(args.triplets, "triplet")
        result = cmp.sample_pairs_bernoulli(t0, SamplingParams(p=args.p), rng)
    else:
        matrix = similarity.read_similarity(args.similarity)
        result = cmp.sample_uniform(matrix, args.count, rng, args.kind)
    _emit(cmp.format_comparisons(result), args.output)


def cmd_noise(args: argparse.Namespace) -> None:
    result = cmp.flip_noise(
        _read_comparisons(args), NoiseParams(flip_prob=args.flip_prob), _rng(args)
    )
    _emit(cmp.format_comparisons(result), args.output)


def cmd_adds3(args: argparse.Namespace) -> None:
    triplets = cmp.read_comparisons(args.triplets, "triplet", args.n)
    _emit(similarity.format_similarity(similarity.adds3(triplets)), args.output)


def cmd_adds4(args: argparse.Namespace) -> None:
    quadruplets = cmp.read_comparisons(args.quadruplets, "quadruplet", args.n)
    _emit(similarity.format_similarity(similarity.adds4(quadruplets)), args.output)


def cmd_cluster(args: argparse.Namespace) -> None:
    if args.similarity:
        matrix = similarity.read_similarity(args.similarity)
    elif args.embedding:
        matrix = similarity.cosine(similarity.read_embedding(args.embedding))
    elif args.triplets:
        matrix = similarity.adds3(cmp.read_comparisons(args.triplets, "triplet", args.n))
    else:
        matrix = similarity.adds4(cmp.read_comparisons(args.quadruplets, "quadruplet", args.n))
    _emit(dg.serialize(average_linkage(matrix)), args.output)


def cmd_revenue(args: argparse.Namespace) -> None:
    tree = dg.read_tree(args.tree)
    comparisons = _read_comparisons(args)
    if isinstance(comparisons, cmp.TripletSet):
        revenue = objective.trev(tree, comparisons)
        consistency = objective.consistency_count(tree, comparisons)
    else:
        revenue = objective.qrev(tree, comparisons)
        consistency = None
    if args.json:
        payload = {
            "revenue": revenue,
            "consistency": consistency,
            "n": tree.n,
            "num_comparisons": len(comparisons),
        }
        _emit(orjson.dumps(payload).decode() + "\n", None)
    else:
        _emit(f"{revenue}\n", None)


def cmd_aari(args: argparse.Namespace) -> None:
    value = evaluation.aari(dg.read_tree(args.tree), dg.read_tree(args.truth), args.levels)
    _emit(f"{value!r}\n", None)


def cmd_cut(args: argparse.Namespace) -> None:
    partition = evaluation.cut_top(dg.read_tree(args.tree), args.k)
    if args.output:
        evaluation.write_partition(args.output, partition)
    else:
        _emit(evaluation.format_partition(partition), None)


def cmd_oracle(args: argparse.Namespace) -> None:
    triplets = cmp.read_comparisons(args.triplets, "triplet", args.n)
    search = (
        oracle.brute_force_max_trev
        if args.objective == "trev"
        else oracle.brute_force_max_consistency
    )
    best = search(triplets, args.n, max_n=args.max_n)
    if args.json:
        payload = {
            "value": best.value,
            "unique": best.unique,
            "n": best.tree.n,
            "merges": [list(m) for m in best.tree.merges],
        }
        _emit(orjson.dumps(payload).decode() + "\n", None)
        return
    _emit(f"value {best.value}\nunique {str(best.unique).lower()}\n", None)
    _emit(dg.serialize(best.tree), None)


def cmd_convert(args: argparse.Namespace) -> None:
    _emit(cmp.format_comparisons(cmp.read_answers(args.input, args.n)), args.output)


def _experiment_overrides(args: argparse.Namespace, names: list[str]) -> dict:
    return {name: getattr(args, name) for name in names if getattr(args, name) is not None}


def _write_rows(config, args: argparse.Namespace) -> None:
    rows = list(harness.run_experiment(config, args.jobs))
    if args.output:
        with open(args.output, "w", newline="", encoding="utf-8") as f:
            harness.write_results(f, rows)
    else:
        harness.write_results(sys.stdout, rows)
    log.info("experiment written", experiment=config.experiment.value, rows=len(rows))


def cmd_sweep(args: argparse.Namespace) -> None:
    overrides = _experiment_overrides(
        args,
        ["methods", "trials", "seed", "flip_prob", "n0", "levels", "mu", "sigma",
         "separations", "multipliers"],
    )
    if args.timing:
        overrides["timing"] = True
    config = harness.load_config(
        args.config, experiment=ExperimentKind.PLANTED_SWEEP.value, **overrides
    )
    _write_rows(config, args)


def cmd_recover(args: argparse.Namespace) -> None:
    overrides = _experiment_overrides(
        args, ["methods", "trials", "seed", "flip_prob", "n", "probabilities", "brute_force_max_n"]
    )
    if args.timing:
        overrides["timing"] = True
    config = harness.load_config(
        args.config, experiment=ExperimentKind.LATENT_RECOVERY.value, **overrides
    )
    if config.flip_prob > 0:
        config = config.model_copy(update={"experiment": ExperimentKind.NOISY_RECOVERY})
    _write_rows(config, args)


def cmd_correlate(args: argparse.Namespace) -> None:
    summary = harness.revenue_aari_correlation(harness.read_results(args.results))
    if args.json:
        _emit(orjson.dumps(summary).decode() + "\n", None)
        return
    for method, stats in summary.items():
        _emit(
            f"{method} kendall_tau={stats['kendall_tau']:.4f} "
            f"spearman_rho={stats['spearman_rho']:.4f} count={stats['count']}\n",
            None,
        )


# ------------------------------------------------------------------
# Parser
# ------------------------------------------------------------------


def _seed(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--seed", type=int, default=settings.SEED, help="RNG seed (default: TREVHC_SEED)"
    )


def _output(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("-o", "--output", help="Output path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trev-hc", description="Comparison-based hierarchical clustering"
    )
    parser.add_argument("--log-level", default=settings.LOG_LEVEL)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-tree", help="Random or planted merge list")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--n0", type=int, default=None, help="Planted ground-cluster size")
    p.add_argument("--levels", type=int, default=0, help="Planted tree height")
    _seed(p)
    _output(p)
    p.set_defaults(func=cmd_gen_tree)

    p = sub.add_parser("gen-planted", help="Planted similarity matrix and its tree")
    p.add_argument("--n0", type=int, default=30)
    p.add_argument("--levels", type=int, default=3)
    p.add_argument("--mu", type=float, default=0.8)
    p.add_argument("--sigma", type=float, default=0.1)
    p.add_argument("--separation", type=float, default=0.15)
    p.add_argument("--similarity", help="Similarity CSV path (default: stdout)")
    p.add_argument("--tree", help="Ground-truth merge list path")
    _seed(p)
    p.set_defaults(func=cmd_gen_planted)

    p = sub.add_parser("triplets", help="T0 of a tree or T_all of a similarity")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--tree")
    source.add_argument("--similarity")
    _output(p)
    p.set_defaults(func=cmd_triplets)

    p = sub.add_parser("quadruplets", help="Q_all of a similarity")
    p.add_argument("--similarity", required=True)
    _output(p)
    p.set_defaults(func=cmd_quadruplets)

    p = sub.add_parser("sample", help="Bernoulli pair sampling or uniform sampling")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--triplets", help="Pair-closed triplet file (Bernoulli sampling)")
    source.add_argument("--similarity", help="Similarity CSV (uniform sampling)")
    p.add_argument("--p", type=float)
    p.add_argument("--count", type=int)
    p.add_argument("--kind", choices=["triplet", "quadruplet"], default="triplet")
    _seed(p)
    _output(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("noise", help="Flip comparisons independently")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--triplets")
    source.add_argument("--quadruplets")
    p.add_argument("--flip-prob", type=float, required=True)
    _seed(p)
    _output(p)
    p.set_defaults(func=cmd_noise)

    for name, flag, func in (
        ("adds3", "--triplets", cmd_adds3),
        ("adds4", "--quadruplets", cmd_adds4),
    ):
        p = sub.add_parser(name, help=f"{name.upper()} similarity CSV")
        p.add_argument(flag, required=True)
        p.add_argument("--n", type=int)
        _output(p)
        p.set_defaults(func=func)

    p = sub.add_parser("cluster", help="Average linkage merge list")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--similarity")
    source.add_argument("--embedding", help="Embedding CSV, clustered on cosine similarity")
    source.add_argument("--triplets")
    source.add_argument("--quadruplets")
    p.add_argument("--adds3", action="store_true", help="Required with --triplets")
    p.add_argument("--adds4", action="store_true", help="Required with --quadruplets")
    p.add_argument("--n", type=int)
    _output(p)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("revenue", help="Trev or Qrev of a tree")
    p.add_argument("--tree", required=True)
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--triplets")
    source.add_argument("--quadruplets")
    p.add_argument("--n", type=int)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_revenue)

    p = sub.add_parser("aari", help="Averaged ARI over the top levels")
    p.add_argument("--tree", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--levels", type=int, required=True)
    p.set_defaults(func=cmd_aari)

    p = sub.add_parser("cut", help="Partition file of the k-cluster cut")
    p.add_argument("--tree", required=True)
    p.add_argument("--k", type=int, required=True)
    _output(p)
    p.set_defaults(func=cmd_cut)

    p = sub.add_parser("oracle", help="Brute-force maximizer over all trees")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--triplets", required=True)
    p.add_argument("--objective", choices=["trev", "consistency"], default="trev")
    p.add_argument("--max-n", type=int, default=None, help="Override TREVHC_ORACLE_MAX_N")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("convert", help="Crowd answers CSV to triplets")
    p.add_argument("--input", required=True)
    p.add_argument("--n", type=int)
    _output(p)
    p.set_defaults(func=cmd_convert)

    for name, func in (("sweep", cmd_sweep), ("recover", cmd_recover)):
        p = sub.add_parser(name, help=f"Run the {name} experiment into a results CSV")
        p.add_argument("--config", help="key=value config file")
        p.add_argument("--methods")
        p.add_argument("--trials", type=int)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--flip-prob", type=float)
        p.add_argument("--jobs", type=int, default=settings.JOBS)
        p.add_argument("--timing", action="store_true", help="Fill wall_ms")
        _output(p)
        p.set_defaults(func=func)
        if name == "sweep":
            p.add_argument("--n0", type=int)
            p.add_argument("--levels", type=int)
            p.add_argument("--mu", type=float)
            p.add_argument("--sigma", type=float)
            p.add_argument("--separations")
            p.add_argument("--multipliers")
        else:
            p.add_argument("--n", type=int)
            p.add_argument("--probabilities")
            p.add_argument("--brute-force-max-n", type=int)

    p = sub.add_parser("correlate", help="Revenue/AARI rank correlation of sweep results")
    p.add_argument("--results", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_correlate)

    return parser


def _check_usage(parser: argparse.ArgumentParser, args: argparse.Namespace) -> None:
    if args.command == "gen-tree" and (args.n is None) == (args.n0 is None):
        parser.error("gen-tree needs exactly one of --n or --n0")
    if args.command == "cluster":
        if args.triplets and not args.adds3:
            parser.error("--triplets clustering needs --adds3")
        if args.quadruplets and not args.adds4:
            parser.error("--quadruplets clustering needs --adds4")
    if args.command == "sample":
        if args.triplets and args.p is None:
            parser.error("--triplets sampling needs --p")
        if args.similarity and args.count is None:
            parser.error("--similarity sampling needs --count")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _check_usage(parser, args)
    except SystemExit as e:
        return int(e.code or 0)

    configure_logging(args.log_level)
    try:
        args.func(args)
    except (TrevHCError, ValidationError, OSError) as e:
        log.error("command failed", command=args.command, error=str(e))
        return 1
    return 0


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
