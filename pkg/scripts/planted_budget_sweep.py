#!/usr/bin/env python3
"""
Run the fixed signal-to-noise planted sweep (n=240, separation/sigma = 1.5)
over the triplet budgets 16n^2 down to n^2 and print per-budget means.
Run from the project root:
  poetry run python scripts/planted_budget_sweep.py
  PYTHONPATH=. python scripts/planted_budget_sweep.py -o planted_budget.csv --jobs 4
"""
import argparse
import sys
from collections import defaultdict
from pathlib import Path
from statistics import mean, stdev

# Ensure project root is on path when running script directly
ROOT = Path(__file__).resolve().parent.parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from app.core.logging import configure_logging
from app.hc.harness import load_config, run_planted_sweep, write_results


def main() -> None:
    parser = argparse.ArgumentParser(description="Planted sweep over triplet budgets at a fixed signal-to-noise ratio")
    parser.add_argument(
        "-o",
        "--output",
        default="planted_budget.csv",
        help="Results CSV path (default: planted_budget.csv)",
    )
    parser.add_argument("--trials", type=int, default=10)
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--methods", default="adds3-al")
    args = parser.parse_args()

    configure_logging("WARNING")
    config = load_config(
        experiment="planted-sweep",
        methods=args.methods,
        trials=args.trials,
        seed=0,
        separations=[0.15],
        multipliers=[16, 8, 4, 2, 1],
    )
    rows = list(run_planted_sweep(config, args.jobs))

    out_path = Path(args.output)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w", newline="", encoding="utf-8") as f:
        write_results(f, rows)

    groups = defaultdict(list)
    for row in rows:
        groups[(row.method.value, row.num_comparisons)].append(row)
    for (method, budget), group in sorted(groups.items(), key=lambda g: (g[0][0], -g[0][1])):
        revenue = [r.revenue for r in group]
        scores = [r.aari for r in group]
        spread = stdev(scores) if len(scores) > 1 else 0.0
        print(
            f"{method:10s} {budget:8d}  revenue {mean(revenue):.4g}  "
            f"AARI {mean(scores):.3f} ± {spread:.3f}"
        )

    print(f"Wrote {len(rows)} rows to {out_path.absolute()}")


if __name__ == "__main__":
    main()
