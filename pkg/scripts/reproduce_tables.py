#!/usr/bin/env python3
"""Full benchmark campaign: every strategy on every problem at its best
sample size, 50 trials each, d=40, budget 1e6, target 1e-10.

This is the extended run (an hour or more of CPU time).  Results land in
out/tables/ as CSV and JSON, one experiment per (strategy, problem).  For
the quick desk-scale checks, run the acceptance suite instead:

    pytest tests/test_acceptance.py -v -s
"""

import argparse
from pathlib import Path

from fmnes.harness import ExperimentSpec, emit_csv, emit_json, experiment_payload, run_experiment

# Best sample size per (strategy, problem) from the sweep protocol.
BEST_LAMBDA = {
    ("fmnes", "sphere"): 8, ("fmnes", "ellipsoid"): 16,
    ("fmnes", "rosenbrock"): 16, ("fmnes", "cigar"): 8,
    ("fmnes", "ic-sphere"): 12, ("fmnes", "ic-ellipsoid"): 60,
    ("fmnes", "ic-rosenbrock"): 20, ("fmnes", "ic-cigar"): 20,
    ("dxnes-ic", "sphere"): 8, ("dxnes-ic", "ellipsoid"): 20,
    ("dxnes-ic", "rosenbrock"): 20, ("dxnes-ic", "cigar"): 20,
    ("dxnes-ic", "ic-sphere"): 12, ("dxnes-ic", "ic-ellipsoid"): 60,
    ("dxnes-ic", "ic-rosenbrock"): 24, ("dxnes-ic", "ic-cigar"): 20,
    ("xnes", "sphere"): 8, ("xnes", "ellipsoid"): 8,
    ("xnes", "rosenbrock"): 12, ("xnes", "cigar"): 8,
    ("xnes", "ic-sphere"): 40, ("xnes", "ic-ellipsoid"): 40,
    ("xnes", "ic-rosenbrock"): 28, ("xnes", "ic-cigar"): 40,
    ("xnes-r", "ic-sphere"): 40, ("xnes-r", "ic-ellipsoid"): 40,
    ("xnes-r", "ic-rosenbrock"): 28, ("xnes-r", "ic-cigar"): 40,
    # ablations on the corner problem
    ("method-a", "ic-sphere"): 16, ("method-b", "ic-sphere"): 12,
    ("method-c", "ic-sphere"): 16,
}


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path("out/tables"))
    parser.add_argument("--trials", type=int, default=50)
    parser.add_argument("--dim", type=int, default=40)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--workers", type=int, default=4)
    parser.add_argument("--only", nargs="*", default=None,
                        help="restrict to strategies, e.g. --only fmnes dxnes-ic")
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    rows = []
    for (strategy, problem), lam in sorted(BEST_LAMBDA.items()):
        if args.only and strategy not in args.only:
            continue
        spec = ExperimentSpec(
            strategy=strategy, problem=problem, d=args.dim, lambdas=(lam,),
            trials=args.trials, base_seed=args.seed, workers=args.workers,
        )
        results = run_experiment(spec)
        summary, _ = results[0]
        rows.append(summary)
        print(f"{strategy:9s} {problem:13s} lambda={lam:2d}: "
              f"{summary.n_success}/{summary.trials} mean={summary.mean_evals:.6g}")
        emit_json(experiment_payload(spec, results), args.out / f"{strategy}_{problem}.json")
    emit_csv(rows, args.out / "summary.csv")
    print(f"wrote {args.out / 'summary.csv'}")


if __name__ == "__main__":
    main()
