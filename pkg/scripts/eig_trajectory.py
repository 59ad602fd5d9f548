#!/usr/bin/env python3
"""Eigenvalue-trajectory diagnostics on the 40-d rosenbrock problem.

Runs one trial each of FM-NES (lambda=16) and DX-NES-IC (lambda=20) with
trajectory recording and writes one SVG per strategy: square roots of all
eigenvalues of the normalized covariance (red, log scale) against the best
evaluation value (blue, log scale), both over evaluations.
"""

import argparse
from pathlib import Path

from fmnes.harness import ExperimentSpec, run_trial
from fmnes.plotting import emit_eig_plot


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path("out/diagnostics"))
    parser.add_argument("--dim", type=int, default=40)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    for strategy, lam in (("fmnes", 16), ("dxnes-ic", 20)):
        spec = ExperimentSpec(
            strategy=strategy, problem="rosenbrock", d=args.dim, lambdas=(lam,),
            trials=1, base_seed=args.seed, record_trajectory=True,
            record_eigenvalues=True,
        )
        record = run_trial(spec, lam=lam, trial_index=0)
        path = args.out / f"rosenbrock_{strategy}.svg"
        emit_eig_plot(
            {"trajectory": record.trajectory, "eig_trajectory": record.eig_trajectory},
            path,
            title=f"{strategy} on rosenbrock (d={args.dim})",
        )
        ratios = [point[1][0] / point[1][1] for point in record.eig_trajectory]
        print(f"{strategy}: success={record.success} evals={record.evals_used} "
              f"max sqrt-eig ratio={max(ratios):.2f} -> {path}")


if __name__ == "__main__":
    main()
