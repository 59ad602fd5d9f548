"""Command-line interface: run experiments, sweep sample sizes, plot, dump config.

Verbs:
  run          one experiment (strategy x problem x one lambda)
  sweep        one experiment over a lambda grid
  plot         SVG diagnostic from a JSON record produced by run/sweep
  dump-config  print or save the strategy configuration defaults
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .distribution import STRATEGY_MODES, config_for_strategy, dump_config, load_config
from .harness import (
    ExperimentSpec,
    emit_csv,
    emit_json,
    experiment_payload,
    load_json,
    run_experiment,
)
from .problems import BENCHMARK_NAMES


def _parse_lambdas(raw: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in raw.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {raw!r}")
    if not values:
        raise argparse.ArgumentTypeError("at least one sample size is required")
    return values


def _add_experiment_args(parser: argparse.ArgumentParser, many_lambdas: bool) -> None:
    parser.add_argument("--strategy", required=True, choices=STRATEGY_MODES)
    parser.add_argument("--problem", required=True, choices=BENCHMARK_NAMES)
    parser.add_argument("--dim", type=int, default=40, help="problem dimension (default 40)")
    if many_lambdas:
        parser.add_argument(
            "--lambda",
            dest="lambdas",
            type=_parse_lambdas,
            default=(4, 8, 12, 16, 20, 24, 28, 32, 40, 60, 80),
            help="comma-separated sample sizes (default: the full sweep grid)",
        )
    else:
        parser.add_argument("--lambda", dest="lambdas", type=_parse_lambdas, required=True,
                            help="sample size (a single even integer)")
    parser.add_argument("--trials", type=int, default=50)
    parser.add_argument("--budget", type=int, default=10**6)
    parser.add_argument("--target", type=float, default=1e-10)
    parser.add_argument("--seed", type=int, default=1, help="base seed; trial i uses seed + i")
    parser.add_argument("--trajectory", action="store_true",
                        help="record per-generation best-value and eigenvalue trajectories")
    parser.add_argument("--workers", type=int, default=1, help="parallel trial workers")
    parser.add_argument("--config", type=Path, default=None,
                        help="strategy config file overriding the preset")
    parser.add_argument("--out", type=Path, default=None,
                        help="output stem; writes <stem>.csv and <stem>.json")


def _run_spec(args, lambdas) -> ExperimentSpec:
    config = load_config(args.config) if args.config is not None else None
    return ExperimentSpec(
        strategy=args.strategy,
        problem=args.problem,
        d=args.dim,
        lambdas=tuple(lambdas),
        trials=args.trials,
        budget=args.budget,
        target=args.target,
        base_seed=args.seed,
        record_trajectory=args.trajectory,
        record_eigenvalues=args.trajectory,
        workers=args.workers,
        config=config,
    )


def _execute(spec: ExperimentSpec, out: Path | None) -> int:
    results = run_experiment(spec)
    for summary, _ in results:
        print(
            f"{summary.strategy} {summary.problem} d={summary.d} lambda={summary.lam}: "
            f"{summary.n_success}/{summary.trials} successes, "
            f"mean evals {summary.mean_evals:.6g} (std {summary.std_evals:.6g})"
        )
    if out is not None:
        out.parent.mkdir(parents=True, exist_ok=True)
        emit_csv([summary for summary, _ in results], out.with_suffix(".csv"))
        emit_json(experiment_payload(spec, results), out.with_suffix(".json"))
        print(f"wrote {out.with_suffix('.csv')} and {out.with_suffix('.json')}")
    return 0


def _cmd_run(args) -> int:
    if len(args.lambdas) != 1:
        print("run expects exactly one --lambda; use sweep for a grid", file=sys.stderr)
        return 2
    return _execute(_run_spec(args, args.lambdas), args.out)


def _cmd_sweep(args) -> int:
    return _execute(_run_spec(args, args.lambdas), args.out)


def _cmd_plot(args) -> int:
    from .plotting import emit_eig_plot

    payload = load_json(args.record)
    results = payload["results"]
    block = next((r for r in results if r["lambda"] == args.lam), None) if args.lam else results[0]
    if block is None:
        print(f"no result block for lambda={args.lam} in {args.record}", file=sys.stderr)
        return 2
    trials = block["trials"]
    if not 0 <= args.trial < len(trials):
        print(f"trial index {args.trial} out of range (0..{len(trials) - 1})", file=sys.stderr)
        return 2
    record = trials[args.trial]
    out = args.out or Path(args.record).with_suffix(f".trial{args.trial}.svg")
    spec = payload["spec"]
    title = f"{spec['strategy']} on {spec['problem']} (d={spec['d']}, trial {args.trial})"
    try:
        emit_eig_plot(record, out, title=title)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    print(f"wrote {out}")
    return 0


def _cmd_dump_config(args) -> int:
    if args.config is not None:
        config = load_config(args.config)
    else:
        config = config_for_strategy(args.strategy, dim=args.dim, lam=args.lambdas[0])
    text = dump_config(config)
    if args.out is not None:
        args.out.write_text(text, encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        print(text, end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fmnes", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="verb", required=True)

    p_run = sub.add_parser("run", help="run one experiment")
    _add_experiment_args(p_run, many_lambdas=False)
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="run an experiment over a lambda grid")
    _add_experiment_args(p_sweep, many_lambdas=True)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_plot = sub.add_parser("plot", help="plot eigenvalue/best-value trajectories from a JSON record")
    p_plot.add_argument("record", type=Path, help="JSON record written by run/sweep")
    p_plot.add_argument("--trial", type=int, default=0)
    p_plot.add_argument("--lambda", dest="lam", type=int, default=None,
                        help="which lambda block to plot (default: first)")
    p_plot.add_argument("--out", type=Path, default=None)
    p_plot.set_defaults(func=_cmd_plot)

    p_dump = sub.add_parser("dump-config", help="print strategy configuration defaults")
    p_dump.add_argument("--strategy", default="fmnes", choices=STRATEGY_MODES)
    p_dump.add_argument("--dim", type=int, default=40)
    p_dump.add_argument("--lambda", dest="lambdas", type=_parse_lambdas, default=(16,))
    p_dump.add_argument("--config", type=Path, default=None,
                        help="re-emit an existing config file instead of a preset")
    p_dump.add_argument("--out", type=Path, default=None)
    p_dump.set_defaults(func=_cmd_dump_config)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
