"""Experiment runner: multi-trial campaigns and their reporting.

A trial loops ask / evaluate / tell until the best feasible value beats
the target, the evaluation budget runs out, or the engine aborts.  An
experiment runs ``trials`` independent trials per sample size with seeds
``base_seed + trial_index``, aggregates success-conditioned statistics,
and serializes to CSV (one row per strategy/problem/sample size) and JSON
(full per-trial records, round-trippable).
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from . import problems as problems_mod
from .distribution import StrategyConfig, config_for_strategy
from .engine import DivergenceError, Optimizer, StepSizeRangeError
from .problems import (
    DEFAULT_RESAMPLE_CAP,
    BudgetExhaustedError,
    EvalCounter,
    ResampleCapError,
    evaluate_population,
    make_benchmark,
    resample_ask,
)

JSON_SCHEMA = "nes-experiment/1"

REASON_BUDGET = "budget_exhausted"
REASON_SIGMA = "sigma_guard"
REASON_RESAMPLE = "resample_cap"
REASON_DIVERGED = "nonfinite_state"

CSV_COLUMNS = (
    "strategy",
    "problem",
    "d",
    "lambda",
    "trials",
    "n_success",
    "mean_evals",
    "std_evals",
    "base_seed",
)


@dataclass(frozen=True)
class ExperimentSpec:
    """One campaign: a strategy on a problem over a sample-size grid."""

    strategy: str
    problem: str
    d: int
    lambdas: tuple[int, ...]
    trials: int = 50
    budget: int = 10**6
    target: float = 1e-10
    base_seed: int = 1
    record_trajectory: bool = False
    record_eigenvalues: bool = False
    resample_cap: int = DEFAULT_RESAMPLE_CAP
    workers: int = 1
    config: Optional[StrategyConfig] = None

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if any(self.budget < lam for lam in self.lambdas):
            raise ValueError("budget must cover at least one generation")
        if not self.target > 0:
            raise ValueError("target must be positive")


@dataclass
class TrialRecord:
    """Outcome of one trial."""

    trial_index: int
    seed: int
    success: bool
    evals_used: int
    best_value: float
    generations: int
    reason: Optional[str] = None
    trajectory: Optional[list[tuple[int, float]]] = None
    eig_trajectory: Optional[list[tuple[int, list[float]]]] = None


@dataclass
class SummaryRow:
    """Success-conditioned aggregate over one (strategy, problem, lambda)."""

    strategy: str
    problem: str
    d: int
    lam: int
    trials: int
    n_success: int
    mean_evals: float
    std_evals: float
    base_seed: int


def _strategy_config(spec: ExperimentSpec, lam: int) -> StrategyConfig:
    if spec.config is not None:
        if spec.config.lam != lam or spec.config.dim != spec.d:
            raise ValueError("explicit config must match the requested lambda and d")
        return spec.config
    engine_mode = "xnes" if spec.strategy == "xnes-r" else spec.strategy
    return config_for_strategy(engine_mode, dim=spec.d, lam=lam)


def _sqrt_eigenvalues(b: np.ndarray) -> list[float]:
    vals = np.linalg.eigvalsh(b @ b.T)[::-1]
    return np.sqrt(np.maximum(vals, 0.0)).tolist()


def run_trial(spec: ExperimentSpec, lam: int, trial_index: int) -> TrialRecord:
    """Run one seeded trial to success, budget exhaustion, or engine abort."""
    problem = make_benchmark(spec.problem, spec.d)
    config = _strategy_config(spec, lam)
    seed = spec.base_seed + trial_index
    opt = Optimizer(config, problem.init_m, problem.init_sigma, seed=seed)
    counter = EvalCounter()
    resampling = spec.strategy == "xnes-r"

    best = float("inf")
    trajectory = [] if spec.record_trajectory else None
    eigs = [] if spec.record_eigenvalues else None
    reason: Optional[str] = None
    success = False

    while True:
        if not resampling and counter.total + lam > spec.budget:
            reason = REASON_BUDGET
            break
        try:
            if resampling:
                pop = resample_ask(
                    opt.state,
                    opt.params,
                    problem,
                    counter,
                    opt.rng,
                    max_total=spec.budget,
                    cap=spec.resample_cap,
                )
            else:
                pop = opt.ask()
                evaluate_population(problem, pop, counter)
        except BudgetExhaustedError:
            reason = REASON_BUDGET
            break
        except ResampleCapError:
            reason = REASON_RESAMPLE
            break
        except ValueError:
            # objective overflow on a diverged run: x finite, f(x) not
            reason = REASON_DIVERGED
            break

        feasible_values = [s.value for s in pop if s.feasible]
        if feasible_values:
            best = min(best, min(feasible_values))
        if trajectory is not None:
            trajectory.append((counter.total, best))
        if best < spec.target:
            success = True
            break
        try:
            opt.tell(pop)
        except StepSizeRangeError:
            reason = REASON_SIGMA
            break
        except DivergenceError:
            reason = REASON_DIVERGED
            break
        if eigs is not None:
            eigs.append((counter.total, _sqrt_eigenvalues(opt.state.B)))

    return TrialRecord(
        trial_index=trial_index,
        seed=seed,
        success=success,
        evals_used=counter.total,
        best_value=best,
        generations=opt.state.g,
        reason=reason,
        trajectory=trajectory,
        eig_trajectory=eigs,
    )


def summarize(spec: ExperimentSpec, lam: int, records: Sequence[TrialRecord]) -> SummaryRow:
    """Aggregate per-trial records; evaluation statistics over successes only."""
    wins = [r.evals_used for r in records if r.success]
    if wins:
        mean = float(np.mean(wins))
        std = float(np.std(wins))
    else:
        mean = float("nan")
        std = float("nan")
    return SummaryRow(
        strategy=spec.strategy,
        problem=spec.problem,
        d=spec.d,
        lam=lam,
        trials=len(records),
        n_success=len(wins),
        mean_evals=mean,
        std_evals=std,
        base_seed=spec.base_seed,
    )


def _trial_task(args: tuple) -> TrialRecord:
    spec, lam, index = args
    return run_trial(spec, lam, index)


def run_experiment(spec: ExperimentSpec) -> list[tuple[SummaryRow, list[TrialRecord]]]:
    """Run every (lambda, trial) cell; aggregation is order-independent."""
    results = []
    for lam in spec.lambdas:
        tasks = [(spec, lam, i) for i in range(spec.trials)]
        if spec.workers > 1:
            with ProcessPoolExecutor(max_workers=spec.workers) as pool:
                records = list(pool.map(_trial_task, tasks))
        else:
            records = [_trial_task(t) for t in tasks]
        records.sort(key=lambda r: r.trial_index)
        results.append((summarize(spec, lam, records), records))
    return results


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def _format_number(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_csv(rows: Sequence[SummaryRow]) -> str:
    """Render summary rows with the stable column order, full precision."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow(
            [
                row.strategy,
                row.problem,
                row.d,
                row.lam,
                row.trials,
                row.n_success,
                _format_number(row.mean_evals),
                _format_number(row.std_evals),
                row.base_seed,
            ]
        )
    return out.getvalue()


def emit_csv(rows: Sequence[SummaryRow], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(render_csv(rows))


def _record_payload(record: TrialRecord) -> dict:
    payload = asdict(record)
    if payload["trajectory"] is not None:
        payload["trajectory"] = [[e, v] for e, v in payload["trajectory"]]
    if payload["eig_trajectory"] is not None:
        payload["eig_trajectory"] = [[e, list(v)] for e, v in payload["eig_trajectory"]]
    return payload


def experiment_payload(spec: ExperimentSpec, results) -> dict:
    """JSON-ready structure for one experiment (documented schema)."""
    spec_dict = asdict(spec)
    spec_dict["lambdas"] = list(spec.lambdas)
    if spec.config is not None:
        spec_dict["config"] = asdict(spec.config)
    return {
        "schema": JSON_SCHEMA,
        "spec": spec_dict,
        "results": [
            {
                "lambda": summary.lam,
                "summary": asdict(summary),
                "trials": [_record_payload(r) for r in records],
            }
            for summary, records in results
        ],
    }


def emit_json(payload: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_json(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("schema") != JSON_SCHEMA:
        raise ValueError(f"unrecognized record schema {payload.get('schema')!r}")
    return payload
